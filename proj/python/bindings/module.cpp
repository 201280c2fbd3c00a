#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "roptd/config.hpp"
#include "roptd/equivalence.hpp"
#include "roptd/errors.hpp"
#include "roptd/information.hpp"
#include "roptd/multiplicative.hpp"
#include "roptd/reporting.hpp"
#include "roptd/solver.hpp"
#include "roptd/symmetry.hpp"

#include <json.hpp>

namespace py = pybind11;

namespace {

struct LoadedProblem {
  roptd::ProblemConfig cfg;
  roptd::Problem problem;
};

LoadedProblem load(const std::string& config_path) {
  LoadedProblem lp;
  lp.cfg = roptd::load_config(config_path);
  lp.problem = roptd::assemble(lp.cfg);
  return lp;
}

roptd::Vector to_weights(const LoadedProblem& lp, const std::vector<double>& weights) {
  if (static_cast<int>(weights.size()) != lp.problem.space.num_points()) {
    throw roptd::Error("expected " + std::to_string(lp.problem.space.num_points()) +
                       " weights, got " + std::to_string(weights.size()));
  }
  roptd::Vector w(lp.problem.space.num_points());
  for (size_t j = 0; j < weights.size(); ++j) {
    w[static_cast<Eigen::Index>(j)] = weights[j];
  }
  const double total = w.sum();
  if (!(total > 0.0)) {
    throw roptd::Error("weights must have positive total mass");
  }
  return w / total;
}

py::object json_to_py(const nlohmann::ordered_json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

std::vector<int> resolve_axes(const LoadedProblem& lp, const std::vector<std::string>& names) {
  std::vector<int> axes;
  for (const std::string& name : names) {
    int axis = -1;
    for (size_t l = 0; l < lp.cfg.factors.size(); ++l) {
      if (lp.cfg.factors[l].name == name) {
        axis = static_cast<int>(l);
        break;
      }
    }
    if (axis < 0) {
      throw roptd::ConfigError("symmetry names unknown factor '" + name + "'");
    }
    axes.push_back(axis);
  }
  return axes;
}

py::object py_solve(const std::string& config_path, const std::string& algorithm,
                    const std::vector<std::string>& symmetry, double delta, bool use_v0_raw) {
  LoadedProblem lp = load(config_path);
  if (!algorithm.empty()) {
    if (algorithm != "interior" && algorithm != "multiplicative") {
      throw roptd::ConfigError("unknown algorithm '" + algorithm + "'");
    }
    lp.cfg.algorithm = algorithm;
  }
  if (delta > 0.0) {
    lp.cfg.solver.delta = delta;
    lp.cfg.mult.delta = delta;
  }
  std::vector<std::string> axis_names = symmetry.empty() ? lp.cfg.symmetry_axes : symmetry;

  const roptd::InfoContext ctx =
      roptd::build_context(lp.problem.model, lp.problem.space, lp.problem.cov, !use_v0_raw);
  const bool interior = lp.cfg.algorithm == "interior";
  const double threshold =
      interior ? lp.cfg.solver.support_threshold : lp.cfg.mult.support_threshold;

  roptd::ReportMeta meta;
  meta.config_path = config_path;
  meta.working_matrix = use_v0_raw ? "V0" : "R0";
  meta.p = lp.problem.space.num_factors();
  meta.m = lp.problem.model.num_responses();
  meta.q = lp.problem.model.q();
  meta.n_points = lp.problem.space.num_points();
  meta.support_threshold = threshold;
  meta.options = nlohmann::ordered_json::object();

  roptd::SolveReport report;
  if (!axis_names.empty()) {
    const std::vector<int> axes = resolve_axes(lp, axis_names);
    const roptd::OrbitReduction red =
        roptd::reduce_by_reflections(lp.problem.space, axes, lp.problem.model);
    const roptd::InfoContext rctx = roptd::reduce_context(ctx, red.orbits);
    report = interior ? roptd::solve(rctx, lp.cfg.solver)
                      : roptd::solve_multiplicative(rctx, lp.cfg.mult);
    report.weights = roptd::expand_reduced_weights(red, report.weights);
    meta.reduction_applied = true;
    meta.reduction_axes = axis_names;
    meta.orbit_count = red.orbit_count();
  } else {
    report = interior ? roptd::solve(ctx, lp.cfg.solver)
                      : roptd::solve_multiplicative(ctx, lp.cfg.mult);
  }
  const roptd::InfoState state = roptd::info_matrix(ctx, report.weights);
  report.loss = roptd::log_loss(state);
  const roptd::Vector d = roptd::d_vector(ctx, report.weights);
  report.max_d = d.maxCoeff();
  report.converged = report.max_d <= (interior ? lp.cfg.solver.delta : lp.cfg.mult.delta);
  report.support = roptd::support_points(lp.problem.space, report.weights, threshold);

  return json_to_py(roptd::report_to_json(report, lp.problem.space, meta));
}

py::object py_verify(const std::string& config_path, const std::vector<double>& weights,
                     double delta, bool use_v0_raw) {
  const LoadedProblem lp = load(config_path);
  const roptd::InfoContext ctx =
      roptd::build_context(lp.problem.model, lp.problem.space, lp.problem.cov, !use_v0_raw);
  const roptd::Vector w = to_weights(lp, weights);
  const double d = delta > 0.0 ? delta : lp.cfg.solver.delta;
  const roptd::EquivalenceReport rep =
      roptd::verify_optimality(ctx, w, d, lp.cfg.solver.support_threshold);

  nlohmann::ordered_json j;
  j["delta"] = rep.delta_used;
  j["max_d"] = rep.max_d;
  j["argmax_index"] = rep.argmax_j;
  j["verified"] = rep.converged;
  j["support_indices"] = rep.support_indices;
  j["d"] = std::vector<double>(rep.d_values.data(), rep.d_values.data() + rep.d_values.size());
  return json_to_py(j);
}

std::vector<double> py_d_values(const std::string& config_path,
                                const std::vector<double>& weights, bool use_v0_raw) {
  const LoadedProblem lp = load(config_path);
  const roptd::InfoContext ctx =
      roptd::build_context(lp.problem.model, lp.problem.space, lp.problem.cov, !use_v0_raw);
  const roptd::Vector d = roptd::d_vector(ctx, to_weights(lp, weights));
  return std::vector<double>(d.data(), d.data() + d.size());
}

std::vector<std::vector<double>> py_grid_points(const std::string& config_path) {
  const LoadedProblem lp = load(config_path);
  std::vector<std::vector<double>> points;
  points.reserve(static_cast<size_t>(lp.problem.space.num_points()));
  for (int j = 0; j < lp.problem.space.num_points(); ++j) {
    const roptd::Vector x = lp.problem.space.point(j);
    points.emplace_back(x.data(), x.data() + x.size());
  }
  return points;
}

py::object py_round(const std::string& config_path, const std::vector<double>& weights, long n) {
  const LoadedProblem lp = load(config_path);
  const roptd::ExactDesign design =
      roptd::round_design(lp.problem.space, to_weights(lp, weights), n,
                          lp.cfg.solver.support_threshold);
  py::list runs;
  for (const roptd::RunAllocation& run : design.runs) {
    py::dict entry;
    entry["point"] = std::vector<double>(run.point.data(), run.point.data() + run.point.size());
    entry["count"] = run.count;
    runs.append(entry);
  }
  return runs;
}

}  // namespace

PYBIND11_MODULE(_roptd, m) {
  m.doc() = "R-optimal experimental designs for multi-response regression";

  // Translators run newest-first, so the base class is registered first.
  py::register_exception<roptd::Error>(m, "RoptdError", PyExc_RuntimeError);
  py::register_exception<roptd::SingularInformation>(m, "SingularInformationError",
                                                     PyExc_ArithmeticError);
  py::register_exception<roptd::ConfigError>(m, "ConfigError", PyExc_ValueError);

  m.def("solve", &py_solve, py::arg("config_path"), py::arg("algorithm") = "",
        py::arg("symmetry") = std::vector<std::string>{}, py::arg("delta") = 0.0,
        py::arg("use_v0_raw") = false,
        "Solve the design problem in a config file; returns the report as a dict.");
  m.def("verify", &py_verify, py::arg("config_path"), py::arg("weights"), py::arg("delta") = 0.0,
        py::arg("use_v0_raw") = false,
        "Equivalence-theorem check of a weight vector; returns a dict.");
  m.def("d_values", &py_d_values, py::arg("config_path"), py::arg("weights"),
        py::arg("use_v0_raw") = false, "Directional sensitivities d(w, x_j) for every grid point.");
  m.def("grid_points", &py_grid_points, py::arg("config_path"),
        "The candidate design points of a config, in enumeration order.");
  m.def("round_design", &py_round, py::arg("config_path"), py::arg("weights"), py::arg("n"),
        "Apportion n runs over the support of a design measure.");
}
