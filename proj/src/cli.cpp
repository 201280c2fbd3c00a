#include "roptd/cli.hpp"

#include "roptd/config.hpp"
#include "roptd/equivalence.hpp"
#include "roptd/errors.hpp"
#include "roptd/information.hpp"
#include "roptd/model.hpp"
#include "roptd/multiplicative.hpp"
#include "roptd/reporting.hpp"
#include "roptd/solver.hpp"
#include "roptd/symmetry.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>

namespace roptd {

namespace {

namespace fs = std::filesystem;

struct CliFlags {
  std::string config_path;
  std::string algorithm;
  std::string symmetry;
  double delta = 0.0;
  bool delta_given = false;
  std::string out_dir = ".";
  bool out_given = false;
  std::string weights_path;
  bool use_v0_raw = false;
  long runs = 0;
};

struct LoadedProblem {
  ProblemConfig cfg;
  Problem problem;
  std::vector<int> axes;
  std::vector<std::string> axis_names;
  std::string stem;
};

std::vector<std::string> split_names(const std::string& text) {
  std::vector<std::string> names;
  std::string name;
  std::istringstream in(text);
  while (std::getline(in, name, ',')) {
    const auto first = name.find_first_not_of(" \t");
    const auto last = name.find_last_not_of(" \t");
    if (first != std::string::npos) {
      names.push_back(name.substr(first, last - first + 1));
    }
  }
  return names;
}

LoadedProblem load_problem(const CliFlags& flags) {
  LoadedProblem lp;
  lp.cfg = load_config(flags.config_path);
  if (!flags.algorithm.empty()) {
    if (flags.algorithm != "interior" && flags.algorithm != "multiplicative") {
      throw ConfigError("unknown algorithm '" + flags.algorithm +
                        "' (use 'interior' or 'multiplicative')");
    }
    lp.cfg.algorithm = flags.algorithm;
  }
  if (flags.delta_given) {
    if (!(flags.delta > 0.0)) {
      throw ConfigError("--delta must be positive");
    }
    lp.cfg.solver.delta = flags.delta;
    lp.cfg.mult.delta = flags.delta;
  }
  if (!flags.symmetry.empty()) {
    lp.cfg.symmetry_axes = split_names(flags.symmetry);
    if (lp.cfg.symmetry_axes.empty()) {
      throw ConfigError("--symmetry needs a comma-separated list of factor names");
    }
  }
  lp.problem = assemble(lp.cfg);
  for (const std::string& name : lp.cfg.symmetry_axes) {
    int axis = -1;
    for (size_t l = 0; l < lp.cfg.factors.size(); ++l) {
      if (lp.cfg.factors[l].name == name) {
        axis = static_cast<int>(l);
        break;
      }
    }
    if (axis < 0) {
      throw ConfigError("symmetry names unknown factor '" + name + "'");
    }
    lp.axes.push_back(axis);
    lp.axis_names.push_back(name);
  }
  lp.stem = fs::path(flags.config_path).stem().string();
  return lp;
}

std::string out_file(const CliFlags& flags, const std::string& stem, const std::string& suffix) {
  fs::create_directories(flags.out_dir);
  return (fs::path(flags.out_dir) / (stem + suffix)).string();
}

nlohmann::ordered_json solver_options_json(const SolverOptions& o) {
  nlohmann::ordered_json j;
  j["t1"] = o.t1;
  j["lambda"] = o.lambda;
  j["delta"] = o.delta;
  j["bfgs_grad_tol"] = o.bfgs_grad_tol;
  j["bfgs_max_iters"] = o.bfgs_max_iters;
  j["max_outer_iters"] = o.max_outer_iters;
  j["step_shrink"] = o.step_shrink;
  j["armijo_c"] = o.armijo_c;
  j["feasibility_margin"] = o.feasibility_margin;
  j["support_threshold"] = o.support_threshold;
  return j;
}

nlohmann::ordered_json mult_options_json(const MultOptions& o) {
  nlohmann::ordered_json j;
  j["max_iters"] = o.max_iters;
  j["delta"] = o.delta;
  j["damping"] = o.damping;
  j["trace_every"] = o.trace_every;
  j["support_threshold"] = o.support_threshold;
  return j;
}

void print_problem_line(const LoadedProblem& lp, bool use_correlation) {
  std::cout << "problem: p=" << lp.problem.space.num_factors() << " factors, m="
            << lp.problem.model.num_responses() << " responses, q=" << lp.problem.model.q()
            << " parameters, N=" << lp.problem.space.num_points()
            << " candidate points, working matrix " << (use_correlation ? "R0" : "V0") << '\n';
}

void print_support(const std::vector<SupportEntry>& support, double threshold) {
  std::cout << "support points: " << support.size() << " (threshold " << threshold << ")\n";
  for (const SupportEntry& s : support) {
    std::cout << "  (";
    for (Eigen::Index l = 0; l < s.point.size(); ++l) {
      if (l > 0) {
        std::cout << ", ";
      }
      std::cout << s.point[l];
    }
    std::cout << ")  " << std::fixed << std::setprecision(4) << s.weight << '\n';
    std::cout.unsetf(std::ios::fixed);
    std::cout << std::setprecision(6);
  }
}

void print_trace(const SolveReport& report) {
  std::cout << "stage trace:\n";
  std::cout << "  " << std::setw(12) << "t/iter" << std::setw(8) << "inner" << std::setw(16)
            << "phi1" << std::setw(16) << "phi" << std::setw(14) << "max_d" << '\n';
  for (const StageTrace& s : report.outer_trace) {
    std::cout << "  " << std::setw(12) << s.t << std::setw(8) << s.inner_iters << std::setw(16)
              << std::setprecision(8) << s.phi1 << std::setw(16) << s.phi << std::setw(14)
              << std::setprecision(3) << std::scientific << s.max_d << '\n';
    std::cout.unsetf(std::ios::scientific);
    std::cout << std::setprecision(6);
  }
}

int cmd_solve(const CliFlags& flags) {
  const LoadedProblem lp = load_problem(flags);
  const bool use_correlation = !flags.use_v0_raw;
  const InfoContext ctx =
      build_context(lp.problem.model, lp.problem.space, lp.problem.cov, use_correlation);
  print_problem_line(lp, use_correlation);

  const bool interior = lp.cfg.algorithm == "interior";
  const double threshold =
      interior ? lp.cfg.solver.support_threshold : lp.cfg.mult.support_threshold;
  const double delta = interior ? lp.cfg.solver.delta : lp.cfg.mult.delta;

  ReportMeta meta;
  meta.config_path = flags.config_path;
  meta.working_matrix = use_correlation ? "R0" : "V0";
  meta.p = lp.problem.space.num_factors();
  meta.m = lp.problem.model.num_responses();
  meta.q = lp.problem.model.q();
  meta.n_points = lp.problem.space.num_points();
  meta.support_threshold = threshold;
  meta.options = interior ? solver_options_json(lp.cfg.solver) : mult_options_json(lp.cfg.mult);

  SolveReport report;
  if (!lp.axes.empty()) {
    const OrbitReduction red = reduce_by_reflections(lp.problem.space, lp.axes, lp.problem.model);
    const InfoContext rctx = reduce_context(ctx, red.orbits);
    std::cout << "reduction: axes ";
    for (size_t i = 0; i < lp.axis_names.size(); ++i) {
      std::cout << (i > 0 ? "," : "") << lp.axis_names[i];
    }
    std::cout << " -> " << red.orbit_count() << " orbits\n";
    meta.reduction_applied = true;
    meta.reduction_axes = lp.axis_names;
    meta.orbit_count = red.orbit_count();

    report = interior ? solve(rctx, lp.cfg.solver) : solve_multiplicative(rctx, lp.cfg.mult);
    report.weights = expand_reduced_weights(red, report.weights);
  } else {
    report = interior ? solve(ctx, lp.cfg.solver) : solve_multiplicative(ctx, lp.cfg.mult);
  }

  // Final diagnostics always come from the full, unreduced problem.
  const InfoState state = info_matrix(ctx, report.weights);
  report.loss = log_loss(state);
  const Vector d = d_vector(ctx, report.weights);
  report.max_d = d.maxCoeff();
  report.converged = report.max_d <= delta;
  report.support = support_points(lp.problem.space, report.weights, threshold);

  print_trace(report);
  std::cout << "loss: " << std::setprecision(12) << report.loss << '\n'
            << "max_d: " << std::setprecision(6) << std::scientific << report.max_d
            << " (delta " << delta << ")\n";
  std::cout.unsetf(std::ios::scientific);
  std::cout << std::setprecision(6);
  std::cout << "converged: " << (report.converged ? "yes" : "no") << '\n';
  print_support(report.support, threshold);

  const std::string json_path = out_file(flags, lp.stem, ".report.json");
  const std::string csv_path = out_file(flags, lp.stem, ".support.csv");
  write_report(report, lp.problem.space, meta, ReportFormat::Json, json_path);
  write_report(report, lp.problem.space, meta, ReportFormat::Csv, csv_path);
  std::cout << "report: " << json_path << '\n' << "support csv: " << csv_path << '\n';
  return report.converged ? 0 : 2;
}

int cmd_verify(const CliFlags& flags) {
  if (flags.weights_path.empty()) {
    throw ConfigError("verify needs --weights FILE");
  }
  const LoadedProblem lp = load_problem(flags);
  const bool use_correlation = !flags.use_v0_raw;
  const InfoContext ctx =
      build_context(lp.problem.model, lp.problem.space, lp.problem.cov, use_correlation);
  print_problem_line(lp, use_correlation);

  const Vector w = read_weights_file(flags.weights_path, lp.problem.space);
  const double delta = flags.delta_given ? flags.delta : lp.cfg.solver.delta;
  const EquivalenceReport rep =
      verify_optimality(ctx, w, delta, lp.cfg.solver.support_threshold);

  std::cout << "max_d: " << std::setprecision(6) << std::scientific << rep.max_d << " (delta "
            << rep.delta_used << ")\n";
  std::cout.unsetf(std::ios::scientific);
  std::cout << std::setprecision(6);
  const Vector argmax_point = lp.problem.space.point(rep.argmax_j);
  std::cout << "argmax point: (";
  for (Eigen::Index l = 0; l < argmax_point.size(); ++l) {
    std::cout << (l > 0 ? ", " : "") << argmax_point[l];
  }
  std::cout << ")\n"
            << "support points: " << rep.support_indices.size() << '\n'
            << "verified: " << (rep.converged ? "yes" : "no") << '\n';

  if (flags.out_given) {
    nlohmann::ordered_json j;
    j["schema_version"] = 1;
    j["config"] = flags.config_path;
    j["weights_file"] = flags.weights_path;
    j["delta"] = rep.delta_used;
    j["max_d"] = rep.max_d;
    j["argmax_index"] = rep.argmax_j;
    j["argmax_point"] =
        std::vector<double>(argmax_point.data(), argmax_point.data() + argmax_point.size());
    j["verified"] = rep.converged;
    j["support_indices"] = rep.support_indices;
    j["d"] = std::vector<double>(rep.d_values.data(), rep.d_values.data() + rep.d_values.size());
    const std::string path = out_file(flags, lp.stem, ".verify.json");
    std::ofstream out(path, std::ios::binary);
    if (!out) {
      throw Error("cannot open '" + path + "' for writing");
    }
    out << j.dump(2) << '\n';
    std::cout << "verify report: " << path << '\n';
  }
  return rep.converged ? 0 : 2;
}

int cmd_reduce_info(const CliFlags& flags) {
  const LoadedProblem lp = load_problem(flags);
  if (lp.axes.empty()) {
    throw ConfigError("reduce-info needs symmetry axes (config 'symmetry' or --symmetry)");
  }
  print_problem_line(lp, !flags.use_v0_raw);
  const OrbitReduction red = reduce_by_reflections(lp.problem.space, lp.axes, lp.problem.model);
  std::cout << "axes:";
  for (size_t i = 0; i < lp.axes.size(); ++i) {
    const Vector qdiag =
        detect_q(lp.problem.model, lp.problem.space, Transform::reflection(lp.axes[i]));
    std::cout << (i > 0 ? ";" : "") << ' ' << lp.axis_names[i] << " Q=(";
    for (Eigen::Index c = 0; c < qdiag.size(); ++c) {
      std::cout << (c > 0 ? "," : "") << (qdiag[c] > 0 ? "+1" : "-1");
    }
    std::cout << ')';
  }
  std::cout << '\n';
  std::cout << "orbits: " << red.orbit_count() << " (from " << lp.problem.space.num_points()
            << " points)\n";
  std::map<int, int> histogram;
  for (int k = 0; k < red.orbit_count(); ++k) {
    ++histogram[red.multiplicity[static_cast<size_t>(k)]];
  }
  std::cout << "orbit sizes:";
  for (const auto& [size, count] : histogram) {
    std::cout << ' ' << count << " x " << size;
  }
  std::cout << '\n';
  std::cout << "reduced unknowns: " << red.orbit_count() << " of "
            << lp.problem.space.num_points() << '\n';
  return 0;
}

int cmd_round(const CliFlags& flags) {
  if (flags.weights_path.empty()) {
    throw ConfigError("round needs --weights FILE");
  }
  if (flags.runs < 1) {
    throw ConfigError("round needs --runs N with N >= 1");
  }
  const LoadedProblem lp = load_problem(flags);
  const Vector w = read_weights_file(flags.weights_path, lp.problem.space);
  const ExactDesign design =
      round_design(lp.problem.space, w, flags.runs, lp.cfg.solver.support_threshold);

  std::cout << "exact design with n=" << design.n << " runs over " << design.runs.size()
            << " support points:\n";
  for (const RunAllocation& run : design.runs) {
    std::cout << "  (";
    for (Eigen::Index l = 0; l < run.point.size(); ++l) {
      std::cout << (l > 0 ? ", " : "") << run.point[l];
    }
    std::cout << ")  " << run.count << '\n';
  }
  const std::string path = out_file(flags, lp.stem, ".design.csv");
  write_exact_design_csv(design, lp.problem.space, path);
  std::cout << "design csv: " << path << '\n';
  return 0;
}

int cmd_export_d(const CliFlags& flags) {
  if (flags.weights_path.empty()) {
    throw ConfigError("export-d needs --weights FILE");
  }
  const LoadedProblem lp = load_problem(flags);
  const bool use_correlation = !flags.use_v0_raw;
  const InfoContext ctx =
      build_context(lp.problem.model, lp.problem.space, lp.problem.cov, use_correlation);
  const Vector w = read_weights_file(flags.weights_path, lp.problem.space);
  const std::string path = out_file(flags, lp.stem, ".dsurface.csv");
  export_d_surface(lp.problem.space, ctx, w, path);
  const Vector d = d_vector(ctx, w);
  std::cout << "d surface: " << path << '\n'
            << "max_d: " << std::setprecision(6) << std::scientific << d.maxCoeff() << '\n';
  std::cout.unsetf(std::ios::scientific);
  return 0;
}

void add_common_flags(CLI::App* sub, CliFlags& flags) {
  sub->add_option("config", flags.config_path, "problem configuration file")->required();
  sub->add_option("--algorithm", flags.algorithm, "interior or multiplicative");
  sub->add_option("--symmetry", flags.symmetry, "comma-separated reflection axes (factor names)");
  sub->add_option("--delta", flags.delta, "equivalence-theorem tolerance override");
  sub->add_option("--out", flags.out_dir, "output directory (default '.')");
  sub->add_option("--weights", flags.weights_path, "weights file (support CSV or JSON report)");
  sub->add_flag("--use-v0-raw", flags.use_v0_raw, "build information atoms from V0 instead of R0");
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"R-optimal experimental designs for multi-response regression on a discrete grid"};
  app.require_subcommand(1);

  CliFlags flags;
  CLI::App* sub_solve = app.add_subcommand("solve", "compute an optimal design measure");
  CLI::App* sub_verify =
      app.add_subcommand("verify", "check a design against the equivalence theorem");
  CLI::App* sub_reduce = app.add_subcommand("reduce-info", "show reflection-orbit statistics");
  CLI::App* sub_round = app.add_subcommand("round", "apportion n runs to a design measure");
  CLI::App* sub_export = app.add_subcommand("export-d", "write the d(w,x) surface as CSV");
  for (CLI::App* sub : {sub_solve, sub_verify, sub_reduce, sub_round, sub_export}) {
    add_common_flags(sub, flags);
  }
  sub_round->add_option("--runs", flags.runs, "number of experimental runs");

  std::vector<std::string> argv_store = args;
  std::vector<char*> argv;
  argv.push_back(const_cast<char*>("roptd"));
  for (std::string& a : argv_store) {
    argv.push_back(a.data());
  }
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  CLI::App* active = nullptr;
  for (CLI::App* sub : {sub_solve, sub_verify, sub_reduce, sub_round, sub_export}) {
    if (app.got_subcommand(sub)) {
      active = sub;
      break;
    }
  }
  flags.delta_given = active->count("--delta") > 0;
  flags.out_given = active->count("--out") > 0;

  try {
    if (active == sub_solve) {
      return cmd_solve(flags);
    }
    if (active == sub_verify) {
      return cmd_verify(flags);
    }
    if (active == sub_reduce) {
      return cmd_reduce_info(flags);
    }
    if (active == sub_round) {
      return cmd_round(flags);
    }
    return cmd_export_d(flags);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

int run_cli(int argc, char** argv) {
  std::vector<std::string> args;
  args.reserve(static_cast<size_t>(argc > 0 ? argc - 1 : 0));
  for (int i = 1; i < argc; ++i) {
    args.emplace_back(argv[i]);
  }
  return run_cli(args);
}

}  // namespace roptd
