// Acceptance suite. Runs the numbered criteria given on the command line
// (1..10), or all of them when none is given, prints one PASS/FAIL line per
// criterion and exits with the number of failures.
#include "helpers.hpp"
#include "roptd/cli.hpp"
#include "roptd/config.hpp"
#include "roptd/equivalence.hpp"
#include "roptd/errors.hpp"
#include "roptd/information.hpp"
#include "roptd/model.hpp"
#include "roptd/solver.hpp"
#include "roptd/symmetry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace roptd;

namespace {

constexpr const char* kConfigs[] = {
    "example1.cfg",    "example1_sn1.cfg", "example1_v02.cfg", "example2.cfg",
    "example2_n8.cfg", "example3.cfg",     "example3_n501.cfg"};

struct Criterion {
  bool ok = true;
  std::string detail;

  void fail(const std::string& msg) {
    if (ok) {
      ok = false;
      detail = msg;
    }
  }
  void note(const std::string& msg) {
    if (ok) {
      detail = msg;
    }
  }
};

std::string fmt(double v) {
  std::ostringstream out;
  out << std::setprecision(2) << std::scientific << v;
  return out.str();
}

struct SolvedConfig {
  ProblemConfig cfg;
  Problem problem;
  InfoContext ctx;  // full (unreduced) context
  SolveReport report;
};

// Mirrors the CLI solve path: reduce when the config declares symmetry axes,
// then re-verify the expanded measure against the full problem.
SolvedConfig solve_config(const std::string& name, bool use_correlation = true) {
  SolvedConfig s;
  s.cfg = load_config(testutil::config_path(name));
  s.problem = assemble(s.cfg);
  s.ctx = build_context(s.problem.model, s.problem.space, s.problem.cov, use_correlation);
  if (!s.cfg.symmetry_axes.empty()) {
    std::vector<int> axes;
    for (const std::string& axis_name : s.cfg.symmetry_axes) {
      for (size_t l = 0; l < s.cfg.factors.size(); ++l) {
        if (s.cfg.factors[l].name == axis_name) {
          axes.push_back(static_cast<int>(l));
        }
      }
    }
    const OrbitReduction red = reduce_by_reflections(s.problem.space, axes, s.problem.model);
    const InfoContext rctx = reduce_context(s.ctx, red.orbits);
    s.report = solve(rctx, s.cfg.solver);
    s.report.weights = expand_reduced_weights(red, s.report.weights);
  } else {
    s.report = solve(s.ctx, s.cfg.solver);
  }
  const Vector d = d_vector(s.ctx, s.report.weights);
  s.report.max_d = d.maxCoeff();
  s.report.loss = log_loss(info_matrix(s.ctx, s.report.weights));
  s.report.converged = s.report.max_d <= s.cfg.solver.delta;
  s.report.support =
      support_points(s.problem.space, s.report.weights, s.cfg.solver.support_threshold);
  return s;
}

int find_point(const DesignSpace& space, const std::vector<double>& coords) {
  for (int j = 0; j < space.num_points(); ++j) {
    double diff = 0.0;
    for (int l = 0; l < space.num_factors(); ++l) {
      diff = std::max(diff, std::abs(space.points(j, l) - coords[static_cast<size_t>(l)]));
    }
    if (diff <= 1e-9) {
      return j;
    }
  }
  return -1;
}

bool near_one_of(double v, std::initializer_list<double> levels) {
  for (double level : levels) {
    if (std::abs(v - level) <= 1e-9) {
      return true;
    }
  }
  return false;
}

// --- criterion 1: Table 1, S_N1 on the unit square -------------------------

Criterion criterion1() {
  Criterion c;
  const SolvedConfig s = solve_config("example1_sn1.cfg");
  if (!s.report.converged) {
    c.fail("solver did not certify delta=1e-8 (max_d " + fmt(s.report.max_d) + ")");
    return c;
  }
  if (s.report.support.size() != 9) {
    c.fail("support has " + std::to_string(s.report.support.size()) + " points, expected 9");
    return c;
  }
  for (const SupportEntry& e : s.report.support) {
    if (!near_one_of(e.point[0], {0.0, 0.5, 1.0}) || !near_one_of(e.point[1], {0.0, 0.5, 1.0})) {
      c.fail("unexpected support point");
      return c;
    }
  }
  const double levels[3] = {0.0, 0.5, 1.0};
  const double table[3][3] = {{0.2500, 0.1242, 0.0864},
                              {0.1242, 0.1100, 0.0678},
                              {0.0864, 0.0678, 0.0832}};
  double worst = 0.0;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      const int idx = find_point(s.problem.space, {levels[i], levels[j]});
      const double err = std::abs(s.report.weights[idx] - table[i][j]);
      worst = std::max(worst, err);
    }
  }
  if (worst > 1e-3) {
    c.fail("weights deviate from Table 1 by " + fmt(worst));
  }
  c.note("9-point support on {0,0.5,1}^2, max table deviation " + fmt(worst));
  return c;
}

// --- criterion 2: Table 1, S_N2 under both error structures ----------------

void check_sn2(Criterion& c, const std::string& name, double center, double corner, double edge) {
  const SolvedConfig s = solve_config(name);
  if (!s.report.converged) {
    c.fail(name + ": not certified (max_d " + fmt(s.report.max_d) + ")");
    return;
  }
  if (s.report.support.size() != 9) {
    c.fail(name + ": support has " + std::to_string(s.report.support.size()) +
           " points, expected 9");
    return;
  }
  double worst = 0.0;
  auto probe = [&](double x1, double x2, double expect) {
    const int idx = find_point(s.problem.space, {x1, x2});
    worst = std::max(worst, std::abs(s.report.weights[idx] - expect));
  };
  probe(0.0, 0.0, center);
  for (double x1 : {-1.0, 1.0}) {
    for (double x2 : {-5.0, 5.0}) {
      probe(x1, x2, corner);
    }
  }
  probe(0.0, -5.0, edge);
  probe(0.0, 5.0, edge);
  probe(-1.0, 0.0, edge);
  probe(1.0, 0.0, edge);
  if (worst > 1e-3) {
    c.fail(name + ": weights deviate from Table 1 by " + fmt(worst));
  }
  c.note(c.detail.empty() ? "max table deviation " + fmt(worst)
                          : c.detail + ", " + fmt(worst));
}

Criterion criterion2() {
  Criterion c;
  check_sn2(c, "example1.cfg", 0.1492, 0.1305, 0.0822);
  if (c.ok) {
    check_sn2(c, "example1_v02.cfg", 0.1524, 0.1297, 0.0822);
  }
  return c;
}

// --- criterion 3: Table 3, the two Emax problems ----------------------------

void check_support_table(Criterion& c, const std::string& name,
                         const std::vector<double>& doses, const std::vector<double>& weights) {
  const SolvedConfig s = solve_config(name);
  if (!s.report.converged) {
    c.fail(name + ": not certified (max_d " + fmt(s.report.max_d) + ")");
    return;
  }
  if (s.report.support.size() != doses.size()) {
    c.fail(name + ": support has " + std::to_string(s.report.support.size()) +
           " points, expected " + std::to_string(doses.size()));
    return;
  }
  double worst = 0.0;
  for (size_t i = 0; i < doses.size(); ++i) {
    const int idx = find_point(s.problem.space, {doses[i]});
    if (idx < 0) {
      c.fail(name + ": expected dose not on the grid");
      return;
    }
    worst = std::max(worst, std::abs(s.report.weights[idx] - weights[i]));
  }
  if (worst > 1e-3) {
    c.fail(name + ": weights deviate from Table 3 by " + fmt(worst));
  }
  c.note(c.detail.empty() ? "max table deviation " + fmt(worst) : c.detail + ", " + fmt(worst));
}

Criterion criterion3() {
  Criterion c;
  check_support_table(c, "example3.cfg", {1.0, 4.0, 100.0}, {0.2532, 0.2138, 0.5330});
  if (c.ok) {
    check_support_table(c, "example3_n501.cfg", {4.2, 150.0}, {0.4492, 0.5508});
  }
  return c;
}

// --- criterion 4: Table 2 at reduced scale ----------------------------------

Criterion criterion4() {
  Criterion c;
  const SolvedConfig a = solve_config("example2.cfg");
  if (!a.report.converged) {
    c.fail("example2.cfg not certified (max_d " + fmt(a.report.max_d) + ")");
    return c;
  }
  if (a.report.support.size() != 32) {
    c.fail("example2.cfg support has " + std::to_string(a.report.support.size()) +
           " points, expected 32");
    return c;
  }
  const double table[4][3] = {{0.0, 0.0, 0.0511},
                              {0.0, 1.0, 0.0263},
                              {1.0, 0.0, 0.0263},
                              {1.0, 1.0, 0.0213}};
  double worst = 0.0;
  for (const auto& row : table) {
    const int idx = find_point(a.problem.space, {1.0, 1.0, 1.0, row[0], row[1]});
    worst = std::max(worst, std::abs(a.report.weights[idx] - row[2]));
  }
  if (worst > 1e-3) {
    c.fail("(+1,+1,+1) weights deviate from Table 2 by " + fmt(worst));
    return c;
  }

  const SolvedConfig b = solve_config("example2_n8.cfg");
  if (!b.report.converged || b.report.support.size() != 32) {
    c.fail("example2_n8.cfg did not certify with 32 support points");
    return c;
  }
  double cross = 0.0;
  for (const SupportEntry& e : a.report.support) {
    const std::vector<double> coords(e.point.data(), e.point.data() + e.point.size());
    const int idx = find_point(b.problem.space, coords);
    if (idx < 0) {
      c.fail("N*=6 support point missing from the N*=8 grid");
      return c;
    }
    cross = std::max(cross, std::abs(e.weight - b.report.weights[idx]));
  }
  if (cross > 1e-4) {
    c.fail("N*=6 vs N*=8 weights differ by " + fmt(cross));
  }
  c.note("32 support points, table deviation " + fmt(worst) + ", N*=6 vs N*=8 " + fmt(cross));
  return c;
}

// --- criterion 5: equivalence-theorem properties at every solution ----------

Criterion criterion5() {
  Criterion c;
  double worst_max_d = 0.0, worst_support = 0.0, worst_identity = 0.0;
  for (const char* name : kConfigs) {
    const SolvedConfig s = solve_config(name);
    if (!s.report.converged) {
      c.fail(std::string(name) + ": not certified (max_d " + fmt(s.report.max_d) + ")");
      return c;
    }
    const Vector d = d_vector(s.ctx, s.report.weights);
    const double max_d = d.maxCoeff();
    worst_max_d = std::max(worst_max_d, max_d);
    if (max_d > 1e-8) {
      c.fail(std::string(name) + ": max_d " + fmt(max_d) + " exceeds 1e-8");
      return c;
    }
    for (const SupportEntry& e : s.report.support) {
      const double dd = std::abs(d[e.index]);
      worst_support = std::max(worst_support, dd);
      if (dd > 1e-8 + 1e-9) {
        c.fail(std::string(name) + ": |d| at a support point is " + fmt(dd));
        return c;
      }
    }
    const double identity = std::abs(s.report.weights.dot(d));
    worst_identity = std::max(worst_identity, identity);
    if (identity > 1e-8) {
      c.fail(std::string(name) + ": sum w_j d_j = " + fmt(identity));
      return c;
    }
    const double q = static_cast<double>(s.ctx.q());
    if (d.minCoeff() < -q - 1e-9) {
      c.fail(std::string(name) + ": d dips below -q");
      return c;
    }
  }
  c.note("7 configs certified; worst max_d " + fmt(worst_max_d) + ", support |d| " +
         fmt(worst_support) + ", identity " + fmt(worst_identity));
  return c;
}

// --- criterion 6: gradient vs central differences ----------------------------

Criterion criterion6() {
  Criterion c;
  double worst = 0.0;
  std::mt19937 rng(424242);
  // The central-difference truncation of the barrier term grows like
  // h^2 / (t w^3); with ~1/225 weights, t must be large enough that it stays
  // well under the 1e-6 tolerance.
  const double t = 200.0;
  const double h = 1e-6;
  for (const std::string name : {"example1.cfg", "example3.cfg"}) {
    const Problem pb = testutil::example_problem(name);
    const InfoContext ctx = testutil::context_of(pb);
    for (int rep = 0; rep < 10; ++rep) {
      const Vector w = testutil::interior_weights(ctx.num_points(), rng);
      const Vector wr = w.head(ctx.num_points() - 1);
      const Vector g = grad_phi1(ctx, wr, t);
      for (int j = 0; j < wr.size(); ++j) {
        Vector up = wr, dn = wr;
        up[j] += h;
        dn[j] -= h;
        const double fd = (phi1(ctx, up, t) - phi1(ctx, dn, t)) / (2.0 * h);
        const double rel = std::abs(g[j] - fd) / std::max(1.0, std::abs(fd));
        worst = std::max(worst, rel);
        if (rel >= 1e-6) {
          c.fail(name + ": relative gradient error " + fmt(rel) + " at coordinate " +
                 std::to_string(j));
          return c;
        }
      }
    }
  }
  c.note("20 random interior points, worst relative error " + fmt(worst));
  return c;
}

// --- criterion 7: theorem suite ----------------------------------------------

Criterion criterion7() {
  Criterion c;

  const ProblemConfig cfg1 = load_config(testutil::config_path("example1.cfg"));
  const Problem pb1 = assemble(cfg1);
  const InfoContext ctx1 = testutil::context_of(pb1);
  const SolveReport base = solve(ctx1, cfg1.solver);
  if (!(base.max_d <= cfg1.solver.delta)) {
    c.fail("baseline example1 solve did not certify");
    return c;
  }

  // (a) scale invariance: solving on T(S_N) reproduces the weights
  std::mt19937 rng(7777);
  std::uniform_real_distribution<double> scale_draw(0.25, 4.0);
  double worst_a = 0.0;
  for (int rep = 0; rep < 2; ++rep) {
    Problem scaled = pb1;
    for (int l = 0; l < scaled.space.num_factors(); ++l) {
      scaled.space.points.col(l) *= scale_draw(rng);
    }
    const InfoContext sctx = testutil::context_of(scaled);
    const SolveReport srep = solve(sctx, cfg1.solver);
    worst_a = std::max(worst_a, (srep.weights - base.weights).cwiseAbs().maxCoeff());
  }
  if (worst_a > 1e-6) {
    c.fail("scale invariance: weights differ by " + fmt(worst_a));
    return c;
  }

  // (b) reduced vs full solve
  const OrbitReduction red = reduce_by_reflections(pb1.space, {0, 1}, pb1.model);
  const InfoContext rctx = reduce_context(ctx1, red.orbits);
  SolveReport rrep = solve(rctx, cfg1.solver);
  const Vector expanded = expand_reduced_weights(red, rrep.weights);
  const double diff_b = (expanded - base.weights).cwiseAbs().maxCoeff();
  if (diff_b > 1e-6) {
    c.fail("reduction: reduced vs full weights differ by " + fmt(diff_b));
    return c;
  }

  // (c) identical bases: any SPD V0 reproduces the single-response design
  const DesignSpace qspace = build_grid({FactorSpec::continuous("x1", -1.0, 1.0, 21)});
  ModelSpec single;
  single.responses.push_back(ResponseBasis::monomial({{0}, {1}, {2}}));
  const InfoContext ctx_single =
      build_context(single, qspace, covariance_from_correlation(Matrix::Identity(1, 1)));
  const SolveReport rep_single = solve(ctx_single);

  ModelSpec triple;
  for (int r = 0; r < 3; ++r) {
    triple.responses.push_back(ResponseBasis::monomial({{0}, {1}, {2}}));
  }
  std::uniform_real_distribution<double> entry_draw(-1.0, 1.0);
  Matrix m3(3, 3);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      m3(i, j) = entry_draw(rng);
    }
  }
  const Matrix v0 = m3.transpose() * m3 + 3.0 * Matrix::Identity(3, 3);
  const InfoContext ctx_triple = build_context(triple, qspace, correlation_from_covariance(v0));
  const SolveReport rep_triple = solve(ctx_triple);
  const double diff_c = (rep_triple.weights - rep_single.weights).cwiseAbs().maxCoeff();
  if (diff_c > 1e-6) {
    c.fail("identical bases: V0 changed the design by " + fmt(diff_c));
    return c;
  }

  // (d) working-matrix invariance (V0 vs R0) and rho vs -rho
  const InfoContext ctx_raw = build_context(pb1.model, pb1.space, pb1.cov, false);
  const SolveReport rep_raw = solve(ctx_raw, cfg1.solver);
  const double diff_d1 = (rep_raw.weights - base.weights).cwiseAbs().maxCoeff();
  if (diff_d1 > 1e-8) {
    c.fail("V0 vs R0 weights differ by " + fmt(diff_d1));
    return c;
  }

  const ProblemConfig cfg3 = load_config(testutil::config_path("example3.cfg"));
  const Problem pb3 = assemble(cfg3);
  const SolveReport rep_plus = solve(testutil::context_of(pb3), cfg3.solver);
  CovarianceSpec flipped = pb3.cov;
  flipped.R0(0, 1) = -flipped.R0(0, 1);
  flipped.R0(1, 0) = -flipped.R0(1, 0);
  flipped.V0 = flipped.R0;
  const SolveReport rep_minus = solve(build_context(pb3.model, pb3.space, flipped), cfg3.solver);
  const double diff_d2 = (rep_minus.weights - rep_plus.weights).cwiseAbs().maxCoeff();
  if (diff_d2 > 1e-8) {
    c.fail("rho vs -rho weights differ by " + fmt(diff_d2));
    return c;
  }

  c.note("scale " + fmt(worst_a) + ", reduction " + fmt(diff_b) + ", identical bases " +
         fmt(diff_c) + ", V0/R0 " + fmt(diff_d1) + ", sign flip " + fmt(diff_d2));
  return c;
}

// --- criterion 8: brute-force oracle at micro scale --------------------------

// f = (1,x) on {-1,0,1}: I = [[1, s1],[s1, s2]] with s1 = w2 - w0, s2 = w0 + w2;
// diag(I^-1) = (s2, 1)/det, det = s2 - s1^2, so log Phi_R = log s2 - 2 log det.
double micro_phi(double w0, double w2) {
  const double s1 = w2 - w0;
  const double s2 = w0 + w2;
  const double det = s2 - s1 * s1;
  if (!(det > 0.0) || !(s2 > 0.0)) {
    return std::numeric_limits<double>::infinity();
  }
  return std::log(s2) - 2.0 * std::log(det);
}

std::array<Matrix, 5> toy_atoms() {
  const double rho = 0.5;
  Matrix winv(2, 2);
  winv << 1.0, -rho, -rho, 1.0;
  winv /= 1.0 - rho * rho;
  std::array<Matrix, 5> atoms;
  const double xs[5] = {-1.0, -0.5, 0.0, 0.5, 1.0};
  for (int j = 0; j < 5; ++j) {
    Matrix u = Matrix::Zero(2, 5);
    u(0, 0) = 1.0;
    u(0, 1) = xs[j];
    u(1, 2) = 1.0;
    u(1, 3) = xs[j];
    u(1, 4) = xs[j] * xs[j];
    atoms[static_cast<size_t>(j)] = u.transpose() * winv * u;
  }
  return atoms;
}

double toy_phi(const std::array<Matrix, 5>& atoms, const double w[5]) {
  Matrix info = Matrix::Zero(5, 5);
  for (int j = 0; j < 5; ++j) {
    info += w[j] * atoms[static_cast<size_t>(j)];
  }
  const Eigen::FullPivLU<Matrix> lu(info);
  if (!lu.isInvertible()) {
    return std::numeric_limits<double>::infinity();
  }
  const Matrix inv = lu.inverse();
  double phi = 0.0;
  for (int r = 0; r < 5; ++r) {
    if (!(inv(r, r) > 0.0)) {
      return std::numeric_limits<double>::infinity();
    }
    phi += std::log(inv(r, r));
  }
  return phi;
}

Criterion criterion8() {
  Criterion c;

  // micro: exhaustive 1e-3 sweep of the 2-simplex, then 1e-5 refinement
  double best_phi = std::numeric_limits<double>::infinity();
  double best_w0 = 0.0, best_w1 = 0.0;
  for (int i = 0; i <= 1000; ++i) {
    for (int j = 0; j <= 1000 - i; ++j) {
      const double w0 = i / 1000.0;
      const double w2 = (1000 - i - j) / 1000.0;
      const double phi = micro_phi(w0, w2);
      if (phi < best_phi) {
        best_phi = phi;
        best_w0 = w0;
        best_w1 = j / 1000.0;
      }
    }
  }
  double ref_phi = best_phi, ref_w0 = best_w0, ref_w1 = best_w1;
  for (int a = -200; a <= 200; ++a) {
    for (int b = -200; b <= 200; ++b) {
      const double w0 = best_w0 + a * 1e-5;
      const double w1 = best_w1 + b * 1e-5;
      const double w2 = 1.0 - w0 - w1;
      if (w0 < 0.0 || w1 < 0.0 || w2 < 0.0) {
        continue;
      }
      const double phi = micro_phi(w0, w2);
      if (phi < ref_phi) {
        ref_phi = phi;
        ref_w0 = w0;
        ref_w1 = w1;
      }
    }
  }
  const SolveReport micro_rep = solve(testutil::context_of(testutil::micro_problem()));
  const double micro_diff =
      std::max({std::abs(micro_rep.weights[0] - ref_w0), std::abs(micro_rep.weights[1] - ref_w1),
                std::abs(micro_rep.weights[2] - (1.0 - ref_w0 - ref_w1))});
  if (!(micro_rep.max_d <= 1e-8) || micro_diff > 2e-3) {
    c.fail("micro solver vs brute force differ by " + fmt(micro_diff));
    return c;
  }

  // toy: exhaustive 0.05 sweep of the 4-simplex, then halving local refinement
  const std::array<Matrix, 5> atoms = toy_atoms();
  double tbest_phi = std::numeric_limits<double>::infinity();
  double tbest[5] = {0, 0, 0, 0, 0};
  for (int a = 0; a <= 20; ++a) {
    for (int b = 0; b <= 20 - a; ++b) {
      for (int d = 0; d <= 20 - a - b; ++d) {
        for (int e = 0; e <= 20 - a - b - d; ++e) {
          const double w[5] = {a / 20.0, b / 20.0, d / 20.0, e / 20.0,
                               (20 - a - b - d - e) / 20.0};
          const double phi = toy_phi(atoms, w);
          if (phi < tbest_phi) {
            tbest_phi = phi;
            std::copy(w, w + 5, tbest);
          }
        }
      }
    }
  }
  // the objective is convex (criterion 9), so re-centered halving converges
  for (double step = 0.025; step > 5e-6; step *= 0.5) {
    double level_best[5];
    std::copy(tbest, tbest + 5, level_best);
    double level_phi = tbest_phi;
    for (int d0 = -2; d0 <= 2; ++d0) {
      for (int d1 = -2; d1 <= 2; ++d1) {
        for (int d2 = -2; d2 <= 2; ++d2) {
          for (int d3 = -2; d3 <= 2; ++d3) {
            double w[5];
            w[0] = tbest[0] + d0 * step;
            w[1] = tbest[1] + d1 * step;
            w[2] = tbest[2] + d2 * step;
            w[3] = tbest[3] + d3 * step;
            w[4] = 1.0 - w[0] - w[1] - w[2] - w[3];
            if (w[0] < 0 || w[1] < 0 || w[2] < 0 || w[3] < 0 || w[4] < 0) {
              continue;
            }
            const double phi = toy_phi(atoms, w);
            if (phi < level_phi) {
              level_phi = phi;
              std::copy(w, w + 5, level_best);
            }
          }
        }
      }
    }
    std::copy(level_best, level_best + 5, tbest);
    tbest_phi = level_phi;
  }
  const SolveReport toy_rep = solve(testutil::context_of(testutil::toy_problem()));
  double toy_diff = 0.0;
  for (int j = 0; j < 5; ++j) {
    toy_diff = std::max(toy_diff, std::abs(toy_rep.weights[j] - tbest[j]));
  }
  if (!(toy_rep.max_d <= 1e-8) || toy_diff > 2e-3) {
    c.fail("toy solver vs brute force differ by " + fmt(toy_diff));
    return c;
  }

  c.note("brute-force agreement: micro " + fmt(micro_diff) + ", toy " + fmt(toy_diff));
  return c;
}

// --- criterion 9: convexity of the loss --------------------------------------

Criterion criterion9() {
  Criterion c;
  const InfoContext ctx = testutil::context_of(testutil::toy_problem());
  std::mt19937 rng(20240831);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  double worst = -std::numeric_limits<double>::infinity();
  for (int rep = 0; rep < 100; ++rep) {
    const Vector a = testutil::interior_weights(ctx.num_points(), rng);
    const Vector b = testutil::interior_weights(ctx.num_points(), rng);
    const double lam = u01(rng);
    const double lhs = log_loss(info_matrix(ctx, lam * a + (1.0 - lam) * b));
    const double rhs =
        lam * log_loss(info_matrix(ctx, a)) + (1.0 - lam) * log_loss(info_matrix(ctx, b));
    worst = std::max(worst, lhs - rhs);
    if (lhs > rhs + 1e-9) {
      c.fail("convexity violated by " + fmt(lhs - rhs));
      return c;
    }
  }
  c.note("100 segment samples, max phi(mix) - mix(phi) = " + fmt(worst));
  return c;
}

// --- criterion 10: byte-identical reports -------------------------------------

std::string file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error("cannot open '" + path.string() + "'");
  }
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

Criterion criterion10() {
  Criterion c;
  for (const char* name : kConfigs) {
    const std::string stem = std::filesystem::path(name).stem().string();
    const auto dir_a = testutil::scratch_dir("acc10_" + stem + "_a");
    const auto dir_b = testutil::scratch_dir("acc10_" + stem + "_b");

    std::ostringstream sink;
    std::streambuf* saved = std::cout.rdbuf(sink.rdbuf());
    const int code_a =
        run_cli({"solve", testutil::config_path(name), "--out", dir_a.string()});
    const int code_b =
        run_cli({"solve", testutil::config_path(name), "--out", dir_b.string()});
    std::cout.rdbuf(saved);

    if (code_a != 0 || code_b != 0) {
      c.fail(std::string(name) + ": solve exited " + std::to_string(code_a) + "/" +
             std::to_string(code_b));
      return c;
    }
    for (const std::string suffix : {".report.json", ".support.csv"}) {
      if (file_bytes(dir_a / (stem + suffix)) != file_bytes(dir_b / (stem + suffix))) {
        c.fail(std::string(name) + ": repeated runs differ in " + suffix);
        return c;
      }
    }
  }
  c.note("7 configs, repeated runs byte-identical");
  return c;
}

Criterion run_criterion(int n) {
  try {
    switch (n) {
      case 1: return criterion1();
      case 2: return criterion2();
      case 3: return criterion3();
      case 4: return criterion4();
      case 5: return criterion5();
      case 6: return criterion6();
      case 7: return criterion7();
      case 8: return criterion8();
      case 9: return criterion9();
      case 10: return criterion10();
      default: break;
    }
  } catch (const std::exception& e) {
    Criterion c;
    c.fail(std::string("exception: ") + e.what());
    return c;
  }
  Criterion c;
  c.fail("unknown criterion");
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> which;
  for (int i = 1; i < argc; ++i) {
    const int n = std::atoi(argv[i]);
    if (n < 1 || n > 10) {
      std::cerr << "usage: acceptance [criterion...]  (criteria are 1..10)\n";
      return 64;
    }
    which.push_back(n);
  }
  if (which.empty()) {
    for (int n = 1; n <= 10; ++n) {
      which.push_back(n);
    }
  }

  int failures = 0;
  for (int n : which) {
    const Criterion c = run_criterion(n);
    std::cout << "criterion " << n << ": " << (c.ok ? "PASS" : "FAIL") << " - " << c.detail
              << std::endl;
    if (!c.ok) {
      ++failures;
    }
  }
  return failures;
}
