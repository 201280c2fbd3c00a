#include "roptd/solver.hpp"

#include "roptd/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace roptd {

namespace {

constexpr double kStepCapSentinel = 1e6;
constexpr double kCurvatureFloor = 1e-8;  // skip BFGS update when s^T y <= floor * |s||y|
constexpr double kMinStep = 1e-18;
constexpr double kGradContract = 0.999;  // gradient shrink accepted by the line search
constexpr double kStallContract = 0.97;  // gradient shrink that still counts as progress
constexpr int kStallLimit = 60;
constexpr double kFreezeGap = 1e-3;  // -d_j margin beyond which a tiny weight is frozen

// Objective, gradient and equivalence gap from one factorization of I(w).
struct InnerEval {
  double f = 0.0;
  Vector g;
  Vector c;  // c_j = <B_j, K(w)>, so d_j = c_j - q
  double max_d = 0.0;
};

InnerEval inner_eval(const InfoContext& ctx, const Vector& w_reduced, double t) {
  const Vector w = full_weights(w_reduced);
  if ((w.array() <= 0.0).any()) {
    throw std::domain_error("inner iterate left the open simplex");
  }
  const InfoState state = info_matrix(ctx, w);
  if (state.singular) {
    throw SingularInformation();
  }
  const int n = ctx.num_points();

  InnerEval eval;
  eval.c = ctx.frobenius_against(sensitivity_kernel(state));
  eval.f = log_loss(state) + barrier(w, t);
  eval.max_d = eval.c.maxCoeff() - static_cast<double>(ctx.q());
  eval.g.resize(n - 1);
  const double c_last = eval.c[n - 1];
  const double w_last = w[n - 1];
  for (int j = 0; j < n - 1; ++j) {
    eval.g[j] = (c_last - eval.c[j]) + (1.0 / w_last - 1.0 / w[j]) / t;
  }
  return eval;
}

struct InnerResult {
  Vector w;
  int iters = 0;
  bool line_search_failed = false;
  double grad_norm = 0.0;
  double max_d = 0.0;        // equivalence gap at the returned iterate
  bool reached_delta = false;
};

// Inverse-Hessian seed. The barrier part of the Hessian is the known diagonal
// (1/t)(1/w_j^2 + 1/w_N^2) and spans many orders of magnitude across
// coordinates; seeding with its inverse (plus a unit term standing in for the
// O(1) curvature of the loss) keeps one blown-up coordinate from strangling
// the shared line-search step.
Matrix initial_h(const Vector& w_reduced, double t) {
  const double w_last = 1.0 - w_reduced.sum();
  Matrix h = Matrix::Zero(w_reduced.size(), w_reduced.size());
  for (Eigen::Index j = 0; j < w_reduced.size(); ++j) {
    const double barrier_curv =
        (1.0 / (w_reduced[j] * w_reduced[j]) + 1.0 / (w_last * w_last)) / t;
    h(j, j) = 1.0 / (1.0 + barrier_curv);
  }
  return h;
}

// BFGS on phi1(., t). Besides the usual gradient and stall stops, the loop
// exits as soon as the iterate certifies max_j d(w,j) <= delta: near the
// barrier path the gap obeys max_d <= N/t, while the sup-norm gradient is
// dominated by barrier terms of vanishing weights that the gap is blind to,
// so at large t the certificate is reachable long before a tiny gradient is.
InnerResult bfgs_stage(const InfoContext& ctx, const Vector& w_start, double t,
                       const SolverOptions& opts, int* line_search_failures) {
  const Eigen::Index n = w_start.size();
  InnerResult result;
  result.w = w_start;
  if (n == 0) {
    result.max_d = 0.0;
    result.reached_delta = true;
    return result;
  }

  InnerEval cur = inner_eval(ctx, result.w, t);

  // A barrier-dominated coordinate (weight under the support threshold, d_j
  // decisively negative) has its stage optimum at w_j = 1/(t (q + N/t - c_j))
  // up to its own O(w_j) contribution to I(w), and c barely moves within a
  // stage once such weights are tiny. Each stage therefore re-centers those
  // coordinates onto that value and freezes them, leaving the quasi-Newton
  // iteration a small well-conditioned block instead of hundreds of stiff
  // directions (curvature 1/(t w_j^2)) that would dominate the shared line
  // search. Frozen coordinates are realized by zeroing their gradient
  // entries: with a diagonal initial H this keeps every search direction and
  // curvature pair exactly zero there. The equivalence gap max_d that
  // certifies the final design is still computed over the full grid.
  std::vector<bool> frozen(static_cast<size_t>(n), false);
  {
    const double q = static_cast<double>(ctx.q());
    const double path_gap = static_cast<double>(ctx.num_points()) / t;
    bool changed = false;
    for (Eigen::Index j = 0; j < n; ++j) {
      const double d_j = cur.c[j] - q;
      if (result.w[j] < opts.support_threshold && d_j < -kFreezeGap) {
        result.w[j] = std::min(1.0 / (t * (path_gap - d_j)), opts.support_threshold);
        frozen[static_cast<size_t>(j)] = true;
        changed = true;
      }
    }
    if (changed) {
      cur = inner_eval(ctx, result.w, t);
    }
  }
  const auto mask_frozen = [&frozen, n](Vector& g) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (frozen[static_cast<size_t>(j)]) g[j] = 0.0;
    }
  };
  mask_frozen(cur.g);

  Matrix h = initial_h(result.w, t);
  int stalled = 0;
  double best_grad = cur.g.cwiseAbs().maxCoeff();

  for (int iter = 0; iter < opts.bfgs_max_iters; ++iter) {
    result.grad_norm = cur.g.cwiseAbs().maxCoeff();
    result.max_d = cur.max_d;
    if (cur.max_d <= opts.delta || result.grad_norm <= opts.bfgs_grad_tol) {
      result.reached_delta = cur.max_d <= opts.delta;
      return result;
    }

    Vector dir = -(h * cur.g);
    bool reset = false;
    if (dir.dot(cur.g) >= 0.0) {
      h = initial_h(result.w, t);
      dir = -(h * cur.g);
      reset = true;
    }

    // Backtracking line search. Close to a stage optimum the true decrease of
    // f falls below its floating-point resolution (it shrinks like the squared
    // distance to the optimum) while the gradient is still accurate in
    // absolute terms, so besides Armijo a step is accepted when it contracts
    // the gradient norm and the f-difference is within noise.
    const double f_noise =
        8.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(cur.f));
    bool accepted = false;
    Vector w_next;
    InnerEval next;
    for (int attempt = 0; attempt < 2 && !accepted; ++attempt) {
      const double slope = dir.dot(cur.g);
      double alpha = std::min(1.0, feasible_step_cap(result.w, dir, opts.feasibility_margin));
      while (alpha > kMinStep) {
        w_next = result.w + alpha * dir;
        bool usable = true;
        try {
          next = inner_eval(ctx, w_next, t);
        } catch (const std::domain_error&) {
          usable = false;
        } catch (const SingularInformation&) {
          usable = false;
        }
        if (usable) {
          mask_frozen(next.g);
          const bool armijo = next.f <= cur.f + opts.armijo_c * alpha * slope;
          const bool contracts = next.f <= cur.f + f_noise &&
                                 next.g.cwiseAbs().maxCoeff() <= kGradContract * result.grad_norm;
          if (next.max_d <= opts.delta || armijo || contracts) {
            accepted = true;
            break;
          }
        }
        alpha *= opts.step_shrink;
      }
      if (!accepted && attempt == 0 && !reset) {
        h = initial_h(result.w, t);
        dir = -(h * cur.g);
        reset = true;
      }
    }
    if (!accepted) {
      result.line_search_failed = true;
      if (line_search_failures != nullptr) {
        ++*line_search_failures;
      }
      break;
    }

    const Vector s = w_next - result.w;
    const Vector y = next.g - cur.g;
    const double sy = s.dot(y);
    if (sy > kCurvatureFloor * s.norm() * y.norm()) {
      const double rho = 1.0 / sy;
      const Vector hy = h * y;
      const double yhy = y.dot(hy);
      h.noalias() -= rho * (s * hy.transpose() + hy * s.transpose());
      h.noalias() += (rho * rho * yhy + rho) * (s * s.transpose());
    }

    // Progress means either a measurable decrease of f or a new low of the
    // gradient norm; anything else (noise-level f churn, gradient cycling)
    // counts toward the stall limit.
    const double next_grad = next.g.cwiseAbs().maxCoeff();
    if (next_grad <= kStallContract * best_grad) {
      best_grad = next_grad;
      stalled = 0;
    } else if (cur.f - next.f <= f_noise) {
      ++stalled;
    } else {
      stalled = 0;
    }

    result.w = std::move(w_next);
    cur = std::move(next);
    ++result.iters;

    if (stalled >= kStallLimit) {
      break;
    }
  }
  result.grad_norm = cur.g.cwiseAbs().maxCoeff();
  result.max_d = cur.max_d;
  result.reached_delta = cur.max_d <= opts.delta;
  return result;
}

}  // namespace

void SolverOptions::validate() const {
  if (!(t1 > 0.0)) throw ConfigError("solver.t1 must be positive");
  if (!(lambda > 1.0)) throw ConfigError("solver.lambda must exceed 1");
  if (!(delta > 0.0)) throw ConfigError("solver.delta must be positive");
  if (!(bfgs_grad_tol > 0.0)) throw ConfigError("solver.bfgs_grad_tol must be positive");
  if (bfgs_max_iters < 1) throw ConfigError("solver.bfgs_max_iters must be at least 1");
  if (max_outer_iters < 1) throw ConfigError("solver.max_outer_iters must be at least 1");
  if (!(step_shrink > 0.0 && step_shrink < 1.0)) {
    throw ConfigError("solver.step_shrink must lie in (0, 1)");
  }
  if (!(armijo_c > 0.0 && armijo_c < 1.0)) throw ConfigError("solver.armijo_c must lie in (0, 1)");
  if (!(feasibility_margin > 0.0 && feasibility_margin < 1.0)) {
    throw ConfigError("solver.feasibility_margin must lie in (0, 1)");
  }
  if (!(support_threshold > 0.0)) throw ConfigError("solver.support_threshold must be positive");
}

double feasible_step_cap(const Vector& w_reduced, const Vector& direction, double margin) {
  if (direction.size() != w_reduced.size()) {
    throw Error("direction length does not match the reduced weight vector");
  }
  if ((direction.array() == 0.0).all()) {
    return 0.0;
  }
  double cap = std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < w_reduced.size(); ++j) {
    if (direction[j] < 0.0) {
      cap = std::min(cap, w_reduced[j] / -direction[j]);
    }
  }
  const double sum_dir = direction.sum();
  if (sum_dir > 0.0) {
    cap = std::min(cap, (1.0 - w_reduced.sum()) / sum_dir);
  }
  if (!std::isfinite(cap)) {
    return kStepCapSentinel;
  }
  return margin * cap;
}

BfgsResult bfgs_minimize(const InfoContext& ctx, const Vector& w_start, double t,
                         const SolverOptions& opts) {
  opts.validate();
  const InnerResult inner = bfgs_stage(ctx, w_start, t, opts, nullptr);
  BfgsResult result;
  result.w = inner.w;
  result.iters = inner.iters;
  result.line_search_failed = inner.line_search_failed;
  result.grad_norm = inner.grad_norm;
  return result;
}

SolveReport solve(const InfoContext& ctx, const SolverOptions& opts) {
  opts.validate();
  const int n = ctx.num_points();
  SolveReport report;
  report.algorithm = "interior";

  Vector w_reduced = Vector::Constant(std::max(0, n - 1), 1.0 / n);
  double t = opts.t1;
  for (int k = 0; k < opts.max_outer_iters; ++k) {
    int failures = 0;
    const InnerResult inner = bfgs_stage(ctx, w_reduced, t, opts, &failures);
    w_reduced = inner.w;

    const Vector w = full_weights(w_reduced);
    const InfoState state = info_matrix(ctx, w);
    const double loss = log_loss(state);
    const Vector d = d_vector(ctx, w);
    const double max_d = d.maxCoeff();

    report.outer_trace.push_back({t, inner.iters, loss + barrier(w, t), loss, max_d, failures});
    report.weights = w;
    report.loss = loss;
    report.max_d = max_d;
    if (max_d <= opts.delta) {
      report.converged = true;
      break;
    }
    t *= opts.lambda;
  }
  return report;
}

}  // namespace roptd
