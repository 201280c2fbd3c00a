#include "roptd/multiplicative.hpp"

#include "roptd/errors.hpp"

#include <cmath>

namespace roptd {

void MultOptions::validate() const {
  if (max_iters < 1) throw ConfigError("multiplicative.max_iters must be at least 1");
  if (!(delta > 0.0)) throw ConfigError("multiplicative.delta must be positive");
  if (!(damping > 0.0 && damping <= 1.0)) {
    throw ConfigError("multiplicative.damping must lie in (0, 1]");
  }
  if (trace_every < 1) throw ConfigError("multiplicative.trace_every must be at least 1");
  if (!(support_threshold > 0.0)) {
    throw ConfigError("multiplicative.support_threshold must be positive");
  }
}

SolveReport solve_multiplicative(const InfoContext& ctx, const MultOptions& opts) {
  opts.validate();
  const int n = ctx.num_points();
  const double q = static_cast<double>(ctx.q());

  SolveReport report;
  report.algorithm = "multiplicative";
  Vector w = Vector::Constant(n, 1.0 / n);

  double phi_prev = log_loss(info_matrix(ctx, w));
  int since_trace = 0;
  for (long iter = 1; iter <= opts.max_iters; ++iter) {
    const InfoState state = info_matrix(ctx, w);
    if (state.singular) {
      throw SingularInformation();
    }
    Vector c = ctx.frobenius_against(sensitivity_kernel(state));
    const double phi = log_loss(state);
    const double max_d = c.maxCoeff() - q;
    ++since_trace;

    if (phi > phi_prev + 1e-12 * std::max(1.0, std::abs(phi_prev))) {
      ++report.phi_increase_count;
    }
    phi_prev = phi;

    report.weights = w;
    report.loss = phi;
    report.max_d = max_d;
    if (max_d <= opts.delta) {
      report.converged = true;
      report.outer_trace.push_back(
          {static_cast<double>(iter), since_trace, phi, phi, max_d, 0});
      break;
    }
    if (iter % opts.trace_every == 0 || iter == opts.max_iters) {
      report.outer_trace.push_back(
          {static_cast<double>(iter), since_trace, phi, phi, max_d, 0});
      since_trace = 0;
    }

    // w_j <- w_j ((d_j + q)/q)^damping = w_j (c_j/q)^damping, then renormalize.
    for (int j = 0; j < n; ++j) {
      const double ratio = c[j] / q;
      w[j] *= opts.damping == 1.0 ? ratio : std::pow(ratio, opts.damping);
    }
    const double total = w.sum();
    if (!(total > 0.0)) {
      throw Error("multiplicative update drove all weights to zero");
    }
    w /= total;
  }
  return report;
}

}  // namespace roptd
