#pragma once

#include "roptd/solver.hpp"

namespace roptd {

struct MultOptions {
  long max_iters = 200000;
  double delta = 1e-8;
  double damping = 1.0;  // exponent in (0, 1]
  long trace_every = 1000;
  double support_threshold = 1e-5;

  void validate() const;
};

/// Baseline solver: w_j <- w_j * ((d(w,j) + q)/q)^damping, renormalized each
/// step. Monotonicity of the loss is monitored, not assumed.
SolveReport solve_multiplicative(const InfoContext& ctx, const MultOptions& opts = {});

}  // namespace roptd
