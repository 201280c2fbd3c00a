#pragma once

#include "roptd/equivalence.hpp"
#include "roptd/information.hpp"

#include <string>
#include <vector>

namespace roptd {

struct SolverOptions {
  double t1 = 2.0;                   // first barrier parameter
  double lambda = 2.0;               // barrier growth factor, > 1
  double delta = 1e-8;               // equivalence-theorem stopping tolerance
  double bfgs_grad_tol = 1e-10;      // inner sup-norm gradient tolerance
  int bfgs_max_iters = 5000;
  int max_outer_iters = 60;
  double step_shrink = 0.5;          // backtracking factor
  double armijo_c = 1e-4;            // sufficient-decrease constant
  double feasibility_margin = 0.99;  // fraction of the step to the boundary
  double support_threshold = 1e-5;

  void validate() const;
};

struct StageTrace {
  double t = 0.0;         // barrier parameter (iteration index for the multiplicative solver)
  int inner_iters = 0;
  double phi1 = 0.0;      // barrier-augmented objective at the stage solution
  double phi = 0.0;       // loss without the barrier term
  double max_d = 0.0;
  int line_search_failures = 0;
};

struct SolveReport {
  Vector weights;
  double loss = 0.0;
  double max_d = 0.0;
  std::vector<StageTrace> outer_trace;
  std::vector<SupportEntry> support;  // filled against a design space by the caller
  bool converged = false;
  std::string algorithm = "interior";
  int phi_increase_count = 0;  // monotonicity violations (multiplicative solver monitoring)
};

struct BfgsResult {
  Vector w;  // reduced coordinates, length N-1
  int iters = 0;
  bool line_search_failed = false;
  double grad_norm = 0.0;
};

/// Largest multiple of the direction that keeps every implied weight positive,
/// scaled by the feasibility margin. Returns the 1e6 sentinel when no
/// coordinate binds and 0 for a zero direction.
double feasible_step_cap(const Vector& w_reduced, const Vector& direction,
                         double margin = 0.99);

/// Inner solver: BFGS on phi1(., t) over the reduced coordinates with a
/// feasibility-preserving Armijo backtracking line search.
BfgsResult bfgs_minimize(const InfoContext& ctx, const Vector& w_start, double t,
                         const SolverOptions& opts);

/// Outer barrier loop: t_k = t1 * lambda^(k-1), warm-started inner solves,
/// stops when max_j d(w,j) <= delta.
SolveReport solve(const InfoContext& ctx, const SolverOptions& opts = {});

}  // namespace roptd
