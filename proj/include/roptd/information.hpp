#pragma once

#include "roptd/types.hpp"

#include <vector>

namespace roptd {

enum class ContextStorage {
  Dense,    // keep every B_j = U_j^T W^{-1} U_j as a q x q matrix
  Compact,  // keep the m x q factor C_j = L^{-1} U_j with B_j = C_j^T C_j
};

/// Weight-independent kernel of the design problem: per-point information
/// atoms B_j for the working error matrix W (R0 by default, V0 on request).
class InfoContext {
 public:
  InfoContext() = default;

  int q() const { return q_; }
  int num_points() const { return n_; }
  int num_responses() const { return m_; }
  ContextStorage storage() const { return storage_; }
  bool used_correlation() const { return used_correlation_; }

  /// Materializes B_j (copies in compact mode).
  Matrix b_at(int j) const;

  /// Accumulates I += w_j * B_j for every j (fixed index order).
  void accumulate_information(const Vector& w, Matrix& info) const;

  /// c_j = <B_j, K>_F for every j; d(w,j) = c_j - q and the loss gradient
  /// uses c_N - c_j. Honors ROPTD_THREADS; results are identical to serial.
  Vector frobenius_against(const Matrix& kernel) const;

  friend InfoContext build_context(const ModelSpec&, const DesignSpace&, const CovarianceSpec&,
                                   bool, ContextStorage);
  friend InfoContext reduce_context(const InfoContext&, const std::vector<std::vector<int>>&);

 private:
  int q_ = 0;
  int n_ = 0;
  int m_ = 0;
  ContextStorage storage_ = ContextStorage::Dense;
  bool used_correlation_ = true;
  std::vector<Matrix> atoms_;  // B_j (dense) or C_j (compact)
};

InfoContext build_context(const ModelSpec& model, const DesignSpace& space,
                          const CovarianceSpec& cov, bool use_correlation = true,
                          ContextStorage storage = ContextStorage::Dense);

/// Orbit-averaged context: atom k is (1/|orbit_k|) * sum of B_j over the orbit.
InfoContext reduce_context(const InfoContext& full, const std::vector<std::vector<int>>& orbits);

/// I(w), A(w) = I^{-1} and the diagonal of A at one weight vector. When the
/// Cholesky factorization fails (or the condition estimate exceeds 1e14) the
/// state is flagged singular and the loss is infinite.
struct InfoState {
  Matrix info;    // I(w)
  Matrix inv;     // A(w)
  Vector diag_a;  // e_r^T A e_r
  bool singular = false;
};

InfoState info_matrix(const InfoContext& ctx, const Vector& w);

/// phi(w) = sum_r log(e_r^T A e_r); +infinity on singular states.
double log_loss(const InfoState& state);

/// h(w,t) = -(1/t) sum_j log w_j; +infinity if any w_j <= 0.
double barrier(const Vector& w, double t);

/// K = A * diag(1/diag_a) * A, the kernel of the sensitivity inner product.
Matrix sensitivity_kernel(const InfoState& state);

/// Appends the implicit last weight 1 - sum(w_reduced).
Vector full_weights(const Vector& w_reduced);

/// phi1(w~, t) = phi + barrier over the full implied weight vector;
/// +infinity when infeasible or singular.
double phi1(const InfoContext& ctx, const Vector& w_reduced, double t);

/// Gradient of phi1 with respect to the first N-1 weights:
///   g_j = sum_r e_r^T A (B_N - B_j) A e_r / (e_r^T A e_r)
///         + (1/t) * (1/w_N - 1/w_j).
/// Throws SingularInformation / std::domain_error on bad states.
Vector grad_phi1(const InfoContext& ctx, const Vector& w_reduced, double t);

/// Thread cap for the per-point sensitivity pass (ROPTD_THREADS, default 1).
int sensitivity_threads();

}  // namespace roptd
