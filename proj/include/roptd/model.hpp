#pragma once

#include "roptd/types.hpp"

namespace roptd {

/// Full Cartesian product of the per-factor grids, enumerated row-major with
/// the last factor varying fastest.
DesignSpace build_grid(const std::vector<FactorSpec>& factors);

/// Evaluates one response basis at a point; returns a vector of length dim().
Vector eval_basis(const ResponseBasis& basis, const Eigen::Ref<const Vector>& x);

/// The m x q block-diagonal matrix Z(x): row i carries f_i(x)^T in its block.
Matrix z_matrix(const ModelSpec& model, const Eigen::Ref<const Vector>& x);

/// Splits an SPD covariance into sigma and the correlation matrix R0 with
/// R0_{ik} = V0_{ik} / (sigma_i sigma_k).
CovarianceSpec correlation_from_covariance(const Matrix& V0);

/// Wraps a user-supplied correlation matrix (unit diagonal, SPD) as a
/// CovarianceSpec with V0 = R0 and unit sigma.
CovarianceSpec covariance_from_correlation(const Matrix& R0);

}  // namespace roptd
