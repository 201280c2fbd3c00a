#pragma once

#include "roptd/information.hpp"
#include "roptd/types.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace roptd {

/// A diagonal scale map or a single-axis reflection of the design space.
struct Transform {
  enum class Kind { Scale, Reflection };
  Kind kind = Kind::Scale;
  Vector scale_factors;  // p positive entries (scale)
  int axis = -1;         // 0-based factor index (reflection)

  static Transform scale(Vector factors);
  static Transform reflection(int axis);

  Vector apply(const Eigen::Ref<const Vector>& x) const;
};

/// Finds the diagonal Q with Z(Tx) = Z(x) Q, verified at every grid point to
/// 1e-10. For reflections the entries are snapped to +/-1. Throws
/// SymmetryError (with a witness point) when the identity fails.
Vector detect_q(const ModelSpec& model, const DesignSpace& space, const Transform& transform);

/// Partition of point indices into orbits under a product of axis reflections.
struct OrbitReduction {
  std::vector<std::vector<int>> orbits;  // each sorted ascending; ordered by first member
  std::vector<int> representative;       // lexicographically smallest point of each orbit
  std::vector<int> orbit_of;             // point index -> orbit id
  std::vector<int> multiplicity;         // orbit sizes
  DesignSpace reduced_space;             // representative points, orbit order

  int orbit_count() const { return static_cast<int>(orbits.size()); }
};

/// Requires detect_q to succeed on every axis and the per-axis grids to be
/// symmetric about 0.
OrbitReduction reduce_by_reflections(const DesignSpace& space, const std::vector<int>& axes,
                                     const ModelSpec& model);

/// w_j = omega_k / |orbit_k| for j in orbit k; symmetric by construction.
Vector expand_reduced_weights(const OrbitReduction& reduction, const Vector& omega);

/// Collapses a symmetric measure to orbit weights (sums within each orbit).
Vector collapse_weights(const OrbitReduction& reduction, const Vector& w);

/// Searches the 2^(m-1) sign vectors (first entry +1) for Q1 with
/// R0 = Q1 R1 Q1; returns the signs or nullopt.
std::optional<Vector> correlation_sign_equivalent(const Matrix& R0, const Matrix& R1,
                                                  double tol = 1e-12);

/// Index permutation of the design space under an arbitrary point map;
/// throws SymmetryError when some image is not a grid point.
std::vector<int> point_permutation(const DesignSpace& space,
                                   const std::function<Vector(const Vector&)>& map);

struct PhiSymmetryCheck {
  bool holds = false;
  double max_abs_diff = 0.0;
};

/// Verifies phi(w) == phi(permuted w) on random interior weight vectors; the
/// check behind line/plane symmetry claims.
PhiSymmetryCheck verify_phi_symmetry(const InfoContext& ctx, const std::vector<int>& permutation,
                                     int samples = 20, double tol = 1e-9, unsigned seed = 20240831);

}  // namespace roptd
