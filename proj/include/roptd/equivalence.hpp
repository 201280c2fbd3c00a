#pragma once

#include "roptd/information.hpp"
#include "roptd/types.hpp"

#include <string>
#include <vector>

namespace roptd {

struct SupportEntry {
  int index = -1;
  Vector point;
  double weight = 0.0;
};

/// Outcome of the optimality check d(w,j) <= delta over all candidate points.
struct EquivalenceReport {
  Vector d_values;
  double max_d = 0.0;
  int argmax_j = -1;
  std::vector<int> support_indices;
  double delta_used = 0.0;
  bool converged = false;
};

/// Directional sensitivity of the loss at one candidate point:
///   d(w,j) = sum_r (e_r^T A B_j A e_r) / (e_r^T A e_r) - q.
/// Nonpositive everywhere exactly at an optimal design.
double directional_d(const InfoContext& ctx, const Vector& w, int j);

/// d(w,j) for every j at a shared state (one factorization).
Vector d_vector(const InfoContext& ctx, const Vector& w);

EquivalenceReport verify_optimality(const InfoContext& ctx, const Vector& w, double delta,
                                    double support_threshold = 1e-5);

/// Points with weight above the threshold, sorted lexicographically by
/// coordinates.
std::vector<SupportEntry> support_points(const DesignSpace& space, const Vector& w,
                                         double threshold = 1e-5);

/// CSV with one row per grid point (enumeration order): coordinates, weight,
/// d value; 17 significant digits.
void export_d_surface(const DesignSpace& space, const InfoContext& ctx, const Vector& w,
                      const std::string& path);

}  // namespace roptd
