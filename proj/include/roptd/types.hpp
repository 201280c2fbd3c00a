#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace roptd {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class FactorKind { Continuous, Categorical };

/// One design variable: either a discretized interval or a finite level set.
struct FactorSpec {
  FactorKind kind = FactorKind::Continuous;
  std::string name;
  double lower = 0.0;          // continuous only
  double upper = 0.0;          // continuous only
  int levels = 0;              // continuous only, >= 2
  std::vector<double> values;  // categorical only, distinct

  static FactorSpec continuous(std::string name, double lower, double upper, int levels);
  static FactorSpec categorical(std::string name, std::vector<double> values);

  /// The per-factor grid values, in enumeration order. For a symmetric
  /// continuous range [-a, a] the grid is exactly mirror-symmetric about 0.
  std::vector<double> level_values() const;
  int level_count() const;
};

/// Discrete design space: N candidate points in R^p built from per-factor grids.
struct DesignSpace {
  Matrix points;                    // N x p, one row per candidate point
  std::vector<FactorSpec> factors;  // size p

  int num_points() const { return static_cast<int>(points.rows()); }
  int num_factors() const { return static_cast<int>(points.cols()); }
  Vector point(int j) const { return points.row(j).transpose(); }
};

enum class BasisKind { Monomial, Emax };

/// Gradient basis f_i(x) of one response: monomial terms, or a builtin
/// nonlinear family evaluated at local parameter values.
struct ResponseBasis {
  BasisKind kind = BasisKind::Monomial;
  std::vector<std::vector<int>> terms;  // monomial exponent vectors, each of length p
  double emax_scale = 1.0;              // emax beta_1 (vertical scale)
  double emax_ec50 = 1.0;               // emax beta_2 > 0

  static ResponseBasis monomial(std::vector<std::vector<int>> terms);
  static ResponseBasis emax(double beta1, double beta2);

  int dim() const;
  /// Number of design variables this basis expects (-1 for any, used by emax
  /// which is defined for p == 1).
  void check_factors(int p) const;
};

/// m response bases; total parameter count q = sum of per-response dims.
struct ModelSpec {
  std::vector<ResponseBasis> responses;

  int num_responses() const { return static_cast<int>(responses.size()); }
  int q() const;
  /// Validates the pairing with a p-factor design space.
  void validate(int p) const;
};

/// Error covariance V0 with its derived correlation decomposition
/// V0 = Sigma0 * R0 * Sigma0, Sigma0 = diag(sigma).
struct CovarianceSpec {
  Matrix V0;
  Matrix R0;
  Vector sigma;

  int dim() const { return static_cast<int>(V0.rows()); }
};

/// Probability measure on the points of a design space.
struct DesignMeasure {
  Vector weights;

  /// Validates w >= 0 and sum(w) == 1 to within 1e-12 against a space.
  static DesignMeasure on(const DesignSpace& space, Vector weights);
};

}  // namespace roptd
