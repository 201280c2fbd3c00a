#include "roptd/model.hpp"

#include "roptd/errors.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <set>
#include <utility>

namespace roptd {

FactorSpec FactorSpec::continuous(std::string name, double lower, double upper, int levels) {
  if (!(lower < upper)) {
    throw ConfigError("factor '" + name + "': lower bound must be strictly below upper bound");
  }
  if (levels < 2) {
    throw ConfigError("factor '" + name + "': a continuous factor needs at least 2 levels");
  }
  FactorSpec f;
  f.kind = FactorKind::Continuous;
  f.name = std::move(name);
  f.lower = lower;
  f.upper = upper;
  f.levels = levels;
  return f;
}

FactorSpec FactorSpec::categorical(std::string name, std::vector<double> values) {
  if (values.empty()) {
    throw ConfigError("factor '" + name + "': categorical factor needs at least one level");
  }
  std::set<double> distinct(values.begin(), values.end());
  if (distinct.size() != values.size()) {
    throw ConfigError("factor '" + name + "': categorical levels must be distinct");
  }
  FactorSpec f;
  f.kind = FactorKind::Categorical;
  f.name = std::move(name);
  f.values = std::move(values);
  return f;
}

std::vector<double> FactorSpec::level_values() const {
  if (kind == FactorKind::Categorical) {
    return values;
  }
  std::vector<double> v(static_cast<size_t>(levels));
  const double span = upper - lower;
  for (int i = 0; i < levels; ++i) {
    v[static_cast<size_t>(i)] = lower + static_cast<double>(i) * span / (levels - 1);
  }
  v.back() = upper;
  if (lower == -upper) {
    // Mirror the grid so reflections map levels onto levels bit-exactly.
    for (int i = 0; i < levels / 2; ++i) {
      v[static_cast<size_t>(levels - 1 - i)] = -v[static_cast<size_t>(i)];
    }
    if (levels % 2 == 1) {
      v[static_cast<size_t>(levels / 2)] = 0.0;
    }
  }
  return v;
}

int FactorSpec::level_count() const {
  return kind == FactorKind::Categorical ? static_cast<int>(values.size()) : levels;
}

DesignSpace build_grid(const std::vector<FactorSpec>& factors) {
  if (factors.empty()) {
    throw ConfigError("at least one factor is required");
  }
  const int p = static_cast<int>(factors.size());
  std::vector<std::vector<double>> levels;
  levels.reserve(factors.size());
  long n = 1;
  for (const auto& f : factors) {
    levels.push_back(f.level_values());
    n *= static_cast<long>(levels.back().size());
  }

  DesignSpace space;
  space.factors = factors;
  space.points.resize(n, p);
  // Row-major enumeration, last factor fastest.
  std::vector<int> idx(static_cast<size_t>(p), 0);
  for (long j = 0; j < n; ++j) {
    for (int l = 0; l < p; ++l) {
      space.points(j, l) = levels[static_cast<size_t>(l)][static_cast<size_t>(idx[static_cast<size_t>(l)])];
    }
    for (int l = p - 1; l >= 0; --l) {
      if (++idx[static_cast<size_t>(l)] < static_cast<int>(levels[static_cast<size_t>(l)].size())) {
        break;
      }
      idx[static_cast<size_t>(l)] = 0;
    }
  }
  return space;
}

ResponseBasis ResponseBasis::monomial(std::vector<std::vector<int>> terms) {
  if (terms.empty()) {
    throw ConfigError("a monomial basis needs at least one term");
  }
  std::set<std::vector<int>> distinct(terms.begin(), terms.end());
  if (distinct.size() != terms.size()) {
    throw ConfigError("monomial terms must be distinct exponent vectors");
  }
  for (const auto& t : terms) {
    for (int e : t) {
      if (e < 0) {
        throw ConfigError("monomial exponents must be nonnegative");
      }
    }
  }
  ResponseBasis b;
  b.kind = BasisKind::Monomial;
  b.terms = std::move(terms);
  return b;
}

ResponseBasis ResponseBasis::emax(double beta1, double beta2) {
  if (!(beta2 > 0.0)) {
    throw ConfigError("emax basis requires beta2 > 0");
  }
  ResponseBasis b;
  b.kind = BasisKind::Emax;
  b.emax_scale = beta1;
  b.emax_ec50 = beta2;
  return b;
}

int ResponseBasis::dim() const {
  return kind == BasisKind::Monomial ? static_cast<int>(terms.size()) : 2;
}

void ResponseBasis::check_factors(int p) const {
  if (kind == BasisKind::Monomial) {
    for (const auto& t : terms) {
      if (static_cast<int>(t.size()) != p) {
        throw ConfigError("monomial exponent vector has " + std::to_string(t.size()) +
                          " entries but the design space has " + std::to_string(p) + " factors");
      }
    }
  } else {
    if (p != 1) {
      throw ConfigError("the emax family is defined for a single design variable");
    }
  }
}

int ModelSpec::q() const {
  int total = 0;
  for (const auto& r : responses) {
    total += r.dim();
  }
  return total;
}

void ModelSpec::validate(int p) const {
  if (responses.empty()) {
    throw ConfigError("the model needs at least one response");
  }
  for (const auto& r : responses) {
    r.check_factors(p);
  }
  if (q() < 1) {
    throw ConfigError("the model has no parameters");
  }
}

Vector eval_basis(const ResponseBasis& basis, const Eigen::Ref<const Vector>& x) {
  if (basis.kind == BasisKind::Monomial) {
    Vector f(basis.dim());
    for (int t = 0; t < basis.dim(); ++t) {
      const auto& expo = basis.terms[static_cast<size_t>(t)];
      double v = 1.0;
      for (size_t l = 0; l < expo.size(); ++l) {
        const int e = expo[l];
        if (e == 0) {
          continue;
        }
        v *= std::pow(x[static_cast<Eigen::Index>(l)], e);
      }
      f[t] = v;
    }
    return f;
  }
  // Emax gradient: g = b1 x / (x + b2), f = (x/(x+b2), -b1 x/(x+b2)^2).
  const double xv = x[0];
  const double denom = xv + basis.emax_ec50;
  if (denom == 0.0) {
    throw Error("emax basis: denominator x + beta2 is zero at x = " + std::to_string(xv));
  }
  Vector f(2);
  f[0] = xv / denom;
  f[1] = -basis.emax_scale * xv / (denom * denom);
  return f;
}

Matrix z_matrix(const ModelSpec& model, const Eigen::Ref<const Vector>& x) {
  const int m = model.num_responses();
  const int q = model.q();
  Matrix z = Matrix::Zero(m, q);
  int col = 0;
  for (int i = 0; i < m; ++i) {
    const Vector f = eval_basis(model.responses[static_cast<size_t>(i)], x);
    z.block(i, col, 1, f.size()) = f.transpose();
    col += static_cast<int>(f.size());
  }
  return z;
}

namespace {

void check_symmetric_spd(const Matrix& v, const char* what) {
  if (v.rows() != v.cols() || v.rows() < 1) {
    throw ConfigError(std::string(what) + " must be a square matrix");
  }
  const double scale = v.cwiseAbs().maxCoeff();
  const double asym = (v - v.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * std::max(1.0, scale)) {
    throw ConfigError(std::string(what) + " is not symmetric");
  }
  Eigen::LLT<Matrix> llt(v);
  if (llt.info() != Eigen::Success) {
    throw ConfigError(std::string(what) + " is not positive definite (Cholesky failed)");
  }
}

}  // namespace

CovarianceSpec correlation_from_covariance(const Matrix& V0) {
  check_symmetric_spd(V0, "V0");
  const int m = static_cast<int>(V0.rows());
  CovarianceSpec cov;
  cov.V0 = V0;
  cov.sigma = V0.diagonal().cwiseSqrt();
  cov.R0.resize(m, m);
  for (int i = 0; i < m; ++i) {
    for (int k = 0; k < m; ++k) {
      cov.R0(i, k) = V0(i, k) / (cov.sigma[i] * cov.sigma[k]);
    }
    cov.R0(i, i) = 1.0;
  }
  return cov;
}

CovarianceSpec covariance_from_correlation(const Matrix& R0) {
  check_symmetric_spd(R0, "R0");
  const int m = static_cast<int>(R0.rows());
  for (int i = 0; i < m; ++i) {
    if (std::abs(R0(i, i) - 1.0) > 1e-12) {
      throw ConfigError("R0 must have a unit diagonal");
    }
  }
  CovarianceSpec cov;
  cov.V0 = R0;
  cov.R0 = R0;
  cov.sigma = Vector::Ones(m);
  return cov;
}

DesignMeasure DesignMeasure::on(const DesignSpace& space, Vector weights) {
  if (weights.size() != space.num_points()) {
    throw ConfigError("weight vector has " + std::to_string(weights.size()) +
                      " entries for a space with " + std::to_string(space.num_points()) +
                      " points");
  }
  if ((weights.array() < 0.0).any()) {
    throw ConfigError("design weights must be nonnegative");
  }
  if (std::abs(weights.sum() - 1.0) > 1e-12) {
    throw ConfigError("design weights must sum to 1");
  }
  DesignMeasure mu;
  mu.weights = std::move(weights);
  return mu;
}

}  // namespace roptd
