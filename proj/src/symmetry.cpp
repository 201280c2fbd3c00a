#include "roptd/symmetry.hpp"

#include "roptd/errors.hpp"
#include "roptd/model.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace roptd {

namespace {

std::string format_point(const Vector& x) {
  std::ostringstream out;
  out << '(';
  for (Eigen::Index l = 0; l < x.size(); ++l) {
    if (l > 0) {
      out << ", ";
    }
    out << x[l];
  }
  out << ')';
  return out.str();
}

bool lex_less(const Vector& a, const Vector& b) {
  for (Eigen::Index l = 0; l < a.size(); ++l) {
    if (a[l] != b[l]) {
      return a[l] < b[l];
    }
  }
  return false;
}

}  // namespace

Transform Transform::scale(Vector factors) {
  if ((factors.array() <= 0.0).any()) {
    throw SymmetryError("scale factors must be positive");
  }
  Transform t;
  t.kind = Kind::Scale;
  t.scale_factors = std::move(factors);
  return t;
}

Transform Transform::reflection(int axis) {
  if (axis < 0) {
    throw SymmetryError("reflection axis must be nonnegative");
  }
  Transform t;
  t.kind = Kind::Reflection;
  t.axis = axis;
  return t;
}

Vector Transform::apply(const Eigen::Ref<const Vector>& x) const {
  if (kind == Kind::Scale) {
    if (scale_factors.size() != x.size()) {
      throw SymmetryError("scale transform has the wrong dimension");
    }
    return x.cwiseProduct(scale_factors);
  }
  if (axis >= x.size()) {
    throw SymmetryError("reflection axis " + std::to_string(axis + 1) + " is out of range");
  }
  Vector y = x;
  y[axis] = -y[axis];
  return y;
}

Vector detect_q(const ModelSpec& model, const DesignSpace& space, const Transform& transform) {
  model.validate(space.num_factors());
  const int n = space.num_points();
  const int q = model.q();
  const int m = model.num_responses();

  std::vector<Matrix> zx(static_cast<size_t>(n)), ztx(static_cast<size_t>(n));
  Vector col_scale = Vector::Zero(q);
  for (int j = 0; j < n; ++j) {
    const Vector x = space.point(j);
    zx[static_cast<size_t>(j)] = z_matrix(model, x);
    ztx[static_cast<size_t>(j)] = z_matrix(model, transform.apply(x));
    col_scale = col_scale.cwiseMax(zx[static_cast<size_t>(j)].cwiseAbs().colwise().maxCoeff().transpose());
  }

  // Derive each diagonal entry from its best-conditioned sample, then verify
  // the identity Z(Tx) = Z(x) Q everywhere.
  Vector qdiag = Vector::Ones(q);
  for (int c = 0; c < q; ++c) {
    double best = 0.0;
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < m; ++i) {
        const double a = zx[static_cast<size_t>(j)](i, c);
        if (std::abs(a) > std::abs(best)) {
          best = a;
          qdiag[c] = ztx[static_cast<size_t>(j)](i, c) / a;
        }
      }
    }
  }
  if (transform.kind == Transform::Kind::Reflection) {
    for (int c = 0; c < q; ++c) {
      if (std::abs(qdiag[c] - 1.0) <= 1e-10) {
        qdiag[c] = 1.0;
      } else if (std::abs(qdiag[c] + 1.0) <= 1e-10) {
        qdiag[c] = -1.0;
      } else {
        throw SymmetryError("reflection in axis " + std::to_string(transform.axis + 1) +
                            " does not induce a +/-1 column scaling (column " +
                            std::to_string(c + 1) + " scales by " + std::to_string(qdiag[c]) + ")");
      }
    }
  }

  for (int j = 0; j < n; ++j) {
    for (int c = 0; c < q; ++c) {
      const double tol = 1e-10 * std::max(1.0, col_scale[c]);
      for (int i = 0; i < m; ++i) {
        const double lhs = ztx[static_cast<size_t>(j)](i, c);
        const double rhs = qdiag[c] * zx[static_cast<size_t>(j)](i, c);
        if (std::abs(lhs - rhs) > tol) {
          throw SymmetryError("no diagonal Q with Z(Tx) = Z(x) Q: identity fails at point " +
                              format_point(space.point(j)) + ", response " + std::to_string(i + 1) +
                              ", column " + std::to_string(c + 1));
        }
      }
    }
  }
  return qdiag;
}

std::vector<int> point_permutation(const DesignSpace& space,
                                   const std::function<Vector(const Vector&)>& map) {
  const int n = space.num_points();
  const int p = space.num_factors();
  double span = 0.0;
  for (int l = 0; l < p; ++l) {
    span = std::max(span, space.points.col(l).cwiseAbs().maxCoeff());
  }
  const double tol = 1e-9 * (1.0 + span);

  std::vector<int> perm(static_cast<size_t>(n), -1);
  std::vector<char> taken(static_cast<size_t>(n), 0);
  for (int j = 0; j < n; ++j) {
    const Vector image = map(space.point(j));
    int found = -1;
    for (int k = 0; k < n; ++k) {
      if (taken[static_cast<size_t>(k)]) {
        continue;
      }
      if ((space.point(k) - image).cwiseAbs().maxCoeff() <= tol) {
        found = k;
        break;
      }
    }
    if (found < 0) {
      throw SymmetryError("the image " + format_point(image) + " of grid point " +
                          format_point(space.point(j)) + " is not a grid point");
    }
    perm[static_cast<size_t>(j)] = found;
    taken[static_cast<size_t>(found)] = 1;
  }
  return perm;
}

OrbitReduction reduce_by_reflections(const DesignSpace& space, const std::vector<int>& axes,
                                     const ModelSpec& model) {
  if (axes.empty()) {
    throw SymmetryError("at least one reflection axis is required");
  }
  const int p = space.num_factors();
  std::vector<char> seen(static_cast<size_t>(p), 0);
  for (int a : axes) {
    if (a < 0 || a >= p) {
      throw SymmetryError("reflection axis " + std::to_string(a + 1) + " is out of range");
    }
    if (seen[static_cast<size_t>(a)]) {
      throw SymmetryError("reflection axis " + std::to_string(a + 1) + " is listed twice");
    }
    seen[static_cast<size_t>(a)] = 1;
  }

  const int n = space.num_points();
  std::vector<std::vector<int>> perms;
  perms.reserve(axes.size());
  for (int a : axes) {
    const Transform refl = Transform::reflection(a);
    detect_q(model, space, refl);  // throws if the model lacks the symmetry
    perms.push_back(point_permutation(space, [&refl](const Vector& x) { return refl.apply(x); }));
  }

  OrbitReduction red;
  red.orbit_of.assign(static_cast<size_t>(n), -1);
  for (int j = 0; j < n; ++j) {
    if (red.orbit_of[static_cast<size_t>(j)] >= 0) {
      continue;
    }
    const int id = red.orbit_count();
    std::vector<int> orbit{j};
    red.orbit_of[static_cast<size_t>(j)] = id;
    for (size_t head = 0; head < orbit.size(); ++head) {
      for (const auto& perm : perms) {
        const int img = perm[static_cast<size_t>(orbit[head])];
        if (red.orbit_of[static_cast<size_t>(img)] < 0) {
          red.orbit_of[static_cast<size_t>(img)] = id;
          orbit.push_back(img);
        }
      }
    }
    std::sort(orbit.begin(), orbit.end());
    int rep = orbit[0];
    for (int member : orbit) {
      if (lex_less(space.point(member), space.point(rep))) {
        rep = member;
      }
    }
    red.representative.push_back(rep);
    red.multiplicity.push_back(static_cast<int>(orbit.size()));
    red.orbits.push_back(std::move(orbit));
  }

  red.reduced_space.factors = space.factors;
  red.reduced_space.points.resize(red.orbit_count(), p);
  for (int k = 0; k < red.orbit_count(); ++k) {
    red.reduced_space.points.row(k) = space.points.row(red.representative[static_cast<size_t>(k)]);
  }
  return red;
}

Vector expand_reduced_weights(const OrbitReduction& reduction, const Vector& omega) {
  if (omega.size() != reduction.orbit_count()) {
    throw Error("orbit weight vector has the wrong length");
  }
  Vector w(reduction.orbit_of.size());
  for (size_t j = 0; j < reduction.orbit_of.size(); ++j) {
    const int k = reduction.orbit_of[j];
    w[static_cast<Eigen::Index>(j)] =
        omega[k] / static_cast<double>(reduction.multiplicity[static_cast<size_t>(k)]);
  }
  return w;
}

Vector collapse_weights(const OrbitReduction& reduction, const Vector& w) {
  if (w.size() != static_cast<Eigen::Index>(reduction.orbit_of.size())) {
    throw Error("weight vector has the wrong length for this reduction");
  }
  Vector omega = Vector::Zero(reduction.orbit_count());
  for (size_t j = 0; j < reduction.orbit_of.size(); ++j) {
    omega[reduction.orbit_of[j]] += w[static_cast<Eigen::Index>(j)];
  }
  return omega;
}

std::optional<Vector> correlation_sign_equivalent(const Matrix& R0, const Matrix& R1, double tol) {
  if (R0.rows() != R1.rows() || R0.cols() != R1.cols() || R0.rows() != R0.cols()) {
    return std::nullopt;
  }
  const int m = static_cast<int>(R0.rows());
  const long combos = 1L << (m - 1);
  for (long mask = 0; mask < combos; ++mask) {
    Vector s(m);
    s[0] = 1.0;
    for (int i = 1; i < m; ++i) {
      s[i] = ((mask >> (i - 1)) & 1) != 0 ? -1.0 : 1.0;
    }
    bool ok = true;
    for (int i = 0; i < m && ok; ++i) {
      for (int k = 0; k < m && ok; ++k) {
        ok = std::abs(R0(i, k) - s[i] * R1(i, k) * s[k]) <= tol;
      }
    }
    if (ok) {
      return s;
    }
  }
  return std::nullopt;
}

PhiSymmetryCheck verify_phi_symmetry(const InfoContext& ctx, const std::vector<int>& permutation,
                                     int samples, double tol, unsigned seed) {
  const int n = ctx.num_points();
  if (static_cast<int>(permutation.size()) != n) {
    throw Error("permutation length does not match the context");
  }
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> uni(0.1, 1.0);

  PhiSymmetryCheck check;
  check.holds = true;
  for (int s = 0; s < samples; ++s) {
    Vector w(n);
    for (int j = 0; j < n; ++j) {
      w[j] = uni(rng);
    }
    w /= w.sum();
    Vector pw(n);
    for (int j = 0; j < n; ++j) {
      pw[permutation[static_cast<size_t>(j)]] = w[j];
    }
    const double phi_w = log_loss(info_matrix(ctx, w));
    const double phi_pw = log_loss(info_matrix(ctx, pw));
    check.max_abs_diff = std::max(check.max_abs_diff, std::abs(phi_w - phi_pw));
  }
  check.holds = check.max_abs_diff <= tol;
  return check;
}

}  // namespace roptd
