#include "roptd/information.hpp"

#include "roptd/errors.hpp"
#include "roptd/model.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>
#include <thread>

namespace roptd {

namespace {

constexpr double kRcondFloor = 1e-14;  // states worse than cond ~1e14 count as singular

double atom_inner(const Matrix& atom, const Matrix& kernel, ContextStorage storage) {
  if (storage == ContextStorage::Dense) {
    return atom.cwiseProduct(kernel).sum();
  }
  // <C^T C, K> = sum((C K) o C), never forming the q x q product.
  return (atom * kernel).cwiseProduct(atom).sum();
}

}  // namespace

int sensitivity_threads() {
  const char* env = std::getenv("ROPTD_THREADS");
  if (env == nullptr || *env == '\0') {
    return 1;
  }
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (end == env || v < 1) {
    return 1;
  }
  return static_cast<int>(std::min(v, 256L));
}

Matrix InfoContext::b_at(int j) const {
  const Matrix& atom = atoms_[static_cast<size_t>(j)];
  if (storage_ == ContextStorage::Dense) {
    return atom;
  }
  return atom.transpose() * atom;
}

void InfoContext::accumulate_information(const Vector& w, Matrix& info) const {
  for (int j = 0; j < n_; ++j) {
    const double wj = w[j];
    if (wj == 0.0) {
      continue;
    }
    const Matrix& atom = atoms_[static_cast<size_t>(j)];
    if (storage_ == ContextStorage::Dense) {
      info.noalias() += wj * atom;
    } else {
      info.noalias() += wj * (atom.transpose() * atom);
    }
  }
}

Vector InfoContext::frobenius_against(const Matrix& kernel) const {
  Vector c(n_);
  const int threads = std::min(sensitivity_threads(), n_);
  if (threads <= 1) {
    for (int j = 0; j < n_; ++j) {
      c[j] = atom_inner(atoms_[static_cast<size_t>(j)], kernel, storage_);
    }
    return c;
  }
  // Each worker owns a disjoint index range and writes only its own slots, so
  // the result is bit-identical to the serial pass.
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(threads));
  const int chunk = (n_ + threads - 1) / threads;
  for (int tid = 0; tid < threads; ++tid) {
    const int lo = tid * chunk;
    const int hi = std::min(n_, lo + chunk);
    if (lo >= hi) {
      break;
    }
    pool.emplace_back([this, &kernel, &c, lo, hi] {
      for (int j = lo; j < hi; ++j) {
        c[j] = atom_inner(atoms_[static_cast<size_t>(j)], kernel, storage_);
      }
    });
  }
  for (auto& th : pool) {
    th.join();
  }
  return c;
}

InfoContext build_context(const ModelSpec& model, const DesignSpace& space,
                          const CovarianceSpec& cov, bool use_correlation,
                          ContextStorage storage) {
  model.validate(space.num_factors());
  if (cov.dim() != model.num_responses()) {
    throw ConfigError("covariance is " + std::to_string(cov.dim()) + "x" +
                      std::to_string(cov.dim()) + " but the model has " +
                      std::to_string(model.num_responses()) + " responses");
  }
  const Matrix& working = use_correlation ? cov.R0 : cov.V0;
  Eigen::LLT<Matrix> llt(working);
  if (llt.info() != Eigen::Success) {
    throw ConfigError("working error matrix is not positive definite");
  }

  InfoContext ctx;
  ctx.q_ = model.q();
  ctx.n_ = space.num_points();
  ctx.m_ = model.num_responses();
  ctx.storage_ = storage;
  ctx.used_correlation_ = use_correlation;
  ctx.atoms_.reserve(static_cast<size_t>(ctx.n_));
  for (int j = 0; j < ctx.n_; ++j) {
    const Matrix u = z_matrix(model, space.point(j));
    const Matrix c = llt.matrixL().solve(u);  // C_j with B_j = C_j^T C_j
    if (storage == ContextStorage::Dense) {
      ctx.atoms_.push_back(c.transpose() * c);
    } else {
      ctx.atoms_.push_back(c);
    }
  }
  return ctx;
}

InfoContext reduce_context(const InfoContext& full, const std::vector<std::vector<int>>& orbits) {
  InfoContext ctx;
  ctx.q_ = full.q_;
  ctx.n_ = static_cast<int>(orbits.size());
  ctx.m_ = full.m_;
  ctx.storage_ = ContextStorage::Dense;  // averages of B_j have no low-rank factor
  ctx.used_correlation_ = full.used_correlation_;
  ctx.atoms_.reserve(orbits.size());
  for (const auto& orbit : orbits) {
    if (orbit.empty()) {
      throw Error("orbit reduction produced an empty orbit");
    }
    Matrix avg = Matrix::Zero(full.q_, full.q_);
    for (int j : orbit) {
      if (j < 0 || j >= full.n_) {
        throw Error("orbit index " + std::to_string(j) + " is out of range");
      }
      avg += full.b_at(j);
    }
    avg /= static_cast<double>(orbit.size());
    ctx.atoms_.push_back(std::move(avg));
  }
  return ctx;
}

InfoState info_matrix(const InfoContext& ctx, const Vector& w) {
  if (w.size() != ctx.num_points()) {
    throw Error("weight vector length " + std::to_string(w.size()) +
                " does not match the context (" + std::to_string(ctx.num_points()) + " points)");
  }
  InfoState state;
  state.info = Matrix::Zero(ctx.q(), ctx.q());
  ctx.accumulate_information(w, state.info);

  Eigen::LLT<Matrix> llt(state.info);
  if (llt.info() != Eigen::Success || llt.rcond() < kRcondFloor) {
    state.singular = true;
    return state;
  }
  state.inv = llt.solve(Matrix::Identity(ctx.q(), ctx.q()));
  state.diag_a = state.inv.diagonal();
  if ((state.diag_a.array() <= 0.0).any() || !state.diag_a.allFinite()) {
    state.singular = true;
  }
  return state;
}

double log_loss(const InfoState& state) {
  if (state.singular) {
    return std::numeric_limits<double>::infinity();
  }
  return state.diag_a.array().log().sum();
}

double barrier(const Vector& w, double t) {
  if ((w.array() <= 0.0).any()) {
    return std::numeric_limits<double>::infinity();
  }
  return -w.array().log().sum() / t;
}

Matrix sensitivity_kernel(const InfoState& state) {
  return state.inv * state.diag_a.cwiseInverse().asDiagonal() * state.inv;
}

Vector full_weights(const Vector& w_reduced) {
  Vector w(w_reduced.size() + 1);
  w.head(w_reduced.size()) = w_reduced;
  w[w_reduced.size()] = 1.0 - w_reduced.sum();
  return w;
}

double phi1(const InfoContext& ctx, const Vector& w_reduced, double t) {
  const Vector w = full_weights(w_reduced);
  if ((w.array() <= 0.0).any()) {
    return std::numeric_limits<double>::infinity();
  }
  const InfoState state = info_matrix(ctx, w);
  if (state.singular) {
    return std::numeric_limits<double>::infinity();
  }
  return log_loss(state) + barrier(w, t);
}

Vector grad_phi1(const InfoContext& ctx, const Vector& w_reduced, double t) {
  const Vector w = full_weights(w_reduced);
  if ((w.array() <= 0.0).any()) {
    throw std::domain_error("grad_phi1 evaluated outside the open simplex");
  }
  const InfoState state = info_matrix(ctx, w);
  if (state.singular) {
    throw SingularInformation();
  }
  const Vector c = ctx.frobenius_against(sensitivity_kernel(state));
  const int n = ctx.num_points();
  const double c_last = c[n - 1];
  const double w_last = w[n - 1];
  Vector g(n - 1);
  for (int j = 0; j < n - 1; ++j) {
    g[j] = (c_last - c[j]) + (1.0 / w_last - 1.0 / w[j]) / t;
  }
  return g;
}

}  // namespace roptd
