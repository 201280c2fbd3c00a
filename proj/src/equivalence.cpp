#include "roptd/equivalence.hpp"

#include "roptd/errors.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace roptd {

double directional_d(const InfoContext& ctx, const Vector& w, int j) {
  if (j < 0 || j >= ctx.num_points()) {
    throw Error("point index " + std::to_string(j) + " is out of range");
  }
  const InfoState state = info_matrix(ctx, w);
  if (state.singular) {
    throw SingularInformation();
  }
  const Matrix kernel = sensitivity_kernel(state);
  return ctx.b_at(j).cwiseProduct(kernel).sum() - ctx.q();
}

Vector d_vector(const InfoContext& ctx, const Vector& w) {
  const InfoState state = info_matrix(ctx, w);
  if (state.singular) {
    throw SingularInformation();
  }
  Vector d = ctx.frobenius_against(sensitivity_kernel(state));
  d.array() -= static_cast<double>(ctx.q());
  return d;
}

EquivalenceReport verify_optimality(const InfoContext& ctx, const Vector& w, double delta,
                                    double support_threshold) {
  EquivalenceReport report;
  report.d_values = d_vector(ctx, w);
  report.delta_used = delta;
  report.max_d = report.d_values[0];
  report.argmax_j = 0;
  for (int j = 1; j < ctx.num_points(); ++j) {
    if (report.d_values[j] > report.max_d) {
      report.max_d = report.d_values[j];
      report.argmax_j = j;
    }
  }
  for (int j = 0; j < ctx.num_points(); ++j) {
    if (w[j] > support_threshold) {
      report.support_indices.push_back(j);
    }
  }
  report.converged = report.max_d <= delta;
  return report;
}

std::vector<SupportEntry> support_points(const DesignSpace& space, const Vector& w,
                                         double threshold) {
  std::vector<SupportEntry> entries;
  for (int j = 0; j < space.num_points(); ++j) {
    if (w[j] > threshold) {
      entries.push_back({j, space.point(j), w[j]});
    }
  }
  std::sort(entries.begin(), entries.end(), [](const SupportEntry& a, const SupportEntry& b) {
    for (Eigen::Index l = 0; l < a.point.size(); ++l) {
      if (a.point[l] != b.point[l]) {
        return a.point[l] < b.point[l];
      }
    }
    return a.index < b.index;
  });
  return entries;
}

void export_d_surface(const DesignSpace& space, const InfoContext& ctx, const Vector& w,
                      const std::string& path) {
  const Vector d = d_vector(ctx, w);
  std::ofstream out(path);
  if (!out) {
    throw Error("cannot open '" + path + "' for writing");
  }
  const int p = space.num_factors();
  for (int l = 0; l < p; ++l) {
    out << 'x' << (l + 1) << ',';
  }
  out << "weight,d\n";
  out << std::setprecision(17);
  for (int j = 0; j < space.num_points(); ++j) {
    for (int l = 0; l < p; ++l) {
      out << space.points(j, l) << ',';
    }
    out << w[j] << ',' << d[j] << '\n';
  }
  if (!out) {
    throw Error("write to '" + path + "' failed");
  }
}

}  // namespace roptd
