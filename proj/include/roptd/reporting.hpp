#pragma once

#include "roptd/solver.hpp"
#include "roptd/types.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace roptd {

struct RunAllocation {
  int index = -1;
  Vector point;
  long count = 0;
};

/// n-run exact design obtained by rounding an approximate design.
struct ExactDesign {
  std::vector<RunAllocation> runs;  // support points with positive counts
  long n = 0;
};

/// Largest-remainder apportionment of n runs over the support points
/// (floor(n w_j), then remaining runs to the largest fractional remainders,
/// ties to the lower point index).
ExactDesign round_design(const DesignSpace& space, const Vector& weights, long n,
                         double support_threshold = 1e-5);

/// Everything the serialized report carries besides the solve result itself.
struct ReportMeta {
  std::string config_path;
  std::string working_matrix = "R0";  // which W built the context
  int p = 0, m = 0, q = 0, n_points = 0;
  double support_threshold = 1e-5;
  bool reduction_applied = false;
  std::vector<std::string> reduction_axes;
  int orbit_count = 0;
  nlohmann::ordered_json options;  // solver/multiplicative options as given
};

nlohmann::ordered_json report_to_json(const SolveReport& report, const DesignSpace& space,
                                      const ReportMeta& meta);

enum class ReportFormat { Json, Csv };

/// JSON: the full report with stable key order. CSV: the support table
/// (coordinates at 17 significant digits, weights at 4 decimals), sorted
/// lexicographically.
void write_report(const SolveReport& report, const DesignSpace& space, const ReportMeta& meta,
                  ReportFormat format, const std::string& path);

void write_exact_design_csv(const ExactDesign& design, const DesignSpace& space,
                            const std::string& path);

/// Reads a weight vector back from a support CSV (rows matched to grid points)
/// or from the "weights" array of a JSON report.
Vector read_weights_file(const std::string& path, const DesignSpace& space);

}  // namespace roptd
