#include "roptd/reporting.hpp"

#include "roptd/equivalence.hpp"
#include "roptd/errors.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>

namespace roptd {

namespace {

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error("cannot open '" + path + "'");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) {
    const auto first = cell.find_first_not_of(" \t\r");
    const auto last = cell.find_last_not_of(" \t\r");
    cells.push_back(first == std::string::npos ? "" : cell.substr(first, last - first + 1));
  }
  return cells;
}

double parse_double(const std::string& text, const std::string& what) {
  size_t consumed = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &consumed);
  } catch (const std::exception&) {
    throw Error(what + ": '" + text + "' is not a number");
  }
  if (consumed != text.size()) {
    throw Error(what + ": '" + text + "' is not a number");
  }
  return v;
}

int match_grid_point(const DesignSpace& space, const Vector& x) {
  double span = 0.0;
  for (int l = 0; l < space.num_factors(); ++l) {
    span = std::max(span, space.points.col(l).cwiseAbs().maxCoeff());
  }
  const double tol = 1e-6 * (1.0 + span);
  for (int j = 0; j < space.num_points(); ++j) {
    if ((space.point(j) - x).cwiseAbs().maxCoeff() <= tol) {
      return j;
    }
  }
  return -1;
}

}  // namespace

ExactDesign round_design(const DesignSpace& space, const Vector& weights, long n,
                         double support_threshold) {
  if (n < 1) {
    throw Error("the number of runs must be at least 1");
  }
  if (weights.size() != space.num_points()) {
    throw Error("weight vector does not match the design space");
  }
  struct Slot {
    int index;
    long count;
    double remainder;
  };
  std::vector<Slot> slots;
  for (int j = 0; j < space.num_points(); ++j) {
    if (weights[j] > support_threshold) {
      const double share = static_cast<double>(n) * weights[j];
      slots.push_back({j, static_cast<long>(std::floor(share)), share - std::floor(share)});
    }
  }
  if (slots.empty()) {
    throw Error("no support points above the threshold");
  }
  long leftover = n - std::accumulate(slots.begin(), slots.end(), 0L,
                                      [](long acc, const Slot& s) { return acc + s.count; });
  // Largest remainders first; ties go to the lower point index.
  std::vector<int> order(slots.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&slots](int a, int b) {
    if (slots[static_cast<size_t>(a)].remainder != slots[static_cast<size_t>(b)].remainder) {
      return slots[static_cast<size_t>(a)].remainder > slots[static_cast<size_t>(b)].remainder;
    }
    return slots[static_cast<size_t>(a)].index < slots[static_cast<size_t>(b)].index;
  });
  for (size_t pos = 0; leftover > 0; pos = (pos + 1) % order.size()) {
    ++slots[static_cast<size_t>(order[pos])].count;
    --leftover;
  }

  ExactDesign design;
  design.n = n;
  for (const Slot& s : slots) {
    if (s.count > 0) {
      design.runs.push_back({s.index, space.point(s.index), s.count});
    }
  }
  return design;
}

nlohmann::ordered_json report_to_json(const SolveReport& report, const DesignSpace& space,
                                      const ReportMeta& meta) {
  nlohmann::ordered_json j;
  j["schema_version"] = 1;
  j["config"] = meta.config_path;
  j["algorithm"] = report.algorithm;
  j["working_matrix"] = meta.working_matrix;
  j["problem"] = {{"factors", meta.p},
                  {"responses", meta.m},
                  {"parameters", meta.q},
                  {"points", meta.n_points}};
  j["reduction"] = {{"applied", meta.reduction_applied},
                    {"axes", meta.reduction_axes},
                    {"orbits", meta.orbit_count}};
  j["options"] = meta.options;
  j["converged"] = report.converged;
  j["loss"] = report.loss;
  j["max_d"] = report.max_d;
  j["phi_increase_count"] = report.phi_increase_count;
  j["support_threshold"] = meta.support_threshold;

  nlohmann::ordered_json support = nlohmann::ordered_json::array();
  for (const SupportEntry& s : support_points(space, report.weights, meta.support_threshold)) {
    nlohmann::ordered_json entry;
    entry["index"] = s.index;
    entry["point"] = std::vector<double>(s.point.data(), s.point.data() + s.point.size());
    entry["weight"] = s.weight;
    support.push_back(std::move(entry));
  }
  j["support"] = std::move(support);
  j["weights"] = std::vector<double>(report.weights.data(),
                                     report.weights.data() + report.weights.size());

  nlohmann::ordered_json trace = nlohmann::ordered_json::array();
  for (const StageTrace& s : report.outer_trace) {
    nlohmann::ordered_json entry;
    entry["t"] = s.t;
    entry["inner_iters"] = s.inner_iters;
    entry["phi1"] = s.phi1;
    entry["phi"] = s.phi;
    entry["max_d"] = s.max_d;
    entry["line_search_failures"] = s.line_search_failures;
    trace.push_back(std::move(entry));
  }
  j["stage_trace"] = std::move(trace);
  return j;
}

void write_report(const SolveReport& report, const DesignSpace& space, const ReportMeta& meta,
                  ReportFormat format, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error("cannot open '" + path + "' for writing");
  }
  if (format == ReportFormat::Json) {
    out << report_to_json(report, space, meta).dump(2) << '\n';
  } else {
    const int p = space.num_factors();
    for (int l = 0; l < p; ++l) {
      out << 'x' << (l + 1) << ',';
    }
    out << "weight\n";
    for (const SupportEntry& s : support_points(space, report.weights, meta.support_threshold)) {
      out << std::setprecision(17);
      for (int l = 0; l < p; ++l) {
        out << s.point[l] << ',';
      }
      out << std::fixed << std::setprecision(4) << s.weight << '\n';
      out.unsetf(std::ios::fixed);
    }
  }
  if (!out) {
    throw Error("write to '" + path + "' failed");
  }
}

void write_exact_design_csv(const ExactDesign& design, const DesignSpace& space,
                            const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error("cannot open '" + path + "' for writing");
  }
  const int p = space.num_factors();
  for (int l = 0; l < p; ++l) {
    out << 'x' << (l + 1) << ',';
  }
  out << "count\n";
  out << std::setprecision(17);
  for (const RunAllocation& run : design.runs) {
    for (int l = 0; l < p; ++l) {
      out << run.point[l] << ',';
    }
    out << run.count << '\n';
  }
  if (!out) {
    throw Error("write to '" + path + "' failed");
  }
}

Vector read_weights_file(const std::string& path, const DesignSpace& space) {
  const std::string text = read_text(path);
  const auto start = text.find_first_not_of(" \t\r\n");
  if (start == std::string::npos) {
    throw Error("weights file '" + path + "' is empty");
  }

  Vector w = Vector::Zero(space.num_points());
  if (text[start] == '{') {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
      throw Error("weights file '" + path + "': " + e.what());
    }
    if (!j.contains("weights") || !j["weights"].is_array()) {
      throw Error("weights file '" + path + "' has no \"weights\" array");
    }
    const auto& arr = j["weights"];
    if (static_cast<int>(arr.size()) != space.num_points()) {
      throw Error("weights file '" + path + "' has " + std::to_string(arr.size()) +
                  " weights for a space with " + std::to_string(space.num_points()) + " points");
    }
    for (int j2 = 0; j2 < space.num_points(); ++j2) {
      w[j2] = arr[static_cast<size_t>(j2)].get<double>();
    }
  } else {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) {
      throw Error("weights file '" + path + "' is empty");
    }
    const std::vector<std::string> header = split_csv_line(line);
    int weight_col = -1;
    for (size_t c = 0; c < header.size(); ++c) {
      if (header[c] == "weight") {
        weight_col = static_cast<int>(c);
        break;
      }
    }
    if (weight_col != space.num_factors()) {
      throw Error("weights file '" + path + "' must have " +
                  std::to_string(space.num_factors()) +
                  " coordinate columns followed by a 'weight' column");
    }
    int lineno = 1;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.find_first_not_of(" \t\r") == std::string::npos) {
        continue;
      }
      const std::vector<std::string> cells = split_csv_line(line);
      if (static_cast<int>(cells.size()) <= weight_col) {
        throw Error("weights file '" + path + "' line " + std::to_string(lineno) +
                    ": expected at least " + std::to_string(weight_col + 1) + " columns");
      }
      Vector x(space.num_factors());
      for (int l = 0; l < space.num_factors(); ++l) {
        x[l] = parse_double(cells[static_cast<size_t>(l)],
                            "weights file line " + std::to_string(lineno));
      }
      const int idx = match_grid_point(space, x);
      if (idx < 0) {
        throw Error("weights file '" + path + "' line " + std::to_string(lineno) +
                    ": the point is not on the design grid");
      }
      w[idx] += parse_double(cells[static_cast<size_t>(weight_col)],
                             "weights file line " + std::to_string(lineno));
    }
  }

  if ((w.array() < 0.0).any()) {
    throw Error("weights file '" + path + "' contains negative weights");
  }
  const double total = w.sum();
  if (!(total > 0.5 && total < 1.5)) {
    throw Error("weights file '" + path + "' sums to " + std::to_string(total) +
                "; expected a probability vector");
  }
  w /= total;
  return w;
}

}  // namespace roptd
