#pragma once

#include "roptd/config.hpp"
#include "roptd/information.hpp"
#include "roptd/model.hpp"

#include <cstdlib>
#include <filesystem>
#include <random>
#include <string>

namespace testutil {

inline std::string config_dir() {
  const char* env = std::getenv("ROPTD_CONFIG_DIR");
  return (env != nullptr && *env != '\0') ? env : "configs";
}

inline std::string config_path(const std::string& name) { return config_dir() + "/" + name; }

inline roptd::Problem example_problem(const std::string& name) {
  return roptd::assemble(roptd::load_config(config_path(name)));
}

// One response f = (1, x) on {-1, 0, 1}; optimal weights (1/2, 0, 1/2).
inline roptd::Problem micro_problem() {
  roptd::ProblemConfig cfg;
  cfg.factors.push_back(roptd::FactorSpec::continuous("x1", -1.0, 1.0, 3));
  cfg.responses.push_back(roptd::ResponseBasis::monomial({{0}, {1}}));
  cfg.R0 = roptd::Matrix::Identity(1, 1);
  cfg.r0_given = true;
  return roptd::assemble(cfg);
}

// Two correlated responses f1 = (1, x), f2 = (1, x, x^2) on 5 points.
inline roptd::Problem toy_problem() {
  roptd::ProblemConfig cfg;
  cfg.factors.push_back(roptd::FactorSpec::continuous("x1", -1.0, 1.0, 5));
  cfg.responses.push_back(roptd::ResponseBasis::monomial({{0}, {1}}));
  cfg.responses.push_back(roptd::ResponseBasis::monomial({{0}, {1}, {2}}));
  cfg.R0.resize(2, 2);
  cfg.R0 << 1.0, 0.5, 0.5, 1.0;
  cfg.r0_given = true;
  return roptd::assemble(cfg);
}

inline roptd::InfoContext context_of(const roptd::Problem& pb, bool use_correlation = true) {
  return roptd::build_context(pb.model, pb.space, pb.cov, use_correlation);
}

// Strictly interior random measure with weights bounded away from zero.
inline roptd::Vector interior_weights(int n, std::mt19937& rng) {
  std::uniform_real_distribution<double> u(0.5, 1.5);
  roptd::Vector w(n);
  for (int j = 0; j < n; ++j) w[j] = u(rng);
  return w / w.sum();
}

inline std::filesystem::path scratch_dir(const std::string& tag) {
  auto dir = std::filesystem::temp_directory_path() / ("roptd_test_" + tag);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace testutil
