#pragma once

#include "roptd/multiplicative.hpp"
#include "roptd/solver.hpp"
#include "roptd/types.hpp"

#include <string>
#include <vector>

namespace roptd {

/// Parsed and cross-validated problem description.
struct ProblemConfig {
  int schema_version = 1;
  std::vector<FactorSpec> factors;
  std::vector<ResponseBasis> responses;
  Matrix V0;  // exactly one of V0/R0 is set
  Matrix R0;
  bool v0_given = false;
  bool r0_given = false;
  SolverOptions solver;
  MultOptions mult;
  std::vector<std::string> symmetry_axes;  // factor names
  std::string algorithm = "interior";      // or "multiplicative"
};

/// Parses the key-value config text; throws ConfigError with line diagnostics.
ProblemConfig parse_config(const std::string& text);

ProblemConfig load_config(const std::string& path);

/// Parses one monomial term list, e.g. "1, x1, x2, x1*x2, x1^2"; names must be
/// declared factor names.
std::vector<std::vector<int>> parse_monomial_terms(const std::string& text,
                                                   const std::vector<std::string>& factor_names);

/// The assembled in-memory problem.
struct Problem {
  DesignSpace space;
  ModelSpec model;
  CovarianceSpec cov;
};

Problem assemble(const ProblemConfig& config);

}  // namespace roptd
