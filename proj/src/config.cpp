#include "roptd/config.hpp"

#include "roptd/errors.hpp"
#include "roptd/model.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace roptd {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) {
    return "";
  }
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string part;
  std::istringstream in(s);
  while (std::getline(in, part, sep)) {
    parts.push_back(trim(part));
  }
  return parts;
}

std::vector<std::string> tokenize(const std::string& s) {
  std::vector<std::string> tokens;
  std::istringstream in(s);
  std::string tok;
  while (in >> tok) {
    tokens.push_back(tok);
  }
  return tokens;
}

double to_double(const std::string& text, const std::string& what) {
  size_t consumed = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &consumed);
  } catch (const std::exception&) {
    throw ConfigError(what + ": '" + text + "' is not a number");
  }
  if (consumed != text.size()) {
    throw ConfigError(what + ": '" + text + "' is not a number");
  }
  return v;
}

long to_long(const std::string& text, const std::string& what) {
  size_t consumed = 0;
  long v = 0;
  try {
    v = std::stol(text, &consumed);
  } catch (const std::exception&) {
    throw ConfigError(what + ": '" + text + "' is not an integer");
  }
  if (consumed != text.size()) {
    throw ConfigError(what + ": '" + text + "' is not an integer");
  }
  return v;
}

Matrix parse_matrix(const std::string& text, const std::string& what) {
  const std::vector<std::string> rows = split(text, ';');
  if (rows.empty()) {
    throw ConfigError(what + ": empty matrix");
  }
  std::vector<std::vector<double>> values;
  for (const std::string& row : rows) {
    std::vector<double> entries;
    for (const std::string& tok : tokenize(row)) {
      entries.push_back(to_double(tok, what));
    }
    if (entries.empty()) {
      throw ConfigError(what + ": empty matrix row");
    }
    values.push_back(std::move(entries));
  }
  const size_t cols = values.front().size();
  for (const auto& row : values) {
    if (row.size() != cols) {
      throw ConfigError(what + ": rows have different lengths");
    }
  }
  Matrix m(static_cast<Eigen::Index>(values.size()), static_cast<Eigen::Index>(cols));
  for (size_t i = 0; i < values.size(); ++i) {
    for (size_t k = 0; k < cols; ++k) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = values[i][k];
    }
  }
  return m;
}

struct PendingResponse {
  bool is_emax = false;
  std::string term_text;  // monomial
  double beta1 = 1.0;     // emax
  double beta2 = 1.0;
  int line = 0;
};

void apply_option(ProblemConfig& cfg, const std::string& key, const std::string& value) {
  const std::string what = "option " + key;
  if (key == "solver.t1") {
    cfg.solver.t1 = to_double(value, what);
  } else if (key == "solver.lambda") {
    cfg.solver.lambda = to_double(value, what);
  } else if (key == "solver.delta") {
    cfg.solver.delta = to_double(value, what);
  } else if (key == "solver.bfgs_grad_tol") {
    cfg.solver.bfgs_grad_tol = to_double(value, what);
  } else if (key == "solver.bfgs_max_iters") {
    cfg.solver.bfgs_max_iters = static_cast<int>(to_long(value, what));
  } else if (key == "solver.max_outer_iters") {
    cfg.solver.max_outer_iters = static_cast<int>(to_long(value, what));
  } else if (key == "solver.step_shrink") {
    cfg.solver.step_shrink = to_double(value, what);
  } else if (key == "solver.armijo_c") {
    cfg.solver.armijo_c = to_double(value, what);
  } else if (key == "solver.feasibility_margin") {
    cfg.solver.feasibility_margin = to_double(value, what);
  } else if (key == "solver.support_threshold") {
    cfg.solver.support_threshold = to_double(value, what);
    cfg.mult.support_threshold = cfg.solver.support_threshold;
  } else if (key == "mult.max_iters") {
    cfg.mult.max_iters = to_long(value, what);
  } else if (key == "mult.delta") {
    cfg.mult.delta = to_double(value, what);
  } else if (key == "mult.damping") {
    cfg.mult.damping = to_double(value, what);
  } else if (key == "mult.trace_every") {
    cfg.mult.trace_every = to_long(value, what);
  } else {
    throw ConfigError("unknown key '" + key + "'");
  }
}

}  // namespace

std::vector<std::vector<int>> parse_monomial_terms(const std::string& text,
                                                   const std::vector<std::string>& factor_names) {
  const int p = static_cast<int>(factor_names.size());
  std::vector<std::vector<int>> terms;
  for (const std::string& term : split(text, ',')) {
    if (term.empty()) {
      throw ConfigError("empty monomial term in '" + text + "'");
    }
    std::vector<int> expo(static_cast<size_t>(p), 0);
    if (term == "1") {
      terms.push_back(std::move(expo));
      continue;
    }
    for (const std::string& factor_raw : split(term, '*')) {
      const std::string factor = trim(factor_raw);
      if (factor.empty()) {
        throw ConfigError("empty factor in monomial term '" + term + "'");
      }
      std::string name = factor;
      int power = 1;
      const auto caret = factor.find('^');
      if (caret != std::string::npos) {
        name = trim(factor.substr(0, caret));
        const std::string power_text = trim(factor.substr(caret + 1));
        power = static_cast<int>(to_long(power_text, "monomial power in '" + term + "'"));
        if (power < 1) {
          throw ConfigError("monomial power must be positive in term '" + term + "'");
        }
      }
      const auto it = std::find(factor_names.begin(), factor_names.end(), name);
      if (it == factor_names.end()) {
        throw ConfigError("unknown factor '" + name + "' in monomial term '" + term + "'");
      }
      expo[static_cast<size_t>(it - factor_names.begin())] += power;
    }
    terms.push_back(std::move(expo));
  }
  if (terms.empty()) {
    throw ConfigError("monomial term list is empty");
  }
  return terms;
}

ProblemConfig parse_config(const std::string& text) {
  ProblemConfig cfg;
  bool saw_schema = false;
  std::string algorithm_line;
  std::vector<PendingResponse> pending;
  std::vector<std::string> symmetry_names;
  int v0_line = 0, r0_line = 0;

  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) {
      continue;
    }
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    std::string rest;
    std::getline(ls, rest);
    rest = trim(rest);

    try {
      if (key == "schema_version") {
        if (saw_schema) {
          throw ConfigError("schema_version given twice");
        }
        cfg.schema_version = static_cast<int>(to_long(rest, "schema_version"));
        if (cfg.schema_version != 1) {
          throw ConfigError("unsupported schema_version " + std::to_string(cfg.schema_version) +
                            " (this build reads version 1)");
        }
        saw_schema = true;
      } else if (key == "factor") {
        const std::vector<std::string> tokens = tokenize(rest);
        if (tokens.size() < 2) {
          throw ConfigError("factor needs a name and a kind ('range' or 'values')");
        }
        const std::string& name = tokens[0];
        for (const auto& f : cfg.factors) {
          if (f.name == name) {
            throw ConfigError("factor '" + name + "' declared twice");
          }
        }
        if (tokens[1] == "range") {
          if (tokens.size() != 6 || tokens[4] != "levels") {
            throw ConfigError("expected: factor <name> range <lower> <upper> levels <count>");
          }
          cfg.factors.push_back(FactorSpec::continuous(
              name, to_double(tokens[2], "factor lower bound"),
              to_double(tokens[3], "factor upper bound"),
              static_cast<int>(to_long(tokens[5], "factor level count"))));
        } else if (tokens[1] == "values") {
          std::string value_text;
          for (size_t i = 2; i < tokens.size(); ++i) {
            value_text += tokens[i];
          }
          std::vector<double> values;
          for (const std::string& v : split(value_text, ',')) {
            values.push_back(to_double(v, "factor level"));
          }
          cfg.factors.push_back(FactorSpec::categorical(name, std::move(values)));
        } else {
          throw ConfigError("unknown factor kind '" + tokens[1] + "' (use 'range' or 'values')");
        }
      } else if (key == "response") {
        std::istringstream rs(rest);
        std::string kind;
        rs >> kind;
        std::string payload;
        std::getline(rs, payload);
        payload = trim(payload);
        PendingResponse r;
        r.line = lineno;
        if (kind == "monomial") {
          r.term_text = payload;
          if (r.term_text.empty()) {
            throw ConfigError("monomial response needs a term list");
          }
        } else if (kind == "emax") {
          const std::vector<std::string> params = tokenize(payload);
          if (params.size() != 2) {
            throw ConfigError("expected: response emax <beta1> <beta2>");
          }
          r.is_emax = true;
          r.beta1 = to_double(params[0], "emax beta1");
          r.beta2 = to_double(params[1], "emax beta2");
        } else {
          throw ConfigError("unknown response kind '" + kind + "' (use 'monomial' or 'emax')");
        }
        pending.push_back(std::move(r));
      } else if (key == "V0") {
        if (v0_line > 0) {
          throw ConfigError("V0 given twice (first on line " + std::to_string(v0_line) + ")");
        }
        cfg.V0 = parse_matrix(rest, "V0");
        cfg.v0_given = true;
        v0_line = lineno;
      } else if (key == "R0") {
        if (r0_line > 0) {
          throw ConfigError("R0 given twice (first on line " + std::to_string(r0_line) + ")");
        }
        cfg.R0 = parse_matrix(rest, "R0");
        cfg.r0_given = true;
        r0_line = lineno;
      } else if (key == "algorithm") {
        if (rest != "interior" && rest != "multiplicative") {
          throw ConfigError("unknown algorithm '" + rest +
                            "' (use 'interior' or 'multiplicative')");
        }
        cfg.algorithm = rest;
      } else if (key == "symmetry") {
        std::string joined;
        for (const std::string& tok : tokenize(rest)) {
          joined += tok;
        }
        symmetry_names = split(joined, ',');
        if (symmetry_names.empty() || joined.empty()) {
          throw ConfigError("symmetry needs a comma-separated list of factor names");
        }
      } else {
        apply_option(cfg, key, rest);
      }
    } catch (const ConfigError& e) {
      if (e.line() > 0) {
        throw;
      }
      throw ConfigError(lineno, e.what());
    }
  }

  if (!saw_schema) {
    throw ConfigError("missing schema_version (expected 'schema_version 1')");
  }
  if (cfg.factors.empty()) {
    throw ConfigError("no factors declared");
  }
  if (pending.empty()) {
    throw ConfigError("no responses declared");
  }
  if (cfg.v0_given == cfg.r0_given) {
    throw ConfigError(cfg.v0_given ? "give exactly one of V0 and R0, not both"
                                   : "one of V0 or R0 is required");
  }

  std::vector<std::string> factor_names;
  factor_names.reserve(cfg.factors.size());
  for (const auto& f : cfg.factors) {
    factor_names.push_back(f.name);
  }
  for (const PendingResponse& r : pending) {
    try {
      if (r.is_emax) {
        cfg.responses.push_back(ResponseBasis::emax(r.beta1, r.beta2));
      } else {
        cfg.responses.push_back(ResponseBasis::monomial(
            parse_monomial_terms(r.term_text, factor_names)));
      }
    } catch (const ConfigError& e) {
      if (e.line() > 0) {
        throw;
      }
      throw ConfigError(r.line, e.what());
    }
  }

  const Matrix& cov = cfg.v0_given ? cfg.V0 : cfg.R0;
  const auto m = static_cast<Eigen::Index>(cfg.responses.size());
  if (cov.rows() != m || cov.cols() != m) {
    throw ConfigError(cfg.v0_given ? v0_line : r0_line,
                      std::string(cfg.v0_given ? "V0" : "R0") + " is " +
                          std::to_string(cov.rows()) + "x" + std::to_string(cov.cols()) +
                          " but the model has " + std::to_string(m) + " responses");
  }

  for (const std::string& name : symmetry_names) {
    if (std::find(factor_names.begin(), factor_names.end(), name) == factor_names.end()) {
      throw ConfigError("symmetry names unknown factor '" + name + "'");
    }
    if (std::count(symmetry_names.begin(), symmetry_names.end(), name) > 1) {
      throw ConfigError("symmetry lists factor '" + name + "' twice");
    }
  }
  cfg.symmetry_axes = symmetry_names;

  cfg.solver.validate();
  cfg.mult.validate();
  return cfg;
}

ProblemConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ConfigError("cannot open config file '" + path + "'");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

Problem assemble(const ProblemConfig& config) {
  Problem problem;
  problem.space = build_grid(config.factors);
  problem.model.responses = config.responses;
  problem.model.validate(problem.space.num_factors());
  problem.cov = config.v0_given ? correlation_from_covariance(config.V0)
                                : covariance_from_correlation(config.R0);
  return problem;
}

}  // namespace roptd
