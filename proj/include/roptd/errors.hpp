#pragma once

#include <stdexcept>
#include <string>

namespace roptd {

/// Base class for all roptd errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid problem configuration (bad schema, dimension mismatch, ...).
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& msg) : Error(msg), line_(0) {}
  ConfigError(int line, const std::string& msg)
      : Error("line " + std::to_string(line) + ": " + msg), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

/// The information matrix I(w) is singular (loss is infinite).
class SingularInformation : public Error {
 public:
  SingularInformation() : Error("singular_information: I(w) is singular, loss is infinite") {}
  explicit SingularInformation(const std::string& msg) : Error(msg) {}
};

/// A requested symmetry/scale transformation does not satisfy Z(Tx) = Z(x)Q.
class SymmetryError : public Error {
 public:
  using Error::Error;
};

}  // namespace roptd
