#pragma once

#include <stdexcept>
#include <string>

namespace rprior {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Design matrix whose normal matrix is numerically rank deficient.
class SingularDesignError : public std::runtime_error {
 public:
  SingularDesignError(const std::string& what, double eigenvalue)
      : std::runtime_error(what), eigenvalue_(eigenvalue) {}
  double eigenvalue() const noexcept { return eigenvalue_; }

 private:
  double eigenvalue_;
};

/// Malformed user input (files, configs, flags).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numerical procedure failed to reach its tolerance.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Requested combination is not defined (e.g. g-density of a point-mass prior).
class UnsupportedSchemeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace rprior
