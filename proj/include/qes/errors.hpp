#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace qes {

/// Argument violates a documented precondition (degenerate coupling, bad M, ...).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A sample point or ray lies outside the region where the operation is defined.
class PreconditionError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// Iterative numerics failed to meet their tolerance.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Root iteration did not converge; carries whatever estimates were reached.
class RootFindingError : public NumericalError {
 public:
  RootFindingError(const std::string& what, std::vector<std::complex<double>> partial)
      : NumericalError(what), partial_(std::move(partial)) {}

  const std::vector<std::complex<double>>& partial_roots() const noexcept { return partial_; }

 private:
  std::vector<std::complex<double>> partial_;
};

/// Internal results disagree with each other (unpaired complex level, failed PT test, ...).
class ConsistencyError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace qes
