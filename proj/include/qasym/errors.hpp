#pragma once

#include <stdexcept>
#include <string>

namespace qasym {

/// Invalid argument: out-of-range parameter, dimension mismatch, malformed input.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A scalar function was asked to act outside its domain (e.g. log of a
/// non-positive eigenvalue).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Support condition violated (A not << B where the formula needs it).
class SupportError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Numerical failure: non-convergence, loss of accuracy.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qasym
