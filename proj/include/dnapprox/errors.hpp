#pragma once

#include <stdexcept>
#include <string>

namespace dnapprox {

/// Precondition or parameter violation (bad dimension, singular matrix, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// An enumeration or dynamic program would exceed its configured size budget.
class BudgetError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// A numerical routine failed to reach the requested accuracy. Carries the
/// best estimate obtained and its error estimate.
class AccuracyError : public std::runtime_error {
 public:
  AccuracyError(const std::string& what, double estimate, double error)
      : std::runtime_error(what), estimate_(estimate), error_(error) {}

  double estimate() const { return estimate_; }
  double error() const { return error_; }

 private:
  double estimate_;
  double error_;
};

}  // namespace dnapprox
