#pragma once

#include <stdexcept>
#include <string>

namespace hypermoment {

// Invalid input: bad dimensions, malformed indices, non-admissible states.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A state whose temperature tensor is not symmetric positive definite.
class AdmissibilityError : public DomainError {
 public:
  AdmissibilityError(const std::string& what, double min_eigenvalue, long cell = -1)
      : DomainError(what), min_eigenvalue_(min_eigenvalue), cell_(cell) {}
  double min_eigenvalue() const { return min_eigenvalue_; }
  long cell() const { return cell_; }

 private:
  double min_eigenvalue_;
  long cell_;
};

// Something went wrong numerically even though the input was valid.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace hypermoment
