#pragma once

#include <stdexcept>
#include <string>

namespace lfbloch {

// Invalid argument outside an operation's mathematical domain.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// (4pi/3) p N >= 1: the Clausius-Mossotti relation has no finite solution.
class PolarizationCatastrophe : public DomainError {
 public:
  using DomainError::DomainError;
};

// A denominator that vanishes at resonance.
class SingularityError : public DomainError {
 public:
  using DomainError::DomainError;
};

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IntegrationDiverged : public NumericalError {
 public:
  IntegrationDiverged(const std::string& what, double last_good_time)
      : NumericalError(what), last_good_time_(last_good_time) {}

  double last_good_time() const noexcept { return last_good_time_; }

 private:
  double last_good_time_;
};

class UnmeasurableError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class ConvergenceError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class EmptyBranchError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace lfbloch
