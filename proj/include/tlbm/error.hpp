#pragma once

#include <stdexcept>
#include <string>

namespace tlbm {

/// Invalid user configuration (unknown model, indivisible extents, ...).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition of an API call was broken by the caller.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Physical quantity outside its domain (rho <= 0, T <= 0, ...).
class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A site produced degenerate moments during a step.
class StepError : public DomainError {
 public:
  StepError(const std::string& what, int x, int y)
      : DomainError(what + " at site (" + std::to_string(x) + ", " + std::to_string(y) + ")"),
        x_(x),
        y_(y) {}

  int x() const noexcept { return x_; }
  int y() const noexcept { return y_; }

 private:
  int x_;
  int y_;
};

/// Halo-exchange message did not match what the receiver expected.
class ProtocolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Failure of the simulated multi-rank runtime (stall, aborted peer, ...).
class RuntimeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A model variant requested outside the inputs it is defined for.
class UnsupportedCase : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class AllocationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace tlbm
