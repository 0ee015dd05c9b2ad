#pragma once

#include <stdexcept>
#include <string>

namespace vipos {

/// Iterative numerical routine failed (bracket failure, non-finite value,
/// iteration cap reached).
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what, double residual = 0.0)
      : std::runtime_error(what), residual_(residual) {}

  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// The operation needs an oracle the problem does not provide.
class UnsupportedOperation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Confidence interval cannot be formed from the batch statistics.
class DegenerateInterval : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace vipos
