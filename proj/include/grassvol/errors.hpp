#pragma once

#include <stdexcept>
#include <string>

namespace grassvol {

/// Invalid dimensions, radii, or other caller-supplied values.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A requested size exceeds what the implementation supports (e.g. p above the
/// exact-determinant cap).
class UnsupportedSizeError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// The closed-form table has no entry for the requested triple.
class NotTabulatedError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A quadrature did not reach its tolerance. Carries the best estimate.
class AccuracyError : public std::runtime_error {
 public:
  AccuracyError(const std::string& what, double best_estimate, double achieved_tol)
      : std::runtime_error(what), best_estimate_(best_estimate), achieved_tol_(achieved_tol) {}

  double best_estimate() const noexcept { return best_estimate_; }
  double achieved_tolerance() const noexcept { return achieved_tol_; }

 private:
  double best_estimate_;
  double achieved_tol_;
};

/// An internal consistency check failed. Indicates a bug, not bad input.
class InvariantError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace grassvol
