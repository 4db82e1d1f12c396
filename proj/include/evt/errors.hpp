#ifndef EVT_ERRORS_HPP
#define EVT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace evt {

// Base class for everything thrown by this library.
class error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation
// (score where the cdf vanishes, harmonic(0), gamma of a non-positive x, ...).
class domain_error : public error {
 public:
  using error::error;
};

// Root bracket endpoints do not straddle a sign change.
class bracket_error : public error {
 public:
  using error::error;
};

// Iteration budget exhausted before reaching the requested tolerance.
class budget_error : public error {
 public:
  using error::error;
};

// An integrand or estimator callback produced a non-finite value.
class evaluation_error : public error {
 public:
  evaluation_error(const std::string& msg, double at) : error(msg), at_(at) {}
  double at() const { return at_; }

 private:
  double at_;
};

// An integral/expectation failed to converge. Carries the partial value so
// callers can report it instead of a silent number.
class divergence_error : public error {
 public:
  divergence_error(const std::string& msg, double partial, double error_estimate)
      : error(msg), partial_(partial), error_estimate_(error_estimate) {}
  double partial() const { return partial_; }
  double error_estimate() const { return error_estimate_; }

 private:
  double partial_;
  double error_estimate_;
};

// Operation requires a capability the distribution does not provide
// (missing von Mises spec, missing derivative callbacks, ...).
class unsupported_error : public error {
 public:
  using error::error;
};

// Malformed config file or expression text.
class parse_error : public error {
 public:
  using error::error;
};

}  // namespace evt

#endif  // EVT_ERRORS_HPP
