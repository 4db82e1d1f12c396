#ifndef EVT_SPECFUN_HPP
#define EVT_SPECFUN_HPP

#include <cstdint>
#include <vector>

#include "evt/errors.hpp"

namespace evt {

// Euler-Mascheroni constant.
inline constexpr double kEulerGamma = 0.5772156649015329;

// H_n = 1 + 1/2 + ... + 1/n by direct summation, smallest terms first.
double harmonic(std::uint64_t n);

// Prefix table of harmonic numbers; values[n-1] = H_n built by the exact
// recurrence H_n = H_{n-1} + 1/n in working precision.
class HarmonicTable {
 public:
  explicit HarmonicTable(std::uint64_t max_n);
  double operator[](std::uint64_t n) const;  // 1-based
  std::uint64_t size() const { return values_.size(); }

 private:
  std::vector<double> values_;
};

double euler_gamma();

// Gamma function for x > 0 (Lanczos approximation, g = 7, 9 terms).
double gamma_fn(double x);

// k-th derivative of Gamma at 1, 0 <= k <= 8, from the Leibniz recurrence on
// Gamma' = Gamma * psi0 with polygamma values psi^(m)(1) tabulated via zeta.
double gamma_derivative_at_1(int k);

}  // namespace evt

#endif  // EVT_SPECFUN_HPP
