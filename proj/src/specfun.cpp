#include "evt/specfun.hpp"

#include <array>
#include <cmath>
#include <string>

namespace evt {

double harmonic(std::uint64_t n) {
  if (n == 0) throw domain_error("harmonic: n must be >= 1");
  // smallest terms first, Kahan-compensated: stays within ~1 ulp up to 10^6
  double sum = 0.0, carry = 0.0;
  for (std::uint64_t i = n; i >= 1; --i) {
    const double term = 1.0 / static_cast<double>(i) - carry;
    const double next = sum + term;
    carry = (next - sum) - term;
    sum = next;
  }
  return sum;
}

HarmonicTable::HarmonicTable(std::uint64_t max_n) {
  if (max_n == 0) throw domain_error("HarmonicTable: max_n must be >= 1");
  values_.reserve(max_n);
  double h = 0.0;
  for (std::uint64_t i = 1; i <= max_n; ++i) {
    h += 1.0 / static_cast<double>(i);
    values_.push_back(h);
  }
}

double HarmonicTable::operator[](std::uint64_t n) const {
  if (n == 0 || n > values_.size())
    throw domain_error("HarmonicTable: index out of range");
  return values_[n - 1];
}

double euler_gamma() { return kEulerGamma; }

double gamma_fn(double x) {
  if (!(x > 0.0)) throw domain_error("gamma_fn: requires x > 0");
  // Lanczos, g = 7, n = 9 (Godfrey coefficients).
  static constexpr std::array<double, 9> c = {
      0.99999999999980993,      676.5203681218851,     -1259.1392167224028,
      771.32342877765313,       -176.61502916214059,   12.507343278686905,
      -0.13857109526572012,     9.9843695780195716e-6, 1.5056327351493116e-7};
  if (x < 0.5) {
    // Reflection keeps full relative accuracy on (0, 0.5).
    return M_PI / (std::sin(M_PI * x) * gamma_fn(1.0 - x));
  }
  const double z = x - 1.0;
  double a = c[0];
  for (int i = 1; i < 9; ++i) a += c[i] / (z + i);
  const double t = z + 7.5;
  return std::sqrt(2.0 * M_PI) * std::pow(t, z + 0.5) * std::exp(-t) * a;
}

double gamma_derivative_at_1(int k) {
  if (k < 0) throw domain_error("gamma_derivative_at_1: k must be >= 0");
  if (k > 8)
    throw unsupported_error(
        "gamma_derivative_at_1: orders above 8 are not tabulated");
  // psi^(m)(1) = -gamma for m = 0, (-1)^(m+1) m! zeta(m+1) for m >= 1.
  static constexpr std::array<double, 8> zeta = {
      1.6449340668482264,  // zeta(2)
      1.2020569031595943,  // zeta(3)
      1.0823232337111382,  // zeta(4)
      1.0369277551433699,  // zeta(5)
      1.0173430619844491,  // zeta(6)
      1.0083492773819228,  // zeta(7)
      1.0040773561979443,  // zeta(8)
      1.0020083928260822,  // zeta(9)
  };
  std::array<double, 9> psi{};  // psi[m] = psi^(m)(1)
  psi[0] = -kEulerGamma;
  double factorial = 1.0;
  for (int m = 1; m <= 8; ++m) {
    factorial *= m;
    psi[m] = ((m % 2 == 0) ? -1.0 : 1.0) * factorial * zeta[m - 1];
  }
  // d[j] = Gamma^(j)(1); Leibniz on Gamma^(j+1) = (Gamma * psi0)^(j).
  std::array<double, 9> d{};
  d[0] = 1.0;
  for (int j = 0; j < k; ++j) {
    double binom = 1.0;
    double next = 0.0;
    for (int i = 0; i <= j; ++i) {
      next += binom * d[i] * psi[j - i];
      binom = binom * (j - i) / (i + 1.0);
    }
    d[j + 1] = next;
  }
  return d[k];
}

}  // namespace evt
