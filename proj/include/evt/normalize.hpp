#ifndef EVT_NORMALIZE_HPP
#define EVT_NORMALIZE_HPP

#include <cstdint>

#include "evt/distribution.hpp"

namespace evt {

struct NormingConstants {
  std::uint64_t n = 1;
  double a = 1.0;  // scale, g(b_n)
  double b = 0.0;  // location, solves 1 - F(b_n) = 1/n
};

// The law of N_n = (M_n - b_n)/a_n with M_n the maximum of n copies of base;
// cdf(x) = F_base(a x + b)^n.
struct NormalizedMax {
  Distribution base;
  std::uint64_t n = 1;
  NormingConstants norming;
};

// Solve 1 - F(b_n) = 1/n (equivalently G(b_n) = log(c n)) and set
// a_n = g(b_n). Closed forms are used when the law registers them.
// n = 1 needs a finite lower support edge; laws unbounded below reject it.
NormingConstants norming_constants(const Distribution& dist, std::uint64_t n);

NormalizedMax normalized_max(const Distribution& dist, std::uint64_t n);
// Explicit constants (e.g. the identity norming a = 1, b = 0).
NormalizedMax normalized_max(const Distribution& dist, std::uint64_t n,
                             const NormingConstants& norming);

// F_base(a x + b)^n, computed as exp(n log F) and clamped at support edges.
double normalized_max_cdf(const NormalizedMax& nm, double x);
double normalized_max_log_cdf(const NormalizedMax& nm, double x);

// Theta_{N_n}(z) = log(n a_n) + Theta_base(a_n z + b_n).
double normalized_max_score(const NormalizedMax& nm, double z);

// Q_{N_n}(u) = (Q_base(u^{1/n}) - b_n)/a_n, with u^{1/n} taken in log space.
double normalized_quantile(const NormalizedMax& nm, double u);

// Quantile of M_n itself: Q_base(u^{1/n}).
double max_quantile(const Distribution& dist, std::uint64_t n, double u);

// Same, taking log(u); keeps full precision for u near both endpoints.
double max_quantile_from_log(const Distribution& dist, std::uint64_t n,
                             double log_u);

// Package the normalized maximum as a Distribution of its own.
Distribution as_distribution(const NormalizedMax& nm);

}  // namespace evt

#endif  // EVT_NORMALIZE_HPP
