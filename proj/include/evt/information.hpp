#ifndef EVT_INFORMATION_HPP
#define EVT_INFORMATION_HPP

#include <cstdint>

#include "evt/normalize.hpp"
#include "evt/numerics.hpp"

namespace evt {

// The four additive terms of the first relative-entropy bracket plus the
// MGF bracket, for D(N_n || Gumbel(0,1)):
//   total = (score_gap + harmonic_gap + 1/n + mean_term) + mgf_bracket.
struct KlDecomposition {
  double score_gap = 0.0;     // log g(b_n) - E log g(M_n)
  double harmonic_gap = 0.0;  // log n - H_n
  double inv_n = 0.0;         // 1/n
  double mean_term = 0.0;     // E N_n
  double mgf_bracket = 0.0;   // E e^{-N_n} - 1
  double total = 0.0;
};

// H(X) = 1 - E Theta(X).
double entropy_via_score(const Distribution& dist, double tol = kDefaultQuadTol);

// H(X) = -E log f(X); independent cross-check of the score route.
double entropy_direct(const Distribution& dist, double tol = kDefaultQuadTol);

// D(X || Gumbel(mu, beta)) =
//   (E Theta_X + log beta + (E X - mu)/beta) + (E e^{-(X-mu)/beta} - 1).
double kl_to_gumbel(const Distribution& dist, const GumbelParams& target,
                    double tol = kDefaultQuadTol);

// Term-by-term decomposition; standard target (mu = 0, beta = 1) only.
KlDecomposition kl_decomposition(const NormalizedMax& nm,
                                 const GumbelParams& target = {0.0, 1.0},
                                 double tol = kDefaultQuadTol);

// E log F_X(M_n); analytically -1/n for every continuous law.
double expected_log_cdf_at_max(const Distribution& dist, std::uint64_t n,
                               double tol = kDefaultQuadTol);

// -E log(1 - F_X(M_n)); analytically H_n for every continuous law.
double expected_log_tail_at_max(const Distribution& dist, std::uint64_t n,
                                double tol = kDefaultQuadTol);

// E e^{tX} by quadrature; throws divergence_error when the tail defeats the
// panel budget (e.g. exponential with t >= lambda).
double mgf(const Distribution& dist, double t, double tol = kDefaultQuadTol);

// E N_n^k by quadrature. The limit target (-1)^k Gamma^(k)(1) is exposed by
// moment_limit.
double moment(const NormalizedMax& nm, int k, double tol = kDefaultQuadTol);
double moment_limit(int k);

// Taylor-gap series sum_{k=1..K} psi^(k)(b_n) g(b_n)^k / k! * E N_n^k with
// psi = log g; approximates E log g(M_n) - log g(b_n). Needs the spec's
// log_g_derivative callback.
double taylor_gap(const VonMisesSpec& spec, const NormalizedMax& nm, int big_k,
                  double tol = kDefaultQuadTol);

}  // namespace evt

#endif  // EVT_INFORMATION_HPP
