#include "evt/information.hpp"

#include <cmath>
#include <string>

#include "evt/specfun.hpp"

namespace evt {

namespace {

// Minimal quantile-capability wrapper for the law of M_n; enough for the
// expectation ladder, which only ever inverts the cdf.
Distribution max_law(const Distribution& base, std::uint64_t n) {
  Distribution d;
  d.name = base.name + "_max" + std::to_string(n);
  d.support = base.support;
  d.quantile = [base, n](double u) { return max_quantile(base, n, u); };
  d.quantile_survival = [base, n](double s) {
    return max_quantile_from_log(base, n, std::log1p(-s));
  };
  return d;
}

// E h(M_n), via quantile reparameterization.
QuadratureResult expectation_at_max(const Distribution& dist, std::uint64_t n,
                                    const RealFn& h, double tol) {
  return expectation(max_law(dist, n), h, tol);
}

double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

}  // namespace

double entropy_via_score(const Distribution& dist, double tol) {
  const auto score = [&dist](double x) { return max_score(dist, x); };
  return 1.0 - expectation(dist, score, tol).value;
}

double entropy_direct(const Distribution& dist, double tol) {
  const auto log_pdf = [&dist](double x) { return dist.log_pdf(x); };
  return -expectation(dist, log_pdf, tol).value;
}

double kl_to_gumbel(const Distribution& dist, const GumbelParams& target,
                    double tol) {
  const double mu = target.mu, beta = target.beta;
  if (!(beta > 0.0)) throw domain_error("kl_to_gumbel: target beta must be > 0");
  const double mean_score =
      expectation(dist, [&](double x) { return max_score(dist, x); }, tol).value;
  const double mean = expectation(dist, [](double x) { return x; }, tol).value;
  const double mgf_term =
      expectation(dist, [&](double x) { return std::exp(-(x - mu) / beta); },
                  tol)
          .value;
  return (mean_score + std::log(beta) + (mean - mu) / beta) + (mgf_term - 1.0);
}

KlDecomposition kl_decomposition(const NormalizedMax& nm,
                                 const GumbelParams& target, double tol) {
  if (target.mu != 0.0 || target.beta != 1.0)
    throw unsupported_error(
        "kl_decomposition: only the standard Gumbel target (mu=0, beta=1) is "
        "decomposed; use kl_to_gumbel for general targets");
  if (!nm.base.von_mises)
    throw unsupported_error(nm.base.name +
                            ": kl_decomposition needs a von Mises spec");
  const VonMisesSpec& vm = *nm.base.von_mises;
  const double n_real = static_cast<double>(nm.n);

  KlDecomposition dec;
  const double log_g_b = std::log(vm.g(nm.norming.b));
  const double mean_log_g =
      expectation_at_max(nm.base, nm.n,
                         [&vm](double x) { return std::log(vm.g(x)); }, tol)
          .value;
  dec.score_gap = log_g_b - mean_log_g;
  dec.harmonic_gap = std::log(n_real) - harmonic(nm.n);
  dec.inv_n = 1.0 / n_real;
  const Distribution law_n = as_distribution(nm);
  dec.mean_term = expectation(law_n, [](double x) { return x; }, tol).value;
  dec.mgf_bracket =
      expectation(law_n, [](double x) { return std::exp(-x); }, tol).value -
      1.0;
  dec.total = (dec.score_gap + dec.harmonic_gap + dec.inv_n + dec.mean_term) +
              dec.mgf_bracket;
  return dec;
}

double expected_log_cdf_at_max(const Distribution& dist, std::uint64_t n,
                               double tol) {
  if (n == 0) throw domain_error("expected_log_cdf_at_max: n must be >= 1");
  return expectation_at_max(
             dist, n, [&dist](double x) { return dist.log_cdf(x); }, tol)
      .value;
}

double expected_log_tail_at_max(const Distribution& dist, std::uint64_t n,
                                double tol) {
  if (n == 0) throw domain_error("expected_log_tail_at_max: n must be >= 1");
  return -expectation_at_max(
              dist, n, [&dist](double x) { return log_survival(dist, x); },
              tol)
      .value;
}

double mgf(const Distribution& dist, double t, double tol) {
  return expectation(dist, [t](double x) { return std::exp(t * x); }, tol)
      .value;
}

double moment(const NormalizedMax& nm, int k, double tol) {
  if (k < 0) throw domain_error("moment: k must be >= 0");
  if (k == 0) return 1.0;
  return expectation(as_distribution(nm),
                     [k](double x) { return std::pow(x, k); }, tol)
      .value;
}

double moment_limit(int k) {
  const double sign = (k % 2 == 0) ? 1.0 : -1.0;
  return sign * gamma_derivative_at_1(k);
}

double taylor_gap(const VonMisesSpec& spec, const NormalizedMax& nm, int big_k,
                  double tol) {
  if (big_k < 1) throw domain_error("taylor_gap: K must be >= 1");
  if (!spec.log_g_derivative)
    throw unsupported_error(
        "taylor_gap: spec carries no log-g derivative callback");
  const double b = nm.norming.b;
  const double g_b = spec.g(b);
  double sum = 0.0;
  double g_pow = 1.0;
  for (int k = 1; k <= big_k; ++k) {
    g_pow *= g_b;
    const double psi_k = spec.log_g_derivative(k, b);
    sum += psi_k * g_pow / factorial(k) * moment(nm, k, tol);
  }
  return sum;
}

}  // namespace evt
