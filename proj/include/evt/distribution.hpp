#ifndef EVT_DISTRIBUTION_HPP
#define EVT_DISTRIBUTION_HPP

#include <functional>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>

#include "evt/errors.hpp"

namespace evt {

using RealFn = std::function<double(double)>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct SupportInterval {
  double lower = -kInf;
  double upper = kInf;  // x0, the upper limit of the support

  bool contains_interior(double x) const { return x > lower && x < upper; }
};

// F(x) = 1 - c * exp(-G(x)) with G(x) the cumulative of 1/g from z0.
// g is the auxiliary function; 1/g is the hazard rate.
struct VonMisesSpec {
  double c = 1.0;
  double z0 = 0.0;
  double x0 = kInf;
  RealFn g;             // required, > 0 on (z0, x0)
  RealFn g_derivative;  // optional
  RealFn big_g;         // optional closed-form G; cached quadrature otherwise
  // optional psi^(k)(u) with psi = log g, needed for the Taylor-gap series
  std::function<double(int, double)> log_g_derivative;
};

struct GumbelParams {
  double mu = 0.0;
  double beta = 1.0;
};

// Capability record for a continuous scalar law. Values are immutable after
// construction and safe to share across threads.
struct Distribution {
  std::string name;
  SupportInterval support;
  RealFn cdf;
  RealFn log_cdf;
  RealFn pdf;
  RealFn log_pdf;
  RealFn quantile;           // (0,1) -> x
  RealFn quantile_survival;  // s -> x with 1 - F(x) = s; stable for tiny s
  RealFn closed_form_score;  // optional
  std::optional<VonMisesSpec> von_mises;
  RealFn norming_b_from_log_n;  // optional closed-form b_n as a fn of log n
};

// log(1 - exp(lc)) for lc = log F <= 0, accurate in both regimes.
double log1mexp(double log_cdf_value);

// log of the survival function 1 - F(x).
double log_survival(const Distribution& dist, double x);

// Theta(x) = log f(x) - log F(x). Closed form when the law provides one.
// Points where log F is not finite (true or numeric -inf) are domain errors:
// every returned score is a finite real.
double max_score(const Distribution& dist, double x);

// Theta via the von Mises representation:
// -log g(x) + log(1 - F(x)) - log F(x).
double max_score_vonmises(const VonMisesSpec& spec, const Distribution& dist,
                          double x);

// Hazard rate f(x) / (1 - F(x)); equals 1/g(x) for von Mises laws.
double hazard(const Distribution& dist, double x);

// Rebuild F(x) = exp(-int_x^inf e^{theta(u)} du) from a score function.
// The tail integral is scanned in doubling blocks until a block integrates
// below 1e-12; scanning past x + tail_budget raises divergence_error.
double cdf_from_score(const RealFn& theta, double x, double tail_budget = 400.0);

Distribution make_exponential(double lambda);
Distribution make_gumbel(const GumbelParams& params);
inline Distribution make_gumbel(double mu, double beta) {
  return make_gumbel(GumbelParams{mu, beta});
}
// Gnedenko's bounded example: F(x) = 1 - exp(-x/(1-x)) on (0, 1).
Distribution make_gnedenko();
Distribution make_von_mises(const VonMisesSpec& spec, std::string name = "custom");

// Plain-text key=value spec loader (keys: c, z0, x0, g_expr, optional name).
// See README for the format and the g_expr grammar.
Distribution load_von_mises_spec(std::istream& in, const std::string& origin = "<stream>");
Distribution load_von_mises_file(const std::string& path);

}  // namespace evt

#endif  // EVT_DISTRIBUTION_HPP
