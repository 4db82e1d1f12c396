#include "evt/normalize.hpp"

#include <cmath>
#include <string>

#include "evt/numerics.hpp"

namespace evt {

namespace {

double survival(const Distribution& dist, double x) {
  return std::exp(log_survival(dist, x));
}

double require_aux(const Distribution& dist, double b) {
  if (!dist.von_mises)
    throw unsupported_error(dist.name +
                            ": norming needs a von Mises spec (for a_n = g(b_n))");
  const double a = dist.von_mises->g(b);
  if (!std::isfinite(a) || a <= 0.0)
    throw domain_error(dist.name + ": auxiliary function not positive at b_n");
  return a;
}

}  // namespace

NormingConstants norming_constants(const Distribution& dist, std::uint64_t n) {
  if (n == 0) throw domain_error("norming_constants: n must be >= 1");
  const double log_n = std::log(static_cast<double>(n));

  if (n == 1 && !std::isfinite(dist.support.lower))
    throw domain_error(dist.name +
                       ": n = 1 has no finite b_1 (support unbounded below); "
                       "use an explicit norming instead");

  double b;
  if (dist.norming_b_from_log_n) {
    b = dist.norming_b_from_log_n(log_n);
  } else if (dist.von_mises) {
    if (n == 1) {
      b = dist.support.lower;
    } else {
      const double inv_n = 1.0 / static_cast<double>(n);
      auto f = [&](double x) { return survival(dist, x) - inv_n; };
      // Expand a bracket around the spec anchor; survival runs 1 -> 0.
      const double z0 = dist.von_mises->z0;
      double lo = std::isfinite(dist.support.lower) ? dist.support.lower
                                                    : std::min(z0, 0.0) - 1.0;
      int guard = 0;
      while (!(f(lo) > 0.0)) {
        if (std::isfinite(dist.support.lower))
          throw domain_error(dist.name + ": no b_n with 1 - F(b_n) = 1/n");
        lo = 2.0 * lo - 1.0;
        if (++guard > 70)
          throw domain_error(dist.name + ": no b_n with 1 - F(b_n) = 1/n");
      }
      double hi;
      const double x0 = dist.support.upper;
      if (std::isfinite(x0)) {
        hi = x0 - 0.5 * (x0 - lo);
        guard = 0;
        while (!(f(hi) < 0.0)) {
          hi = x0 - 0.5 * (x0 - hi);
          if (++guard > 60)
            throw domain_error(dist.name + ": no b_n with 1 - F(b_n) = 1/n");
        }
      } else {
        hi = std::max(z0, lo) + 1.0;
        guard = 0;
        while (!(f(hi) < 0.0)) {
          hi = 2.0 * hi + 1.0;
          if (++guard > 70)
            throw domain_error(dist.name + ": no b_n with 1 - F(b_n) = 1/n");
        }
      }
      b = find_root(f, lo, hi, 1e-12).root;
    }
  } else {
    throw unsupported_error(
        dist.name + ": no von Mises spec and no closed-form norming registered");
  }
  const double a = require_aux(dist, b);
  return {n, a, b};
}

NormalizedMax normalized_max(const Distribution& dist, std::uint64_t n) {
  return {dist, n, norming_constants(dist, n)};
}

NormalizedMax normalized_max(const Distribution& dist, std::uint64_t n,
                             const NormingConstants& norming) {
  if (n == 0) throw domain_error("normalized_max: n must be >= 1");
  if (!(norming.a > 0.0))
    throw domain_error("normalized_max: scale a must be > 0");
  NormingConstants c = norming;
  c.n = n;
  return {dist, n, c};
}

double normalized_max_log_cdf(const NormalizedMax& nm, double x) {
  const double y = nm.norming.a * x + nm.norming.b;
  if (y <= nm.base.support.lower) return -kInf;
  if (y >= nm.base.support.upper) return 0.0;
  return static_cast<double>(nm.n) * nm.base.log_cdf(y);
}

double normalized_max_cdf(const NormalizedMax& nm, double x) {
  return std::exp(normalized_max_log_cdf(nm, x));
}

double normalized_max_score(const NormalizedMax& nm, double z) {
  const double y = nm.norming.a * z + nm.norming.b;
  return std::log(static_cast<double>(nm.n) * nm.norming.a) +
         max_score(nm.base, y);
}

double max_quantile_from_log(const Distribution& dist, std::uint64_t n,
                             double log_u) {
  const double log_v = log_u / static_cast<double>(n);
  if (dist.quantile_survival) {
    const double s = -std::expm1(log_v);  // 1 - u^{1/n}, exact for tiny values
    if (s > 0.0 && s < 1.0) return dist.quantile_survival(s);
  }
  return dist.quantile(std::exp(log_v));
}

double max_quantile(const Distribution& dist, std::uint64_t n, double u) {
  if (!(u > 0.0 && u < 1.0))
    throw domain_error("max_quantile: u must be in (0,1)");
  return max_quantile_from_log(dist, n, std::log(u));
}

double normalized_quantile(const NormalizedMax& nm, double u) {
  return (max_quantile(nm.base, nm.n, u) - nm.norming.b) / nm.norming.a;
}

Distribution as_distribution(const NormalizedMax& nm) {
  Distribution d;
  d.name = nm.base.name + "_max" + std::to_string(nm.n);
  const double a = nm.norming.a, b = nm.norming.b;
  const double n_real = static_cast<double>(nm.n);
  d.support = {(nm.base.support.lower - b) / a, (nm.base.support.upper - b) / a};
  // value capture: the wrapped law owns an immutable copy of the base
  NormalizedMax self = nm;
  d.cdf = [self](double x) { return normalized_max_cdf(self, x); };
  d.log_cdf = [self](double x) { return normalized_max_log_cdf(self, x); };
  d.log_pdf = [self, a, b, n_real](double x) {
    const double y = a * x + b;
    return std::log(n_real * a) + self.base.log_pdf(y) +
           (n_real - 1.0) * self.base.log_cdf(y);
  };
  d.pdf = [d_log_pdf = d.log_pdf](double x) { return std::exp(d_log_pdf(x)); };
  d.quantile = [self](double u) { return normalized_quantile(self, u); };
  d.quantile_survival = [self](double s) {
    if (!(s > 0.0 && s < 1.0))
      throw domain_error("quantile_survival: s must be in (0,1)");
    const double x =
        max_quantile_from_log(self.base, self.n, std::log1p(-s));
    return (x - self.norming.b) / self.norming.a;
  };
  if (nm.base.closed_form_score) {
    d.closed_form_score = [self](double z) {
      return normalized_max_score(self, z);
    };
  }
  return d;
}

}  // namespace evt
