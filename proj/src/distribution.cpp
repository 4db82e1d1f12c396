#include "evt/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>
#include <vector>

#include "evt/expr.hpp"
#include "evt/numerics.hpp"

namespace evt {

namespace {

constexpr double kGTol = 1e-12;        // tolerance of each cumulative-hazard integral
constexpr double kQuantileTol = 1e-12; // |D - target| at the solved quantile

double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

}  // namespace

double log1mexp(double log_cdf_value) {
  if (log_cdf_value > 0.0)
    throw domain_error("log1mexp: argument must be <= 0");
  if (log_cdf_value == 0.0) return -kInf;
  if (log_cdf_value > -M_LN2) return std::log(-std::expm1(log_cdf_value));
  return std::log1p(-std::exp(log_cdf_value));
}

double log_survival(const Distribution& dist, double x) {
  if (x <= dist.support.lower) return 0.0;
  if (x >= dist.support.upper) return -kInf;
  return log1mexp(dist.log_cdf(x));
}

double max_score(const Distribution& dist, double x) {
  if (!dist.support.contains_interior(x))
    throw domain_error(dist.name + ": max_score: x outside the support interior");
  if (dist.closed_form_score) return dist.closed_form_score(x);
  const double lc = dist.log_cdf(x);
  if (!std::isfinite(lc))
    throw domain_error(dist.name + ": max_score undefined where the cdf vanishes");
  const double lp = dist.log_pdf(x);
  if (!std::isfinite(lp))
    throw domain_error(dist.name + ": max_score undefined where the density vanishes");
  return lp - lc;
}

double max_score_vonmises(const VonMisesSpec& spec, const Distribution& dist,
                          double x) {
  if (!dist.support.contains_interior(x))
    throw domain_error(dist.name + ": max_score: x outside the support interior");
  const double ls = log_survival(dist, x);
  if (!std::isfinite(ls))
    throw domain_error(dist.name + ": tail-log undefined: F(x) = 1");
  const double lc = dist.log_cdf(x);
  if (!std::isfinite(lc))
    throw domain_error(dist.name + ": max_score undefined where the cdf vanishes");
  const double gx = spec.g(x);
  if (!std::isfinite(gx) || gx <= 0.0)
    throw domain_error(dist.name + ": auxiliary function g must be positive");
  return -std::log(gx) + ls - lc;
}

double hazard(const Distribution& dist, double x) {
  if (x >= dist.support.upper)
    throw domain_error(dist.name + ": hazard undefined: F(x) = 1");
  if (x <= dist.support.lower) return 0.0;
  const double ls = log_survival(dist, x);
  if (!std::isfinite(ls))
    throw domain_error(dist.name + ": hazard undefined: F(x) = 1");
  return std::exp(dist.log_pdf(x) - ls);
}

double cdf_from_score(const RealFn& theta, double x, double tail_budget) {
  double total = 0.0;
  double total_err = 0.0;
  double lo = x;
  double width = 1.0;
  for (;;) {
    const double hi = lo + width;
    const QuadratureResult block =
        integrate([&](double u) { return std::exp(theta(u)); }, lo, hi, 1e-12);
    total += block.value;
    total_err += block.error_estimate;
    if (block.value < 1e-12) break;
    lo = hi;
    width *= 2.0;
    if (lo - x > tail_budget)
      throw divergence_error(
          "cdf_from_score: tail integral still significant past x + tail_budget",
          std::exp(-total), total_err);
  }
  return std::exp(-total);
}

// ---------------------------------------------------------------------------
// Built-in laws
// ---------------------------------------------------------------------------

Distribution make_exponential(double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw domain_error("make_exponential: lambda must be finite and > 0");
  Distribution d;
  d.name = "exponential";
  d.support = {0.0, kInf};
  d.cdf = [lambda](double x) { return x <= 0.0 ? 0.0 : -std::expm1(-lambda * x); };
  d.log_cdf = [lambda](double x) {
    if (x <= 0.0) return -kInf;
    return log1mexp(-lambda * x);
  };
  d.pdf = [lambda](double x) { return x <= 0.0 ? 0.0 : lambda * std::exp(-lambda * x); };
  d.log_pdf = [lambda](double x) {
    return x <= 0.0 ? -kInf : std::log(lambda) - lambda * x;
  };
  d.quantile = [lambda](double u) {
    if (!(u > 0.0 && u < 1.0)) throw domain_error("quantile: u must be in (0,1)");
    return -std::log1p(-u) / lambda;
  };
  d.quantile_survival = [lambda](double s) {
    if (!(s > 0.0 && s < 1.0)) throw domain_error("quantile_survival: s must be in (0,1)");
    return -std::log(s) / lambda;
  };
  d.closed_form_score = [lambda](double x) {
    return std::log(lambda) - lambda * x - log1mexp(-lambda * x);
  };
  VonMisesSpec vm;
  vm.c = 1.0;
  vm.z0 = 0.0;
  vm.x0 = kInf;
  vm.g = [lambda](double) { return 1.0 / lambda; };
  vm.g_derivative = [](double) { return 0.0; };
  vm.big_g = [lambda](double x) { return lambda * x; };
  vm.log_g_derivative = [](int, double) { return 0.0; };
  d.von_mises = vm;
  d.norming_b_from_log_n = [lambda](double log_n) { return log_n / lambda; };
  return d;
}

Distribution make_gumbel(const GumbelParams& params) {
  const double mu = params.mu, beta = params.beta;
  if (!(beta > 0.0) || !std::isfinite(beta) || !std::isfinite(mu))
    throw domain_error("make_gumbel: requires finite mu and beta > 0");
  Distribution d;
  d.name = "gumbel";
  d.support = {-kInf, kInf};
  auto w_of = [mu, beta](double x) { return std::exp(-(x - mu) / beta); };
  d.cdf = [w_of](double x) { return std::exp(-w_of(x)); };
  d.log_cdf = [w_of](double x) { return -w_of(x); };
  d.pdf = [mu, beta, w_of](double x) {
    const double w = w_of(x);
    return std::isinf(w) ? 0.0 : w * std::exp(-w) / beta;
  };
  d.log_pdf = [mu, beta](double x) {
    const double z = (x - mu) / beta;
    return -std::log(beta) - z - std::exp(-z);
  };
  d.quantile = [mu, beta](double u) {
    if (!(u > 0.0 && u < 1.0)) throw domain_error("quantile: u must be in (0,1)");
    return mu - beta * std::log(-std::log(u));
  };
  d.quantile_survival = [mu, beta](double s) {
    if (!(s > 0.0 && s < 1.0)) throw domain_error("quantile_survival: s must be in (0,1)");
    return mu - beta * std::log(-std::log1p(-s));
  };
  d.closed_form_score = [mu, beta](double x) {
    return -std::log(beta) - (x - mu) / beta;
  };
  // Tail representation anchored at z0 = mu, where F(mu) = exp(-1):
  // c = 1 - exp(-1) and G(x) = log(c / (1 - F(x))).
  const double c = -std::expm1(-1.0);
  VonMisesSpec vm;
  vm.c = c;
  vm.z0 = mu;
  vm.x0 = kInf;
  vm.g = [mu, beta, w_of](double x) {
    const double w = w_of(x);
    if (w < 1e-8) return beta * (1.0 + 0.5 * w);  // (e^w - 1)/w -> 1
    return beta * std::expm1(w) / w;
  };
  vm.g_derivative = [w_of](double x) {
    const double w = w_of(x);
    if (w < 1e-8) return 0.5 * w;  // limit of -(e^w (w-1) + 1)/w
    return -(std::exp(w) * (w - 1.0) + 1.0) / w;
  };
  vm.big_g = [c, w_of](double x) {
    // log(c) - log(1 - F(x)) with 1 - F = -expm1(-w)
    const double w = w_of(x);
    const double log_surv = w > M_LN2 ? std::log1p(-std::exp(-w))
                                      : std::log(-std::expm1(-w));
    return std::log(c) - log_surv;
  };
  d.von_mises = vm;
  d.norming_b_from_log_n = [mu, beta](double log_n) {
    // b solves F(b) = 1 - 1/n
    return mu - beta * std::log(-std::log1p(-std::exp(-log_n)));
  };
  return d;
}

Distribution make_gnedenko() {
  Distribution d;
  d.name = "gnedenko";
  d.support = {0.0, 1.0};
  auto t_of = [](double x) { return x / (1.0 - x); };
  d.cdf = [t_of](double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    return -std::expm1(-t_of(x));
  };
  d.log_cdf = [t_of](double x) {
    if (x <= 0.0) return -kInf;
    if (x >= 1.0) return 0.0;
    return log1mexp(-t_of(x));
  };
  d.pdf = [t_of](double x) {
    if (!(x > 0.0 && x < 1.0))
      throw domain_error("gnedenko: pdf query outside the support (0,1)");
    const double om = 1.0 - x;
    return std::exp(-t_of(x)) / (om * om);
  };
  d.log_pdf = [t_of](double x) {
    if (!(x > 0.0 && x < 1.0))
      throw domain_error("gnedenko: pdf query outside the support (0,1)");
    return -t_of(x) - 2.0 * std::log1p(-x);
  };
  d.quantile = [](double u) {
    if (!(u > 0.0 && u < 1.0)) throw domain_error("quantile: u must be in (0,1)");
    const double s = -std::log1p(-u);
    return s / (1.0 + s);
  };
  d.quantile_survival = [](double s) {
    if (!(s > 0.0 && s < 1.0)) throw domain_error("quantile_survival: s must be in (0,1)");
    const double t = -std::log(s);
    return t / (1.0 + t);
  };
  VonMisesSpec vm;
  vm.c = 1.0;
  vm.z0 = 0.0;
  vm.x0 = 1.0;
  vm.g = [](double u) {
    const double om = 1.0 - u;
    return om * om;
  };
  vm.g_derivative = [](double u) { return -2.0 * (1.0 - u); };
  vm.big_g = t_of;
  vm.log_g_derivative = [](int k, double u) {
    // psi = log g = 2 log(1-u); psi^(k)(u) = -2 (k-1)! / (1-u)^k
    if (k < 1) throw domain_error("log_g_derivative: order must be >= 1");
    return -2.0 * factorial(k - 1) / std::pow(1.0 - u, k);
  };
  d.von_mises = vm;
  d.norming_b_from_log_n = [](double log_n) { return log_n / (1.0 + log_n); };
  return d;
}

// ---------------------------------------------------------------------------
// Generic von Mises construction: F(x) = 1 - c exp(-G(x)) with G accumulated
// by quadrature when no closed form is supplied.
// ---------------------------------------------------------------------------

namespace {

// Shared state behind the closures of a generic von Mises law. The hazard
// cumulative G is chained along a fixed ladder of anchor points; anchor
// values depend only on the anchor (never on query history), so concurrent
// or reordered evaluation observes identical results.
struct GenericCore {
  VonMisesSpec spec;
  double log_c = 0.0;
  double lower = -kInf;

  mutable std::mutex mutex;
  mutable std::map<double, double> anchor_values;

  double g_checked(double x) const {
    const double v = spec.g(x);
    if (!std::isfinite(v) || v <= 0.0)
      throw domain_error("von Mises spec: g must be finite and > 0 (failed at x=" +
                         std::to_string(x) + ")");
    return v;
  }

  // Cumulative-hazard segment with a magnitude-aware tolerance: G blows up
  // near a finite x0, where only relative accuracy is attainable (and all
  // that survival = exp(-G) can use).
  double integrate_inv_g(double lo, double hi) const {
    auto inv_g = [this](double u) { return 1.0 / g_checked(u); };
    const double w = hi - lo;
    const double rough =
        w *
        (inv_g(lo + 0.25 * w) + inv_g(lo + 0.5 * w) + inv_g(hi - 0.25 * w)) /
        3.0;
    const double tol = kGTol * std::max(1.0, std::fabs(rough));
    return integrate(inv_g, lo, hi, tol).value;
  }

  // Deep-tail segments (G already past the survival underflow point) are
  // allowed to settle for the partial value: evaluating 1/g there is
  // rounding-noise-limited and exp(-G) is 0 to far more digits than needed.
  // Anywhere else a non-converging hazard integral stays a hard error.
  double segment(double lo, double hi, double accumulated) const {
    try {
      return integrate_inv_g(lo, hi);
    } catch (const divergence_error& e) {
      if (accumulated + e.partial() - log_c > 60.0) return e.partial();
      throw;
    }
  }

  double anchor_for(double x) const {
    const double z0 = spec.z0, x0 = spec.x0;
    if (x >= z0) {
      if (std::isfinite(x0)) {
        const double w = x0 - z0;
        const double frac = (x - z0) / w;
        if (frac <= 0.5) return z0;
        int j = static_cast<int>(std::floor(-std::log2(1.0 - frac)));
        j = std::clamp(j, 1, 45);
        return x0 - w * std::ldexp(1.0, -j);
      }
      const double off = x - z0;
      if (off < 1.0) return z0;
      const int k = std::min(static_cast<int>(std::floor(std::log2(off))), 60);
      return z0 + std::ldexp(1.0, k);
    }
    const double off = z0 - x;
    if (off < 1.0) return z0;
    const int k = std::min(static_cast<int>(std::floor(std::log2(off))), 60);
    return z0 - std::ldexp(1.0, k);
  }

  double value_at_anchor(double a) const {
    if (a == spec.z0) return 0.0;
    {
      std::lock_guard lock(mutex);
      auto it = anchor_values.find(a);
      if (it != anchor_values.end()) return it->second;
    }
    double parent;
    if (a > spec.z0) {
      if (std::isfinite(spec.x0)) {
        const double w = spec.x0 - spec.z0;
        const double gap = spec.x0 - a;
        parent = (2.0 * gap >= w) ? spec.z0 : spec.x0 - 2.0 * gap;
      } else {
        const double off = a - spec.z0;
        parent = (off <= 1.0) ? spec.z0 : spec.z0 + 0.5 * off;
      }
    } else {
      const double off = spec.z0 - a;
      parent = (off <= 1.0) ? spec.z0 : spec.z0 - 0.5 * off;
    }
    const double base = value_at_anchor(parent);
    const double value = a > parent ? base + segment(parent, a, base)
                                    : base - segment(a, parent, -kInf);
    {
      std::lock_guard lock(mutex);
      anchor_values.emplace(a, value);
    }
    return value;
  }

  double big_g(double x) const {
    if (spec.big_g) return spec.big_g(x);
    const double a = anchor_for(x);
    const double base = value_at_anchor(a);
    if (x == a) return base;
    return x > a ? base + segment(a, x, base) : base - segment(x, a, -kInf);
  }

  // D(x) = G(x) - log c, so survival = exp(-D) and F = -expm1(-D).
  double big_d(double x) const { return big_g(x) - log_c; }

  // Solve D(x) = target (D is increasing; target > 0).
  double solve_d(double target) const {
    double lo;
    if (std::isfinite(lower)) {
      lo = lower;
      if (big_d(lo) >= target) return lo;  // below quantile resolution
    } else {
      lo = std::min(spec.z0, 0.0) - 1.0;
      int guard = 0;
      while (big_d(lo) > target) {
        lo = 2.0 * lo - 1.0;
        if (++guard > 70)
          throw divergence_error("von Mises quantile: left bracket not found",
                                 lo, 0.0);
      }
    }
    double hi;
    if (std::isfinite(spec.x0)) {
      const double w = spec.x0 - spec.z0;
      hi = spec.x0 - 0.5 * w;
      int guard = 0;
      while (big_d(hi) < target) {
        hi = spec.x0 - 0.5 * (spec.x0 - hi);
        if (++guard > 60)
          throw divergence_error(
              "von Mises quantile: cdf does not reach the target below x0", hi,
              0.0);
      }
    } else {
      hi = spec.z0 + 1.0;
      int guard = 0;
      while (big_d(hi) < target) {
        hi = 2.0 * hi + 1.0;
        if (++guard > 70)
          throw divergence_error(
              "von Mises quantile: cdf does not reach the target", hi, 0.0);
      }
    }
    if (!(lo < hi)) return lo;
    // D is only representable to ~eps * dD/dx * |x| near a steep tail; scale
    // the residual tolerance with the target so the bracket can close.
    const double tol = kQuantileTol * (1.0 + target * target);
    return find_root([this, target](double x) { return big_d(x) - target; },
                     lo, hi, tol)
        .root;
  }
};

double resolve_lower(const GenericCore& core) {
  const VonMisesSpec& spec = core.spec;
  if (std::fabs(spec.c - 1.0) < 1e-14) return spec.z0;
  if (spec.c > 1.0) {
    // F(z0) = 1 - c < 0: the support starts where G = log c inside (z0, x0),
    // i.e. where D = G - log c crosses zero.
    return core.solve_d(0.0);
  }
  // c < 1: F(z0) = 1 - c > 0, so the law must extend below z0. Walk down
  // until G <= log c (support edge found) or until the representation is
  // effectively unbounded below.
  double prev = spec.z0;
  double gd = kInf;
  for (int k = 0; k <= 60; ++k) {
    const double x = spec.z0 - std::ldexp(1.0, k);
    try {
      gd = core.big_d(x);
    } catch (const error&) {
      throw domain_error(
          "von Mises spec: c < 1 requires g to be evaluable below z0 "
          "(the cdf must reach 0)");
    }
    if (gd <= 0.0) {
      return find_root([&core](double y) { return core.big_d(y); }, x, prev,
                       kQuantileTol)
          .root;
    }
    prev = x;
  }
  if (gd > 1e-6)
    throw domain_error(
        "von Mises spec: cdf does not reach 0 toward the lower end");
  return -kInf;
}

}  // namespace

Distribution make_von_mises(const VonMisesSpec& spec, std::string name) {
  if (!(spec.c > 0.0) || !std::isfinite(spec.c))
    throw domain_error("von Mises spec: c must be finite and > 0");
  if (!std::isfinite(spec.z0))
    throw domain_error("von Mises spec: z0 must be finite");
  if (!(spec.x0 > spec.z0))
    throw domain_error("von Mises spec: x0 must exceed z0");
  if (!spec.g) throw domain_error("von Mises spec: auxiliary function g is required");

  auto core = std::make_shared<GenericCore>();
  core->spec = spec;
  core->log_c = std::log(spec.c);

  // Probe g on an interior grid before committing to anything else.
  std::vector<double> probe;
  if (std::isfinite(spec.x0)) {
    const double w = spec.x0 - spec.z0;
    for (int i = 1; i <= 32; ++i) probe.push_back(spec.z0 + w * i / 33.0);
    probe.push_back(spec.x0 - w * std::ldexp(1.0, -30));
  } else {
    for (int k = -2; k <= 12; ++k) probe.push_back(spec.z0 + std::ldexp(1.0, k));
  }
  for (double x : probe) core->g_checked(x);

  core->lower = resolve_lower(*core);

  // The cdf must keep climbing toward 1 at the upper support limit: D must
  // grow (not stall) along a geometric probe toward x0. Tails too flat to
  // resolve in double surface later as quantile divergence errors.
  {
    double prev = -kInf;
    double last_step = kInf;
    const bool finite_x0 = std::isfinite(spec.x0);
    const double w = finite_x0 ? spec.x0 - spec.z0 : 0.0;
    for (int k : {2, 6, 10, 14}) {
      const double x = finite_x0 ? spec.x0 - w * std::ldexp(1.0, -k)
                                 : spec.z0 + std::ldexp(1.0, k);
      const double d = core->big_d(x);
      last_step = d - prev;
      prev = d;
    }
    if (!(last_step > 0.01))
      throw domain_error(
          "von Mises spec: cdf does not approach 1 at the upper support limit");
  }

  // Grid validation: D non-decreasing (so F in [0,1] and monotone).
  {
    double last = -kInf;
    const double grid_lo =
        std::isfinite(core->lower) ? core->lower : spec.z0 - 1024.0;
    const double grid_hi = std::isfinite(spec.x0)
                               ? spec.x0
                               : spec.z0 + std::ldexp(1.0, 14);
    for (int i = 1; i <= 32; ++i) {
      const double x = grid_lo + (grid_hi - grid_lo) * i / 33.0;
      if (x <= core->lower || x >= spec.x0) continue;
      const double d = core->big_d(x);
      if (d < last - 1e-9 * (1.0 + std::fabs(d)))
        throw domain_error("von Mises spec: resulting cdf is not non-decreasing");
      if (d < -1e-9)
        throw domain_error("von Mises spec: resulting cdf leaves [0, 1]");
      last = d;
    }
  }

  Distribution d;
  d.name = std::move(name);
  d.support = {core->lower, spec.x0};
  d.cdf = [core](double x) {
    if (x <= core->lower) return 0.0;
    if (x >= core->spec.x0) return 1.0;
    return std::clamp(-std::expm1(-core->big_d(x)), 0.0, 1.0);
  };
  d.log_cdf = [core](double x) {
    if (x <= core->lower) return -kInf;
    if (x >= core->spec.x0) return 0.0;
    return log1mexp(-core->big_d(x));
  };
  d.pdf = [core](double x) {
    if (!(x > core->lower && x < core->spec.x0))
      throw domain_error("von Mises law: pdf query outside the support");
    return std::exp(-core->big_d(x)) / core->g_checked(x);
  };
  d.log_pdf = [core](double x) {
    if (!(x > core->lower && x < core->spec.x0))
      throw domain_error("von Mises law: pdf query outside the support");
    return -core->big_d(x) - std::log(core->g_checked(x));
  };
  d.quantile = [core](double u) {
    if (!(u > 0.0 && u < 1.0)) throw domain_error("quantile: u must be in (0,1)");
    return core->solve_d(-std::log1p(-u));
  };
  d.quantile_survival = [core](double s) {
    if (!(s > 0.0 && s < 1.0))
      throw domain_error("quantile_survival: s must be in (0,1)");
    return core->solve_d(-std::log(s));
  };
  d.von_mises = spec;
  return d;
}

// ---------------------------------------------------------------------------
// Spec-file loading
// ---------------------------------------------------------------------------

namespace {

double parse_real(const std::string& key, const std::string& text) {
  std::string t = text;
  if (t == "inf" || t == "+inf") return kInf;
  if (t == "-inf") return -kInf;
  std::size_t used = 0;
  double v;
  try {
    v = std::stod(t, &used);
  } catch (const std::exception&) {
    throw parse_error("von Mises spec: bad numeric value for '" + key + "': " + text);
  }
  while (used < t.size() && std::isspace(static_cast<unsigned char>(t[used]))) ++used;
  if (used != t.size())
    throw parse_error("von Mises spec: trailing junk after value of '" + key + "'");
  return v;
}

std::string trim(std::string s) {
  const auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
  while (!s.empty() && is_space(s.front())) s.erase(s.begin());
  while (!s.empty() && is_space(s.back())) s.pop_back();
  return s;
}

}  // namespace

Distribution load_von_mises_spec(std::istream& in, const std::string& origin) {
  VonMisesSpec spec;
  std::string name = "custom";
  bool have_g = false;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw parse_error(origin + ":" + std::to_string(line_no) +
                        ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "c")
      spec.c = parse_real(key, value);
    else if (key == "z0")
      spec.z0 = parse_real(key, value);
    else if (key == "x0")
      spec.x0 = parse_real(key, value);
    else if (key == "g_expr") {
      Expr g = Expr::parse(value);
      spec.g = [g](double u) { return g(u); };
      have_g = true;
    } else if (key == "name")
      name = value;
    else
      throw parse_error(origin + ":" + std::to_string(line_no) +
                        ": unknown key '" + key + "'");
  }
  if (!have_g)
    throw parse_error(origin + ": missing required key 'g_expr'");
  return make_von_mises(spec, name);
}

Distribution load_von_mises_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw parse_error("cannot open von Mises spec file: " + path);
  return load_von_mises_spec(in, path);
}

}  // namespace evt
