#include "evt/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "evt/distribution.hpp"

namespace evt {

namespace {

// 15-point Kronrod extension of the 7-point Gauss rule on [-1, 1].
// Abscissae/weights from QUADPACK dqk15. Gauss points sit at the odd
// indices (and the centre).
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

// machine-epsilon^(3/4): panels narrower than this (times the interval
// scale) are accepted as-is, which keeps log-type endpoint singularities
// from recursing forever.
const double kMinPanelWidth =
    std::pow(std::numeric_limits<double>::epsilon(), 0.75);

struct Panel {
  double k15 = 0.0;
  double g7 = 0.0;
};

struct Workspace {
  const RealFn& h;
  double tol;
  double min_width;
  long evaluations = 0;
  int panels = 0;
  double error_sum = 0.0;
  bool budget_exhausted = false;
};

Panel gk15(Workspace& ws, double a, double b) {
  const double centre = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  auto eval = [&](double x) {
    const double y = ws.h(x);
    ++ws.evaluations;
    if (!std::isfinite(y)) {
      throw evaluation_error(
          "integrand returned a non-finite value at x=" + std::to_string(x), x);
    }
    return y;
  };
  const double fc = eval(centre);
  double k = kWgk[7] * fc;
  double g = kWg[3] * fc;
  for (int i = 0; i < 7; ++i) {
    const double dx = half * kXgk[i];
    const double f1 = eval(centre - dx);
    const double f2 = eval(centre + dx);
    k += kWgk[i] * (f1 + f2);
    if (i % 2 == 1) g += kWg[i / 2] * (f1 + f2);
  }
  ++ws.panels;
  return {k * half, g * half};
}

double refine(Workspace& ws, double a, double b, const Panel& p) {
  const double width = b - a;
  const double err = std::fabs(p.k15 - p.g7);
  if (err <= ws.tol * width || width <= ws.min_width ||
      ws.panels >= kMaxQuadPanels) {
    if (err > ws.tol * width && ws.panels >= kMaxQuadPanels)
      ws.budget_exhausted = true;
    ws.error_sum += err;
    return p.k15;
  }
  const double mid = 0.5 * (a + b);
  const Panel left = gk15(ws, a, mid);
  const Panel right = gk15(ws, mid, b);
  return refine(ws, a, mid, left) + refine(ws, mid, b, right);
}

QuadratureResult run(const RealFn& h, double lo, double hi, double tol,
                     double scale) {
  // Per-unit-width tolerance allocation: accepted panels contribute at most
  // tol in total over the whole interval. The width floor scales with the
  // interval (subdivision depth ~40 levels) but never below a few ulps of
  // the endpoint magnitude.
  const double min_width =
      std::max(kMinPanelWidth * (hi - lo),
               4.0 * std::numeric_limits<double>::epsilon() * scale);
  Workspace ws{h, tol / (hi - lo), min_width};
  const Panel top = gk15(ws, lo, hi);
  const double value = refine(ws, lo, hi, top);
  QuadratureResult result{value, ws.error_sum, ws.evaluations};
  const double floor = 1e-12 * (1.0 + std::fabs(value));
  if (ws.budget_exhausted || ws.error_sum > std::max(4.0 * tol, floor)) {
    throw divergence_error(
        ws.budget_exhausted
            ? "quadrature did not converge within the panel budget"
            : "quadrature error estimate did not fall below tolerance",
        result.value, result.error_estimate);
  }
  return result;
}

}  // namespace

QuadratureResult integrate_unit(const RealFn& h, double tol) {
  return run(h, 0.0, 1.0, tol, 1.0);
}

QuadratureResult integrate(const RealFn& h, double lo, double hi, double tol) {
  if (!(lo < hi)) throw domain_error("integrate: requires lo < hi");
  if (lo == hi) return {0.0, 0.0, 1};
  const double scale = std::max({1.0, std::fabs(lo), std::fabs(hi)});
  return run(h, lo, hi, tol, scale);
}

namespace {

// Expectation ladder: E h(X) = sum of two tail integrals under u = e^{-t}
// and 1 - u = e^{-t}, t in [log 2, inf). The substitution turns log-power
// endpoint behaviour (scores, entropies, moments of maxima) into smooth
// exponentially damped integrands. Blocks double in width; the scan stops
// once a block's contribution is dead, and a still-live block at the e^-700
// cutoff is reported as divergence.
QuadratureResult expect_ladder(const RealFn& x_lower, const RealFn& x_upper,
                               const RealFn& h, double tol) {
  constexpr double kTailCut = 700.0;  // below this, e^{-t} is still normal
  QuadratureResult out;
  for (int side = 0; side < 2; ++side) {
    const RealFn& x_of = side == 0 ? x_lower : x_upper;
    auto integrand = [&](double t) {
      const double y = h(x_of(t)) * std::exp(-t);
      if (std::isinf(y))
        throw divergence_error(
            "expectation: integrand overflowed in the tail (divergent "
            "expectation)",
            out.value, out.error_estimate);
      return y;
    };
    double t_lo = M_LN2;
    double width = M_LN2;
    for (;;) {
      const double t_hi = std::min(t_lo + width, kTailCut);
      const QuadratureResult block =
          integrate(integrand, t_lo, t_hi, 0.05 * tol);
      out.value += block.value;
      out.error_estimate += block.error_estimate;
      out.evaluations += block.evaluations;
      const bool dead = std::fabs(block.value) <
                        std::max(0.01 * tol, 1e-13 * std::fabs(out.value));
      if (t_hi >= kTailCut) {
        if (!dead)
          throw divergence_error(
              "expectation: tail still significant at the resolution limit",
              out.value, out.error_estimate);
        break;
      }
      if (dead && t_hi > 40.0) break;
      t_lo = t_hi;
      width *= 2.0;
    }
  }
  return out;
}

}  // namespace

QuadratureResult expectation(const Distribution& dist, const RealFn& h,
                             double tol) {
  auto x_lower = [&dist](double t) { return dist.quantile(std::exp(-t)); };
  auto x_upper = [&dist](double t) {
    const double s = std::exp(-t);
    if (dist.quantile_survival) return dist.quantile_survival(s);
    return dist.quantile(-std::expm1(-t));
  };
  return expect_ladder(x_lower, x_upper, h, tol);
}

RootResult find_root(const RealFn& f, double lo, double hi, double tol,
                     int max_iter) {
  if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi))
    throw bracket_error("find_root: invalid bracket endpoints");
  auto eval = [&](double x) {
    const double y = f(x);
    if (!std::isfinite(y))
      throw evaluation_error(
          "find_root: f returned a non-finite value at x=" + std::to_string(x),
          x);
    return y;
  };
  double fa = eval(lo);
  if (fa == 0.0) return {lo, 0.0, 0};
  double fb = eval(hi);
  if (fb == 0.0) return {hi, 0.0, 0};
  if ((fa > 0) == (fb > 0))
    throw bracket_error("find_root: f has the same sign at both endpoints");

  double a = lo, b = hi;
  double x_prev = a, f_prev = fa;
  double x_cur = b, f_cur = fb;
  const double width_floor =
      std::numeric_limits<double>::epsilon() * (std::fabs(lo) + std::fabs(hi) + 1.0);

  for (int iter = 1; iter <= max_iter; ++iter) {
    double cand = std::numeric_limits<double>::quiet_NaN();
    const double denom = f_cur - f_prev;
    if (denom != 0.0) cand = x_cur - f_cur * (x_cur - x_prev) / denom;
    // Secant step accepted only strictly inside the bracket; every fourth
    // iteration bisects regardless so the bracket provably shrinks.
    const bool use_secant =
        std::isfinite(cand) && cand > a && cand < b && iter % 4 != 0;
    const double m = use_secant ? cand : 0.5 * (a + b);
    const double fm = eval(m);
    if (std::fabs(fm) <= tol) return {m, fm, iter};
    if ((fm > 0) == (fa > 0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
      fb = fm;
    }
    x_prev = x_cur;
    f_prev = f_cur;
    x_cur = m;
    f_cur = fm;
    if (b - a <= width_floor) {
      const double best = std::fabs(fa) < std::fabs(fb) ? a : b;
      const double fbest = std::fabs(fa) < std::fabs(fb) ? fa : fb;
      if (std::fabs(fbest) <= tol) return {best, fbest, iter};
      throw budget_error(
          "find_root: bracket collapsed before |f| reached tolerance");
    }
  }
  throw budget_error("find_root: iteration budget exhausted");
}

}  // namespace evt
