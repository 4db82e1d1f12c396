#ifndef EVT_NUMERICS_HPP
#define EVT_NUMERICS_HPP

#include <functional>

#include "evt/errors.hpp"

namespace evt {

struct Distribution;

using RealFn = std::function<double(double)>;

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;  // sum of per-panel |K15 - G7| discrepancies
  long evaluations = 0;
};

struct RootResult {
  double root = 0.0;
  double residual = 0.0;
  int iterations = 0;
};

inline constexpr double kDefaultQuadTol = 1e-9;
inline constexpr int kMaxQuadPanels = 10000;
inline constexpr double kDefaultRootTol = 1e-12;
inline constexpr int kMaxRootIter = 200;

// Adaptive Gauss-Kronrod (G7, K15) over (0, 1). Endpoints are never
// evaluated, so integrable log-type endpoint singularities are fine.
// Throws divergence_error (with the partial value) when the panel budget is
// exhausted or the accumulated error estimate stays above tolerance, and
// evaluation_error when h returns a non-finite value.
QuadratureResult integrate_unit(const RealFn& h, double tol = kDefaultQuadTol);

// Same rule over a finite interval [lo, hi]; used for auxiliary integrals
// such as cumulative hazards and score-tail reconstruction.
QuadratureResult integrate(const RealFn& h, double lo, double hi,
                           double tol = kDefaultQuadTol);

// E h(X) = integral over u in (0,1) of h(Q(u)) du, via the quantile function.
// No density grids and no support-truncation decisions are involved.
QuadratureResult expectation(const Distribution& dist, const RealFn& h,
                             double tol = kDefaultQuadTol);

// Bracketed scalar root find: bisection with in-bracket secant acceleration.
// Requires f(lo) and f(hi) of opposite (or zero) sign; an exact zero at an
// endpoint returns immediately. Stops when |f(root)| <= tol.
RootResult find_root(const RealFn& f, double lo, double hi,
                     double tol = kDefaultRootTol, int max_iter = kMaxRootIter);

}  // namespace evt

#endif  // EVT_NUMERICS_HPP
