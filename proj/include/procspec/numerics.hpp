#pragma once

#include <functional>
#include <initializer_list>
#include <span>

namespace procspec {

struct Tolerances {
  double quad_abs_tol = 1e-10;
  double root_tol = 1e-12;
  double argmax_tol = 1e-9;
  int grid_points = 2048;

  // Throws ConfigError when any field is out of range.
  void validate() const;
};

using RealFn = std::function<double(double)>;

namespace numerics {

/// Global adaptive Gauss-Kronrod (7/15) quadrature on [a, b].
///
/// The interval with the largest error estimate is bisected until the summed
/// estimate falls below `tol.quad_abs_tol` (or below a roundoff floor of a few
/// ulps of the running result). Repeated bisection of the interval touching a
/// singular endpoint is a geometric subdivision toward it, so integrable
/// endpoint singularities converge. The rule never evaluates f at a or b.
///
/// Throws QuadratureError, carrying the worst subinterval, when the
/// subdivision budget runs out.
double integrate(const RealFn& f, double a, double b, const Tolerances& tol = {});

// Same as integrate(), splitting [a, b] at known kinks first. Breakpoints
// outside (a, b) are ignored.
double integrate(const RealFn& f, double a, double b, std::span<const double> breakpoints,
                 const Tolerances& tol = {});

/// Bracketed root of f on [lo, hi] (TOMS 748). The returned point is the
/// midpoint of a final bracket of width <= tol.root_tol. Throws NoSignChange
/// when f(lo) and f(hi) share a strict sign.
double find_root(const RealFn& f, double lo, double hi, const Tolerances& tol = {});

struct Maximum {
  double argmax;
  double value;
};

/// Global maximum of f over [lo, hi] without unimodality assumptions.
///
/// Evaluates f on `tol.grid_points` equispaced nodes, refines every discrete
/// local maximum by golden-section search to width `tol.argmax_tol`, and also
/// considers both endpoints exactly. Of all candidates whose value is within
/// `tol.argmax_tol` of the best one, the smallest abscissa is returned, which
/// makes the result the minimum of the (tolerance-resolved) argmax set.
Maximum maximize_on_interval(const RealFn& f, double lo, double hi, const Tolerances& tol = {});

// x in [lo, hi] with f(x) = target for monotone f; clamps to the end points
// when target lies outside [f(lo), f(hi)].
double invert_monotone(const RealFn& f, double target, double lo, double hi,
                       const Tolerances& tol = {});

}  // namespace numerics
}  // namespace procspec
