#include "procspec/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include "procspec/errors.hpp"

namespace procspec {

void Tolerances::validate() const {
  if (!(quad_abs_tol > 0)) throw ConfigError("quad tolerance must be > 0");
  if (!(root_tol > 0)) throw ConfigError("root tolerance must be > 0");
  if (!(argmax_tol > 0)) throw ConfigError("argmax tolerance must be > 0");
  if (grid_points < 64) throw ConfigError("grid must have at least 64 points");
}

namespace numerics {
namespace {

constexpr std::size_t kMaxSegments = 6000;
constexpr double kEps = std::numeric_limits<double>::epsilon();

struct Segment {
  double a;
  double b;
  double value;
  double error;
};

// Max-heap on error; ties broken by position so the refinement order is a
// pure function of the integrand values.
bool less_urgent(const Segment& x, const Segment& y) {
  if (x.error != y.error) return x.error < y.error;
  return x.a > y.a;
}

std::string describe(const char* what, double a, double b, double err) {
  std::ostringstream os;
  os.precision(17);
  os << what << " on [" << a << ", " << b << "], error estimate " << err;
  return os.str();
}

Segment kronrod15(const RealFn& f, double a, double b) {
  using Kronrod = boost::math::quadrature::gauss_kronrod<double, 15>;
  using Gauss = boost::math::quadrature::gauss<double, 7>;
  const auto& xk = Kronrod::abscissa();
  const auto& wk = Kronrod::weights();
  const auto& wg = Gauss::weights();

  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double k = wk[0] * fc;
  double g = wg[0] * fc;
  bool finite = std::isfinite(fc);
  for (std::size_t j = 1; j < xk.size(); ++j) {
    const double dx = h * xk[j];
    const double pair = f(c - dx) + f(c + dx);
    finite = finite && std::isfinite(pair);
    k += wk[j] * pair;
    if (j % 2 == 0) g += wg[j / 2] * pair;
  }
  if (!finite) throw QuadratureError(describe("non-finite integrand", a, b, HUGE_VAL), a, b, HUGE_VAL);
  return {a, b, k * h, std::abs(k - g) * h};
}

}  // namespace

double integrate(const RealFn& f, double a, double b, const Tolerances& tol) {
  if (a == b) return 0.0;
  if (a > b) return -integrate(f, b, a, tol);

  std::vector<Segment> heap{kronrod15(f, a, b)};
  double total = heap.front().value;
  double total_err = heap.front().error;
  double frozen_err = 0.0;  // error of segments too narrow to split
  std::vector<Segment> frozen;

  auto target = [&] { return std::max(tol.quad_abs_tol, 50 * kEps * std::abs(total)); };

  while (total_err + frozen_err > target()) {
    if (heap.empty() || heap.size() + frozen.size() >= kMaxSegments) {
      const Segment worst = heap.empty()
                                ? *std::max_element(frozen.begin(), frozen.end(), less_urgent)
                                : heap.front();
      throw QuadratureError(describe("quadrature did not converge; worst subinterval", worst.a,
                                     worst.b, worst.error),
                            worst.a, worst.b, worst.error);
    }
    std::pop_heap(heap.begin(), heap.end(), less_urgent);
    const Segment worst = heap.back();
    heap.pop_back();
    total -= worst.value;
    total_err -= worst.error;

    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      frozen.push_back(worst);
      frozen_err += worst.error;
      total += worst.value;
      continue;
    }
    for (const Segment& half : {kronrod15(f, worst.a, mid), kronrod15(f, mid, worst.b)}) {
      total += half.value;
      total_err += half.error;
      heap.push_back(half);
      std::push_heap(heap.begin(), heap.end(), less_urgent);
    }
    // Periodic exact resummation keeps the running totals free of drift.
    if (heap.size() % 64 == 0) {
      total = 0;
      total_err = 0;
      for (const Segment& s : heap) {
        total += s.value;
        total_err += s.error;
      }
      for (const Segment& s : frozen) total += s.value;
    }
  }

  // Final sum in left-to-right order.
  heap.insert(heap.end(), frozen.begin(), frozen.end());
  std::sort(heap.begin(), heap.end(), [](const Segment& x, const Segment& y) { return x.a < y.a; });
  double sum = 0.0;
  for (const Segment& s : heap) sum += s.value;
  return sum;
}

double integrate(const RealFn& f, double a, double b, std::span<const double> breakpoints,
                 const Tolerances& tol) {
  if (a == b) return 0.0;
  if (a > b) return -integrate(f, b, a, breakpoints, tol);
  std::vector<double> cuts{a};
  for (double x : breakpoints)
    if (x > a && x < b) cuts.push_back(x);
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  Tolerances piece = tol;
  piece.quad_abs_tol = tol.quad_abs_tol / static_cast<double>(cuts.size() - 1);
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) sum += integrate(f, cuts[i], cuts[i + 1], piece);
  return sum;
}

double find_root(const RealFn& f, double lo, double hi, const Tolerances& tol) {
  if (lo > hi) std::swap(lo, hi);
  const double flo = f(lo);
  if (flo == 0) return lo;
  const double fhi = f(hi);
  if (fhi == 0) return hi;
  if (!std::isfinite(flo) || !std::isfinite(fhi))
    throw NumericalError("find_root: non-finite function value at bracket end");
  if ((flo > 0) == (fhi > 0)) {
    std::ostringstream os;
    os.precision(17);
    os << "find_root: no sign change on [" << lo << ", " << hi << "] (f(lo) = " << flo
       << ", f(hi) = " << fhi << "); the boundary case applies";
    throw NoSignChange(os.str(), flo, fhi);
  }
  const double width = tol.root_tol;
  auto done = [width](double x, double y) { return std::abs(y - x) <= width; };
  std::uintmax_t iters = 500;
  auto [a, b] = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, done, iters);
  if (!done(a, b)) {
    // Bracket stalled at floating-point resolution; bisect what is left.
    double fa = f(a);
    for (int i = 0; i < 200 && !done(a, b); ++i) {
      const double m = 0.5 * (a + b);
      if (m <= a || m >= b) break;
      const double fm = f(m);
      if (fm == 0) return m;
      if ((fm > 0) == (fa > 0)) {
        a = m;
        fa = fm;
      } else {
        b = m;
      }
    }
  }
  return 0.5 * (a + b);
}

namespace {

// Golden-section maximization on [a, b], returning the best point seen.
// Ties move the bracket left.
Maximum golden_max(const RealFn& f, double a, double b, double width) {
  constexpr double kInvPhi = 0.6180339887498948482;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = f(c);
  double fd = f(d);
  Maximum best{c, fc};
  auto consider = [&best](double x, double v) {
    if (v > best.value || (v == best.value && x < best.argmax)) best = {x, v};
  };
  consider(d, fd);
  while (b - a > width) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = f(c);
      consider(c, fc);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = f(d);
      consider(d, fd);
    }
  }
  const double m = 0.5 * (a + b);
  consider(m, f(m));
  return best;
}

}  // namespace

Maximum maximize_on_interval(const RealFn& f, double lo, double hi, const Tolerances& tol) {
  if (!(hi > lo)) return {lo, f(lo)};
  const int n = tol.grid_points;
  std::vector<double> xs(static_cast<std::size_t>(n));
  std::vector<double> ys(xs.size());
  for (int i = 0; i < n; ++i) {
    xs[i] = i == n - 1 ? hi : lo + (hi - lo) * static_cast<double>(i) / (n - 1);
    ys[i] = f(xs[i]);
  }

  std::vector<Maximum> candidates{{lo, ys.front()}, {hi, ys.back()}};
  if (ys[0] >= ys[1]) candidates.push_back(golden_max(f, xs[0], xs[1], tol.argmax_tol));
  if (ys[n - 1] >= ys[n - 2])
    candidates.push_back(golden_max(f, xs[n - 2], xs[n - 1], tol.argmax_tol));
  for (int i = 1; i + 1 < n; ++i) {
    if (ys[i] > ys[i - 1] && ys[i] >= ys[i + 1])
      candidates.push_back(golden_max(f, xs[i - 1], xs[i + 1], tol.argmax_tol));
  }

  double best = -HUGE_VAL;
  for (const Maximum& c : candidates)
    if (c.value > best) best = c.value;
  const Maximum* chosen = nullptr;
  for (const Maximum& c : candidates) {
    if (c.value >= best - tol.argmax_tol && (!chosen || c.argmax < chosen->argmax)) chosen = &c;
  }
  return chosen ? *chosen : candidates.front();
}

double invert_monotone(const RealFn& f, double target, double lo, double hi,
                       const Tolerances& tol) {
  auto g = [&](double x) { return f(x) - target; };
  const double glo = g(lo);
  const double ghi = g(hi);
  if (glo == 0) return lo;
  if (ghi == 0) return hi;
  if ((glo > 0) == (ghi > 0)) return std::abs(glo) <= std::abs(ghi) ? lo : hi;
  return find_root(g, lo, hi, tol);
}

}  // namespace numerics
}  // namespace procspec
