#include "procspec/spa.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "procspec/errors.hpp"

namespace procspec {

void AuctionEnv::validate() const {
  if (sellers < 2) throw ConfigError("N must be at least 2, got " + std::to_string(sellers));
  if (!(reserve > 0 && reserve <= 1))
    throw ConfigError("reserve r must lie in (0, 1], got " + std::to_string(reserve));
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double c = 1.0;
  for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
  return std::round(c);
}

namespace spa {
namespace {

// integral over [lo, r] of (1 - F(x))^power
double survival_power_integral(const AuctionEnv& env, int power, double lo, const Tolerances& tol) {
  if (lo >= env.reserve) return 0.0;
  if (power == 0) return env.reserve - lo;
  const auto& dist = env.dist;
  return numerics::integrate(
      [&dist, power](double x) { return std::pow(dist.survival(x), power); }, lo, env.reserve, tol);
}

void check_cutoff(const AuctionEnv& env, double cutoff) {
  if (!(cutoff >= 0 && cutoff <= env.reserve))
    throw ConfigError("cutoff must lie in [0, r], got " + std::to_string(cutoff));
}

}  // namespace

double pi0(const AuctionEnv& env, const Tolerances& tol) {
  return survival_power_integral(env, env.sellers - 1, 0.0, tol);
}

double price_from_cutoff(const AuctionEnv& env, double cutoff, const Tolerances& tol) {
  check_cutoff(env, cutoff);
  return cutoff + survival_power_integral(env, env.sellers - 1, cutoff, tol);
}

double cutoff_from_price(const AuctionEnv& env, double price, const Tolerances& tol) {
  if (price > env.reserve)
    throw ConfigError("offer above the reserve price is dominated (p = " + std::to_string(price) +
                      " > r = " + std::to_string(env.reserve) + ")");
  if (!(price >= 0)) throw ConfigError("offer must be non-negative");
  if (price <= pi0(env, tol)) return 0.0;
  if (price == env.reserve) return env.reserve;
  return numerics::find_root(
      [&](double v) { return price - price_from_cutoff(env, v, tol); }, 0.0, env.reserve, tol);
}

double expected_payment(const AuctionEnv& env, int m, double cutoff, const Tolerances& tol) {
  if (m < 0) throw ConfigError("number of rival sellers must be non-negative");
  if (!(cutoff >= 0 && cutoff < 1)) throw ConfigError("expected payment requires 0 <= v* < 1");
  if (m == 0) return env.reserve;
  const double tail = env.dist.survival(cutoff);
  if (cutoff >= env.reserve) return cutoff;
  const auto& dist = env.dist;
  return cutoff + numerics::integrate(
                      [&dist, m, tail](double x) { return std::pow(dist.survival(x) / tail, m); },
                      cutoff, env.reserve, tol);
}

double profit(const AuctionEnv& env, double cutoff, const Tolerances& tol) {
  check_cutoff(env, cutoff);
  if (cutoff == 0) return 0.0;
  const int n = env.sellers;
  const double accept = env.dist.cdf(cutoff);
  const double reject = 1.0 - accept;
  // (1 - F(v))^m * y(m, v) is expanded so that F(v) = 1 needs no division.
  double receipts = 0.0;
  for (int m = 0; m <= n - 1; ++m) {
    const double weight = binomial(n, m) * std::pow(accept, n - m);
    if (weight == 0) continue;
    if (m == 0) {
      receipts += weight * env.reserve;
      continue;
    }
    receipts += weight * (std::pow(reject, m) * cutoff + survival_power_integral(env, m, cutoff, tol));
  }
  return receipts - n * accept * price_from_cutoff(env, cutoff, tol);
}

Decomposition decompose_n2(const AuctionEnv& env, double cutoff, const Tolerances& tol) {
  if (env.sellers != 2)
    throw ConfigError("the three-term decomposition is defined for N = 2 only");
  check_cutoff(env, cutoff);
  Decomposition d;
  if (cutoff == 0) return d;
  const auto& dist = env.dist;
  const double accept = dist.cdf(cutoff);
  // Stieltjes integrals against d[F^2] use the density 2 F f.
  const double destroyed = numerics::integrate(
      [&dist](double x) { return x * 2.0 * dist.cdf(x) * dist.pdf(x); }, 0.0, cutoff, tol);
  d.gain_withholding = accept * accept * env.reserve - destroyed;
  d.loss_overcompensation =
      2.0 * numerics::integrate([&dist](double x) { const double f = dist.cdf(x); return f * f; },
                                0.0, cutoff, tol);
  d.loss_value_destruction = destroyed;
  return d;
}

double limit_ratio(const AuctionEnv& env, const Tolerances& tol) {
  const int n = env.sellers;
  return binomial(n, 2) * survival_power_integral(env, n - 2, 0.0, tol);
}

SpaEquilibrium evaluate(const AuctionEnv& env, double cutoff, const Tolerances& tol) {
  SpaEquilibrium eq;
  eq.cutoff = cutoff;
  eq.pi0 = pi0(env, tol);
  eq.price = price_from_cutoff(env, cutoff, tol);
  eq.profit = profit(env, cutoff, tol);
  if (env.sellers == 2) eq.decomposition = decompose_n2(env, cutoff, tol);
  return eq;
}

SpaEquilibrium optimize(const AuctionEnv& env, const Tolerances& tol) {
  env.validate();
  const auto best = numerics::maximize_on_interval(
      [&](double v) { return profit(env, v, tol); }, 0.0, env.reserve, tol);
  SpaEquilibrium eq = evaluate(env, best.argmax, tol);
  eq.profit = best.value;
  return eq;
}

}  // namespace spa
}  // namespace procspec
