#include "procspec/fpa.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>
#include <cmath>
#include <string>

#include "procspec/errors.hpp"
#include "procspec/spa.hpp"

namespace procspec::fpa {
namespace {

// 1 - Psi at the clamp point may be at most this.
constexpr double kClampMass = 1e-6;
constexpr int kBulkNodes = 64;
constexpr int kMaxTailNodes = 60;

void check_cutoff(const AuctionEnv& env, double cutoff) {
  if (!(cutoff >= 0 && cutoff <= env.reserve))
    throw ConfigError("cutoff must lie in [0, r], got " + std::to_string(cutoff));
}

void check_rivals(const AuctionEnv& env, int m) {
  if (m < 1 || m > env.sellers - 1)
    throw ConfigError("subgame size m must lie in [1, N-1], got " + std::to_string(m));
}

// integral over [lo, r] of (1 - F(x))^power
double survival_power_integral(const AuctionEnv& env, int power, double lo, const Tolerances& tol) {
  if (lo >= env.reserve) return 0.0;
  const auto& dist = env.dist;
  return numerics::integrate(
      [&dist, power](double x) { return std::pow(dist.survival(x), power); }, lo, env.reserve, tol);
}

// b_low(m, v) for m = 1 .. N-1 (index 0 unused), skipping sizes whose
// probability weight vanishes.
std::vector<double> lower_bids(const AuctionEnv& env, double cutoff, const Tolerances& tol) {
  const int n = env.sellers;
  const double accept = env.dist.cdf(cutoff);
  std::vector<double> lows(static_cast<std::size_t>(n), 0.0);
  for (int m = 1; m <= n - 1; ++m) {
    // Weight of size m in the profit is (1-F)^m F^(N-m); in the price it is
    // (1-F)^(m-1) F^(N-m). Both vanish together only when F = 0.
    if (accept == 0) continue;
    lows[m] = lower_bid(env, m, cutoff, tol).b_low;
  }
  return lows;
}

double price_given_lows(const AuctionEnv& env, double cutoff, const std::vector<double>& lows,
                        const Tolerances& tol) {
  const int n = env.sellers;
  const double accept = env.dist.cdf(cutoff);
  const double reject = 1.0 - accept;
  double price = cutoff + survival_power_integral(env, n - 1, cutoff, tol);
  for (int m = 0; m <= n - 2; ++m) {
    const double weight = binomial(n - 1, m) * std::pow(reject, m) * std::pow(accept, n - 1 - m);
    if (weight == 0) continue;
    price += weight * (lows[m + 1] - cutoff);
  }
  return price;
}

double profit_given_lows(const AuctionEnv& env, double cutoff, const std::vector<double>& lows,
                         const Tolerances& tol) {
  const int n = env.sellers;
  const double accept = env.dist.cdf(cutoff);
  const double reject = 1.0 - accept;
  double receipts = std::pow(accept, n) * env.reserve;
  for (int m = 1; m <= n - 1; ++m) {
    const double weight = binomial(n, m) * std::pow(reject, m) * std::pow(accept, n - m);
    if (weight == 0) continue;
    receipts += weight * lows[m];
  }
  return receipts - n * accept * price_given_lows(env, cutoff, lows, tol);
}

}  // namespace

LowerBid lower_bid(const AuctionEnv& env, int m, double cutoff, const Tolerances& tol) {
  check_rivals(env, m);
  check_cutoff(env, cutoff);
  if (cutoff >= env.reserve) return {env.reserve, env.reserve};
  const auto& dist = env.dist;
  const double tail = dist.survival(cutoff);
  const auto best = numerics::maximize_on_interval(
      [&dist, tail, m](double b) { return b * std::pow(dist.survival(b) / tail, m); }, cutoff,
      env.reserve, tol);
  return {best.value, best.argmax};
}

FpaSubgameSolution::FpaSubgameSolution(const AuctionEnv& env, int m, double cutoff,
                                       const Tolerances& tol)
    : dist_(env.dist), reserve_(env.reserve), tol_(tol), m_(m), cutoff_(cutoff) {
  check_rivals(env, m);
  check_cutoff(env, cutoff);
  if (!(cutoff < 1)) throw ConfigError("subgame requires cutoff < 1");
  base_tail_ = dist_.survival(cutoff_);

  const LowerBid lb = lower_bid(env, m, cutoff, tol);
  b_low_ = lb.b_low;
  b_high_ = lb.b_high;
  nodes_.push_back(cutoff_);
  exponents_.push_back(0.0);
  if (b_high_ <= cutoff_) {
    // The speculator ties the bottom of the seller support: b_low = cutoff.
    degenerate_ = true;
    b_low_ = b_high_ = cutoff_;
    return;
  }

  const double span = b_high_ - cutoff_;
  const double clamp_exponent = -std::log(kClampMass);
  auto density = [this](double x) { return psi_exponent_density(x); };
  auto gap = [this](double x) { return b_low_ - x * std::pow(survival(x), m_); };

  std::vector<double> grid;
  for (int k = 1; k <= kBulkNodes; ++k) grid.push_back(cutoff_ + 0.5 * span * k / kBulkNodes);
  for (int k = 2; k <= kMaxTailNodes; ++k) grid.push_back(b_high_ - span * std::ldexp(1.0, -k));

  double exponent = 0.0;
  for (double x : grid) {
    if (!(x > nodes_.back() && x < b_high_)) break;
    if (!(gap(x) > 1e-12 * b_low_)) break;  // integrand no longer resolved
    exponent += numerics::integrate(density, nodes_.back(), x, tol_);
    nodes_.push_back(x);
    exponents_.push_back(exponent);
    if (exponent >= clamp_exponent) break;
  }
  clamp_mass_ = std::exp(-exponents_.back());
}

double FpaSubgameSolution::survival(double v) const {
  if (v <= cutoff_) return 1.0;
  if (v >= 1) return 0.0;
  return std::clamp(dist_.survival(v) / base_tail_, 0.0, 1.0);
}

double FpaSubgameSolution::beta(double v) const {
  if (v <= cutoff_) return b_low_;
  if (v > b_high_) return v;
  return b_low_ / std::pow(survival(v), m_);
}

double FpaSubgameSolution::beta_inv(double bid) const {
  if (bid <= b_low_) return cutoff_;
  if (bid >= b_high_) return bid;
  // [1 - G(x)]^m = b_low / bid, so G(x) = 1 - (b_low / bid)^(1/m).
  const double tail = std::pow(b_low_ / bid, 1.0 / m_);
  const double x = dist_.quantile(1.0 - base_tail_ * tail);
  return std::clamp(x, cutoff_, b_high_);
}

double FpaSubgameSolution::psi_exponent_density(double x) const {
  const double s = survival(x);
  const double sm = std::pow(s, m_);
  const double num = b_low_ + (m_ - 1) * x * sm;
  const double den = (b_low_ - x * sm) * s;
  return num / den * dist_.pdf(x) / base_tail_;
}

double FpaSubgameSolution::psi_exponent(double x) const {
  auto it = std::upper_bound(nodes_.begin(), nodes_.end(), x);
  const std::size_t k = static_cast<std::size_t>(it - nodes_.begin()) - 1;
  if (nodes_[k] == x) return exponents_[k];
  return exponents_[k] + numerics::integrate([this](double t) { return psi_exponent_density(t); },
                                             nodes_[k], x, tol_);
}

double FpaSubgameSolution::psi_at_value(double x) const {
  if (degenerate_) return x >= cutoff_ ? 1.0 : 0.0;
  if (x <= cutoff_) return 0.0;
  if (x >= clamp_point()) return 1.0;
  return -std::expm1(-psi_exponent(x));
}

double FpaSubgameSolution::psi(double bid) const {
  if (degenerate_) return bid >= b_low_ ? 1.0 : 0.0;
  if (bid <= b_low_) return 0.0;
  if (bid >= b_high_) return 1.0;
  return psi_at_value(beta_inv(bid));
}

double FpaSubgameSolution::psi_quantile(double u) const {
  if (degenerate_ || u <= 0) return b_low_;
  const double target = -std::log1p(-std::min(u, 1.0));
  if (target >= exponents_.back()) return beta(clamp_point());
  auto it = std::upper_bound(exponents_.begin(), exponents_.end(), target);
  const std::size_t k = static_cast<std::size_t>(it - exponents_.begin()) - 1;
  if (exponents_[k] == target) return beta(nodes_[k]);
  const double base = exponents_[k];
  auto residual = [&](double x) {
    return base +
           numerics::integrate([this](double t) { return psi_exponent_density(t); }, nodes_[k], x,
                               tol_) -
           target;
  };
  const double x = numerics::find_root(residual, nodes_[k], nodes_[k + 1], tol_);
  return beta(x);
}

double FpaSubgameSolution::seller_objective(double v_hat, double v) const {
  const double win_vs_sellers = std::pow(survival(v_hat), m_ - 1);
  const double win_vs_speculator = 1.0 - psi_at_value(v_hat);
  return win_vs_sellers * win_vs_speculator * (beta(v_hat) - v);
}

FpaSubgameSolution solve_subgame(const AuctionEnv& env, int m, double cutoff,
                                 const Tolerances& tol) {
  return FpaSubgameSolution(env, m, cutoff, tol);
}

std::vector<FpaSubgameSolution> solve_subgames(const AuctionEnv& env, double cutoff,
                                               const Tolerances& tol) {
  std::vector<FpaSubgameSolution> out;
  for (int m = 1; m <= env.sellers - 1; ++m) out.emplace_back(env, m, cutoff, tol);
  return out;
}

double benchmark_bid(const AuctionEnv& env, int m, double cutoff, double v, const Tolerances& tol) {
  if (m < 1) throw ConfigError("benchmark bid needs m >= 1");
  if (v < cutoff) throw ConfigError("benchmark bid requires v >= cutoff");
  if (v >= env.reserve) return v;
  const auto& dist = env.dist;
  const double tail = dist.survival(cutoff);
  auto s = [&dist, tail](double x) { return dist.survival(x) / tail; };
  const double own = std::pow(s(v), m);
  const double area = numerics::integrate([&](double x) { return std::pow(s(x), m); }, v,
                                          env.reserve, tol);
  return v + area / own;
}

double price_from_cutoff(const AuctionEnv& env, double cutoff, const Tolerances& tol) {
  check_cutoff(env, cutoff);
  return price_given_lows(env, cutoff, lower_bids(env, cutoff, tol), tol);
}

double cutoff_from_price(const AuctionEnv& env, double price, const Tolerances& tol) {
  if (price > env.reserve)
    throw ConfigError("offer above the reserve price is dominated (p = " + std::to_string(price) +
                      " > r = " + std::to_string(env.reserve) + ")");
  if (!(price >= 0)) throw ConfigError("offer must be non-negative");
  if (price <= spa::pi0(env, tol)) return 0.0;
  if (price == env.reserve) return env.reserve;
  return numerics::invert_monotone([&](double v) { return price_from_cutoff(env, v, tol); }, price,
                                   0.0, env.reserve, tol);
}

double profit(const AuctionEnv& env, double cutoff, const Tolerances& tol) {
  check_cutoff(env, cutoff);
  if (cutoff == 0) return 0.0;
  return profit_given_lows(env, cutoff, lower_bids(env, cutoff, tol), tol);
}

FpaEquilibrium evaluate(const AuctionEnv& env, double cutoff, const Tolerances& tol,
                        bool with_subgames) {
  FpaEquilibrium eq;
  eq.cutoff = cutoff;
  const auto lows = lower_bids(env, cutoff, tol);
  eq.price = price_given_lows(env, cutoff, lows, tol);
  eq.profit = cutoff == 0 ? 0.0 : profit_given_lows(env, cutoff, lows, tol);
  if (with_subgames && cutoff < 1) eq.subgames = solve_subgames(env, cutoff, tol);
  return eq;
}

FpaEquilibrium optimize(const AuctionEnv& env, const Tolerances& tol, bool with_subgames) {
  env.validate();
  const auto best = numerics::maximize_on_interval(
      [&](double v) { return profit(env, v, tol); }, 0.0, env.reserve, tol);
  FpaEquilibrium eq = evaluate(env, best.argmax, tol, with_subgames);
  eq.profit = best.value;
  return eq;
}

std::vector<RegionCell> region_scan(int sellers, const std::vector<double>& eta_grid,
                                    const std::vector<double>& reserve_grid, double sign_margin,
                                    const Tolerances& tol) {
  const std::size_t cols = reserve_grid.size();
  const std::size_t total = eta_grid.size() * cols;
  std::vector<RegionCell> cells(total);
  for (double eta : eta_grid)
    for (double r : reserve_grid) AuctionEnv{sellers, r, ValueDistribution::power(eta)}.validate();

  auto solve_cell = [&](std::size_t k) {
    const double eta = eta_grid[k / cols];
    const double r = reserve_grid[k % cols];
    const AuctionEnv env{sellers, r, ValueDistribution::power(eta)};
    const FpaEquilibrium eq = optimize(env, tol, false);
    RegionStatus status = RegionStatus::Indeterminate;
    if (eq.profit > sign_margin)
      status = RegionStatus::Profitable;
    else if (eq.cutoff == 0)
      status = RegionStatus::Unprofitable;
    cells[k] = {eta, r, eq.profit, eq.cutoff, status};
  };

  // Cells are independent; each worker writes only its own slots.
  const unsigned workers =
      static_cast<unsigned>(std::min<std::size_t>(std::max(1u, std::thread::hardware_concurrency()), total));
  if (workers <= 1) {
    for (std::size_t k = 0; k < total; ++k) solve_cell(k);
    return cells;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t k = next++; k < total; k = next++) solve_cell(k);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return cells;
}

}  // namespace procspec::fpa
