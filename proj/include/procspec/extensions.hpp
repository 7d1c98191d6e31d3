#pragma once

#include <optional>
#include <vector>

#include "procspec/auction_env.hpp"
#include "procspec/numerics.hpp"

// Second-price speculation with asymmetric sellers and limited access, and the
// enhanced scheme in which the speculator sells surplus items back to the
// acceptors in a uniform-price (K+1)-st price auction.
namespace procspec::ext {

// The speculator can approach only the sellers in `access`; seller j in access
// accepts iff v_j < cutoffs[k] where access[k] = j.
struct AsymScenario {
  int sellers = 2;
  double reserve = 1.0;
  std::vector<ValueDistribution> dists;
  std::vector<int> access;
  std::vector<double> cutoffs;

  // Throws ConfigError on size mismatch, duplicates, indices or cutoffs out of
  // range, or an empty access set.
  void validate() const;
  bool in_access(int seller) const;
};

// All sellers approached with the same cutoff.
AsymScenario symmetric_scenario(const AuctionEnv& env, double cutoff);

constexpr int kMaxEnumeratedAccess = 20;

// Acquisition prices, aligned with scenario.access.
std::vector<double> asym_prices(const AsymScenario& sc, const Tolerances& tol = {});

// Exact expected profit by enumerating acceptor sets. Throws ConfigError when
// |access| exceeds kMaxEnumeratedAccess.
double asym_profit(const AsymScenario& sc, const Tolerances& tol = {});

enum class TrendStatus { Satisfied, Violated, Inconclusive };

struct Condition1Result {
  TrendStatus status = TrendStatus::Inconclusive;
  std::optional<std::pair<int, int>> witness;  // (k, k') in access
};

// Numerical check that some pair in access dominates every excluded seller in
// the lower tail: v F_i(v) / F_k(v) -> 0 for all i outside access, for both k
// in the pair. Decided from log-log slopes over v = 1e-2 .. 1e-6.
Condition1Result check_condition1(const AsymScenario& sc);

struct EnhancedOutcome {
  std::vector<double> prices;
  double profit = 0;
  double refund_revenue_expectation = 0;
  bool knockout = false;  // every cutoff at r and access = all sellers
};

std::vector<double> enhanced_prices(const AsymScenario& sc, const Tolerances& tol = {});
EnhancedOutcome enhanced_profit(const AsymScenario& sc, const Tolerances& tol = {});

// Knockout benchmark: a second-price purchase with reserve r resold at r,
// r - E[min(second-lowest value, r)]. Requires access to every seller.
double knockout_resale_profit(const AsymScenario& sc, const Tolerances& tol = {});

struct DeviationPayoffs {
  double equilibrium;
  double deviation;
};

constexpr double kDeviationUndercut = 1e-6;

// Cutoff-type payoff under first-price knockout versus undercutting the
// speculator at r - 1e-6. Requires v < r and F(r) < 1.
DeviationPayoffs fpa_knockout_deviation(const AuctionEnv& env, double v, const Tolerances& tol = {});

}  // namespace procspec::ext
