#pragma once

#include <optional>

#include "procspec/auction_env.hpp"
#include "procspec/numerics.hpp"

// Speculation in second-price procurement auctions. Sellers bid truthfully in
// the auction; a speculator holding any item bids 0 on one of them and
// withholds the rest, so the cutoff/price maps and the profit all reduce to
// one-dimensional integrals of the seller survival function.
namespace procspec::spa {

// Split of the two-seller profit into its three economic sources.
struct Decomposition {
  double gain_withholding = 0;
  double loss_overcompensation = 0;
  double loss_value_destruction = 0;
};

struct SpaEquilibrium {
  double cutoff = 0;
  double price = 0;
  double profit = 0;
  double pi0 = 0;
  std::optional<Decomposition> decomposition;  // N = 2 only
};

// Interim payoff of a zero-value seller without speculation:
// integral over [0, r] of (1 - F)^(N-1).
double pi0(const AuctionEnv& env, const Tolerances& tol = {});

// Acceptance cutoff induced by an offer p in [0, r]; 0 when p <= pi0.
// Throws ConfigError for p outside [0, r].
double cutoff_from_price(const AuctionEnv& env, double price, const Tolerances& tol = {});

// p*(v) = v + integral over [v, r] of (1 - F)^(N-1).
double price_from_cutoff(const AuctionEnv& env, double cutoff, const Tolerances& tol = {});

// y(m, v): speculator's expected receipt against m sellers whose values are
// drawn from F truncated below at v. Requires 0 <= v < 1 and m >= 0.
double expected_payment(const AuctionEnv& env, int m, double cutoff, const Tolerances& tol = {});

// Expected speculator profit at cutoff v; exactly 0 at v = 0.
double profit(const AuctionEnv& env, double cutoff, const Tolerances& tol = {});

// Requires N = 2 (ConfigError otherwise).
Decomposition decompose_n2(const AuctionEnv& env, double cutoff, const Tolerances& tol = {});

// lim Pi*(v) / F(v)^2 as v -> 0: C(N,2) * integral over [0, r] of (1-F)^(N-2).
double limit_ratio(const AuctionEnv& env, const Tolerances& tol = {});

SpaEquilibrium evaluate(const AuctionEnv& env, double cutoff, const Tolerances& tol = {});

// Profit-maximizing cutoff by global grid search over [0, r].
SpaEquilibrium optimize(const AuctionEnv& env, const Tolerances& tol = {});

}  // namespace procspec::spa
