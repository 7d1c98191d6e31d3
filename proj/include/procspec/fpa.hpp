#pragma once

#include <optional>
#include <vector>

#include "procspec/auction_env.hpp"
#include "procspec/numerics.hpp"

// Speculation in first-price procurement auctions.
//
// After acquisitions, a speculator with no use value bids against the m
// sellers who rejected, whose values follow F truncated below at the cutoff.
// The subgame has a symmetric equilibrium in which sellers bid
// beta(v) = b_low / [1 - G(v)]^m up to b_high and truthfully above, while the
// speculator mixes over [b_low, b_high].
namespace procspec::fpa {

/// Solved subgame <r, m, G(.; cutoff)>. Immutable and cheap to share.
///
/// The speculator's mixing CDF is tabulated in value space: the exponent
///   H(x) = integral over [cutoff, x] of
///          [beta + (m-1) t] / ([beta - t][1 - G]) dG(t)
/// is accumulated on a grid that refines geometrically toward b_high, where
/// the integrand blows up. The table stops at the first node x_clamp where
/// 1 - exp(-H) >= 1 - 1e-6 (or where the integrand loses precision), and the
/// CDF is clamped to 1 from there on; clamp_mass() is the mass moved.
class FpaSubgameSolution {
 public:
  FpaSubgameSolution(const AuctionEnv& env, int m, double cutoff, const Tolerances& tol = {});

  int rivals() const { return m_; }
  double cutoff() const { return cutoff_; }
  double b_low() const { return b_low_; }
  double b_high() const { return b_high_; }
  // True when b_low == cutoff: the speculator bids b_low with certainty.
  bool degenerate() const { return degenerate_; }

  double survival(double v) const;  // 1 - G(v; cutoff)
  double beta(double v) const;
  double beta_inv(double bid) const;

  double psi(double bid) const;
  // Psi(beta(x)) evaluated directly in value space.
  double psi_at_value(double x) const;
  double psi_quantile(double u) const;

  double clamp_point() const { return nodes_.empty() ? cutoff_ : nodes_.back(); }
  double clamp_mass() const { return clamp_mass_; }

  // Expected payoff of a type-v seller who bids as type v_hat.
  double seller_objective(double v_hat, double v) const;

 private:
  double psi_exponent_density(double x) const;
  double psi_exponent(double x) const;

  ValueDistribution dist_;
  double reserve_;
  Tolerances tol_;
  int m_;
  double cutoff_;
  double base_tail_;  // 1 - F(cutoff)
  double b_low_ = 0;
  double b_high_ = 0;
  bool degenerate_ = false;
  std::vector<double> nodes_;      // value-space nodes, nodes_[0] = cutoff
  std::vector<double> exponents_;  // H at each node
  double clamp_mass_ = 0;
};

struct FpaEquilibrium {
  double cutoff = 0;
  double price = 0;
  double profit = 0;
  std::vector<FpaSubgameSolution> subgames;  // m = 1 .. N-1
};

struct LowerBid {
  double b_low;
  double b_high;
};

// b_low(m, v*) = max over b in [v*, r] of b [1 - G(b; v*)]^m and b_high its
// smallest maximizer. For v* >= r both equal r.
LowerBid lower_bid(const AuctionEnv& env, int m, double cutoff, const Tolerances& tol = {});

// Requires 1 <= m <= N-1 and 0 <= cutoff <= r with cutoff < 1.
FpaSubgameSolution solve_subgame(const AuctionEnv& env, int m, double cutoff,
                                 const Tolerances& tol = {});

std::vector<FpaSubgameSolution> solve_subgames(const AuctionEnv& env, double cutoff,
                                               const Tolerances& tol = {});

// Bid if the speculator were just another seller with a value from G.
double benchmark_bid(const AuctionEnv& env, int m, double cutoff, double v,
                     const Tolerances& tol = {});

double price_from_cutoff(const AuctionEnv& env, double cutoff, const Tolerances& tol = {});
double cutoff_from_price(const AuctionEnv& env, double price, const Tolerances& tol = {});
double profit(const AuctionEnv& env, double cutoff, const Tolerances& tol = {});

// Subgames are solved only when `with_subgames` is set; they are the
// expensive part.
FpaEquilibrium evaluate(const AuctionEnv& env, double cutoff, const Tolerances& tol = {},
                        bool with_subgames = true);
FpaEquilibrium optimize(const AuctionEnv& env, const Tolerances& tol = {},
                        bool with_subgames = true);

enum class RegionStatus { Profitable, Unprofitable, Indeterminate };

struct RegionCell {
  double eta;
  double reserve;
  double profit;
  double cutoff;
  RegionStatus status;
};

// Optimal FPA profit on an (eta, r) grid with F(v) = v^eta, eta-major order.
// A cell is profitable when the optimum exceeds sign_margin, unprofitable
// when the optimum is the no-acquisition cutoff 0, and indeterminate when a
// positive cutoff wins by no more than sign_margin.
std::vector<RegionCell> region_scan(int sellers, const std::vector<double>& eta_grid,
                                    const std::vector<double>& reserve_grid,
                                    double sign_margin = 1e-6, const Tolerances& tol = {});

}  // namespace procspec::fpa
