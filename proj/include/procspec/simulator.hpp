#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "procspec/extensions.hpp"
#include "procspec/fpa.hpp"

// Monte Carlo play of the speculation game under the equilibrium strategies.
// Every replication also plays the no-speculation auction on the same value
// draws, so differences against it have small variance.
namespace procspec::sim {

enum class Format { Spa, Fpa, SpaEnhanced };

std::string to_string(Format format);
// Accepts "spa", "fpa", "enhanced" (also "spa-enhanced").
Format parse_format(const std::string& name);

struct Estimate {
  double mean = 0;
  double std_error = 0;
};

struct SimConfig {
  ext::AsymScenario scenario;
  Format format = Format::Spa;
  std::uint64_t replications = 100000;
  std::uint64_t seed = 0;
  // Auctioneer's gross value of the item; r when unset.
  std::optional<double> auctioneer_value;
  // First-price only: subgame solutions for the scenario's common cutoff,
  // indexed by m - 1. See attach_fpa_subgames().
  std::vector<fpa::FpaSubgameSolution> subgames;
  // Per-replication CSV rows when set; forces single-threaded play.
  std::ostream* trace = nullptr;

  // Throws ConfigError on bad input, including missing subgames.
  void validate() const;
  double gross_value() const { return auctioneer_value.value_or(scenario.reserve); }
};

// First-price play needs symmetric sellers, full access and one cutoff.
AuctionEnv symmetric_env(const ext::AsymScenario& sc);
void attach_fpa_subgames(SimConfig& config, const Tolerances& tol = {});

struct SimReport {
  Estimate speculator_profit;
  Estimate seller_surplus_total;
  Estimate auctioneer_cost;
  Estimate efficiency_loss;
  // Rejecting payoff of the first accessible seller at its cutoff value.
  Estimate interim_payoff_at_cutoff;
  double trade_frequency = 0;
  // Paired differences against the no-speculation auction.
  Estimate seller_surplus_gain;
  Estimate auctioneer_cost_increase;
  std::uint64_t replications = 0;
};

SimReport simulate(const SimConfig& config, const Tolerances& tol = {});

struct ProbeOptions {
  // Probed seller; the first accessible seller when negative.
  int seller = -1;
  // First-price only: condition on exactly m sellers rejecting, the probed
  // one included, rather than drawing acceptance decisions.
  std::optional<int> subgame_rivals;
};

struct ProbeResult {
  Estimate accept;
  Estimate reject;
};

// Interim payoff of a seller whose value is fixed at v, under both decisions.
ProbeResult interim_payoff_probe(const SimConfig& config, double v, const ProbeOptions& options = {},
                                 const Tolerances& tol = {});

}  // namespace procspec::sim
