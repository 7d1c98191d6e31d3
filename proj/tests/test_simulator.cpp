#include <doctest.h>

#include <cmath>
#include <sstream>
#include <string>

#include "procspec/errors.hpp"
#include "procspec/extensions.hpp"
#include "procspec/fpa.hpp"
#include "procspec/simulator.hpp"
#include "procspec/spa.hpp"

using namespace procspec;

namespace {

const AuctionEnv kUniform2{2, 1.0, ValueDistribution::uniform()};

sim::SimConfig config(const AuctionEnv& env, double cutoff, sim::Format format,
                      std::uint64_t reps = 200000, std::uint64_t seed = 11) {
  sim::SimConfig c;
  c.scenario = ext::symmetric_scenario(env, cutoff);
  c.format = format;
  c.replications = reps;
  c.seed = seed;
  if (format == sim::Format::Fpa) sim::attach_fpa_subgames(c);
  return c;
}

double tolerance(const sim::Estimate& e) { return std::max(3 * e.std_error, 1e-9); }

bool near(const sim::Estimate& e, double target) {
  return std::fabs(e.mean - target) <= tolerance(e);
}

bool same(const sim::Estimate& a, const sim::Estimate& b) {
  return a.mean == b.mean && a.std_error == b.std_error;
}

}  // namespace

TEST_CASE("formats parse") {
  CHECK(sim::parse_format("spa") == sim::Format::Spa);
  CHECK(sim::parse_format("fpa") == sim::Format::Fpa);
  CHECK(sim::parse_format("enhanced") == sim::Format::SpaEnhanced);
  CHECK(sim::parse_format("spa-enhanced") == sim::Format::SpaEnhanced);
  CHECK_THROWS_AS(sim::parse_format("dutch"), ConfigError);
  CHECK(sim::to_string(sim::Format::SpaEnhanced) == "enhanced");
}

TEST_CASE("speculator profit agrees with the engines") {
  const auto s = sim::simulate(config(kUniform2, 0.2, sim::Format::Spa));
  CHECK(near(s.speculator_profit, 0.024));
  const auto f = sim::simulate(config(kUniform2, 0.2, sim::Format::Fpa));
  CHECK(near(f.speculator_profit, -0.077));
  CHECK(f.trade_frequency == 1.0);
}

TEST_CASE("no acquisitions reduce to the plain auction") {
  for (auto format : {sim::Format::Spa, sim::Format::Fpa, sim::Format::SpaEnhanced}) {
    const auto r = sim::simulate(config(kUniform2, 0.0, format, 20000));
    CHECK(r.speculator_profit.mean == 0.0);
    CHECK(r.speculator_profit.std_error == 0.0);
    CHECK(r.efficiency_loss.mean == 0.0);
    CHECK(r.seller_surplus_gain.mean == 0.0);
    CHECK(r.auctioneer_cost_increase.mean == 0.0);
  }
  // Both plain auctions cost E[second-lowest] = 2/3 in expectation.
  const auto f = sim::simulate(config(kUniform2, 0.0, sim::Format::Fpa));
  CHECK(near(f.auctioneer_cost, 2.0 / 3));
}

TEST_CASE("seed determinism") {
  const auto c = config({3, 0.8, ValueDistribution::power(2.0)}, 0.3, sim::Format::Fpa, 50000, 5);
  const auto a = sim::simulate(c);
  const auto b = sim::simulate(c);
  CHECK(same(a.speculator_profit, b.speculator_profit));
  CHECK(same(a.seller_surplus_total, b.seller_surplus_total));
  CHECK(same(a.auctioneer_cost, b.auctioneer_cost));
  CHECK(same(a.efficiency_loss, b.efficiency_loss));
  CHECK(same(a.interim_payoff_at_cutoff, b.interim_payoff_at_cutoff));
  CHECK(a.trade_frequency == b.trade_frequency);
  auto other = c;
  other.seed = 6;
  CHECK(sim::simulate(other).speculator_profit.mean != a.speculator_profit.mean);
}

TEST_CASE("trace output does not change results") {
  auto c = config(kUniform2, 0.3, sim::Format::Spa, 1000);
  const auto plain = sim::simulate(c);
  std::ostringstream trace;
  c.trace = &trace;
  const auto traced = sim::simulate(c);
  CHECK(same(plain.speculator_profit, traced.speculator_profit));
  std::istringstream in(trace.str());
  std::string line;
  int lines = 0;
  std::getline(in, line);
  CHECK(line.rfind("chunk,rep,acceptors", 0) == 0);
  while (std::getline(in, line)) ++lines;
  CHECK(lines == 1000);
}

TEST_CASE("configuration errors surface before play") {
  auto c = config(kUniform2, 0.2, sim::Format::Fpa, 100);
  c.subgames.clear();
  CHECK_THROWS_AS(sim::simulate(c), ConfigError);
  auto r = config(kUniform2, 0.2, sim::Format::Spa, 100);
  r.replications = 0;
  CHECK_THROWS_AS(sim::simulate(r), ConfigError);
  r.replications = 10;
  r.auctioneer_value = 0.5;
  CHECK_THROWS_AS(sim::simulate(r), ConfigError);

  sim::SimConfig limited;
  limited.format = sim::Format::Fpa;
  limited.scenario = ext::symmetric_scenario({3, 1.0, ValueDistribution::uniform()}, 0.2);
  limited.scenario.access = {0, 1};
  limited.scenario.cutoffs = {0.2, 0.2};
  CHECK_THROWS_AS(sim::simulate(limited), ConfigError);
}

TEST_CASE("welfare accounts for two sellers") {
  const auto r = sim::simulate(config(kUniform2, 0.5, sim::Format::Spa));
  const auto d = spa::decompose_n2(kUniform2, 0.5);
  CHECK(near(r.efficiency_loss, d.loss_value_destruction));
  CHECK(near(r.seller_surplus_gain, d.loss_overcompensation));
  CHECK(near(r.auctioneer_cost_increase, d.gain_withholding));
  CHECK(r.seller_surplus_gain.mean >= 0);
  CHECK(r.auctioneer_cost_increase.mean >= 0);
  CHECK(r.efficiency_loss.mean >= 0);
}

TEST_CASE("auctioneer value shifts levels, not differences") {
  auto c = config({2, 0.7, ValueDistribution::power(2.0)}, 0.3, sim::Format::Spa, 20000);
  const auto base = sim::simulate(c);
  c.auctioneer_value = 1.0;
  const auto shifted = sim::simulate(c);
  CHECK(shifted.speculator_profit.mean == base.speculator_profit.mean);
  CHECK(shifted.efficiency_loss.mean == doctest::Approx(base.efficiency_loss.mean).epsilon(1e-12));
}

TEST_CASE("interim payoffs") {
  // Conditioned on one rival only, the cutoff type earns b_low - cutoff.
  const auto fpa_cfg = config(kUniform2, 0.2, sim::Format::Fpa, 20000);
  sim::ProbeOptions one;
  one.subgame_rivals = 1;
  const auto sub = sim::interim_payoff_probe(fpa_cfg, 0.2, one);
  CHECK(near(sub.reject, 0.1125));

  // Full game indifference at the cutoff.
  const auto spa_cfg = config(kUniform2, 0.5, sim::Format::Spa);
  const auto ind = sim::interim_payoff_probe(spa_cfg, 0.5);
  const double se = std::hypot(ind.accept.std_error, ind.reject.std_error);
  CHECK(std::fabs(ind.accept.mean - ind.reject.mean) <= 3 * se + 1e-9);

  // The top type never wins; accepting pays p - 1.
  const auto top = sim::interim_payoff_probe(spa_cfg, 1.0);
  CHECK(top.reject.mean == 0.0);
  CHECK(top.accept.mean == doctest::Approx(spa::price_from_cutoff(kUniform2, 0.5) - 1.0));

  CHECK_THROWS_AS(sim::interim_payoff_probe(spa_cfg, 1.5), ConfigError);
  CHECK_THROWS_AS(sim::interim_payoff_probe(spa_cfg, 0.5, one), ConfigError);
}

TEST_CASE("limited access indifference") {
  sim::SimConfig c;
  const auto u = ValueDistribution::uniform();
  c.scenario.sellers = 3;
  c.scenario.reserve = 1.0;
  c.scenario.dists = {u, u, u};
  c.scenario.access = {0, 1};
  c.scenario.cutoffs = {0.3, 0.3};
  c.replications = 200000;
  c.seed = 3;
  const auto prices = ext::asym_prices(c.scenario);
  const auto probe = sim::interim_payoff_probe(c, 0.3);
  CHECK(probe.accept.mean == doctest::Approx(prices[0] - 0.3));
  CHECK(near(probe.reject, prices[0] - 0.3));
  CHECK(near(sim::simulate(c).speculator_profit, ext::asym_profit(c.scenario)));
}

TEST_CASE("enhanced speculation") {
  const auto half = sim::simulate(config(kUniform2, 0.5, sim::Format::SpaEnhanced));
  CHECK(near(half.speculator_profit,
             ext::enhanced_profit(ext::symmetric_scenario(kUniform2, 0.5)).profit));
  const auto ko = sim::simulate(config(kUniform2, 1.0, sim::Format::SpaEnhanced));
  CHECK(near(ko.speculator_profit, 1.0 / 3));
  CHECK(ko.efficiency_loss.mean == 0.0);

  const AuctionEnv env3{3, 0.8, ValueDistribution::power(0.5)};
  const auto three = sim::simulate(config(env3, 0.3, sim::Format::SpaEnhanced));
  CHECK(near(three.speculator_profit,
             ext::enhanced_profit(ext::symmetric_scenario(env3, 0.3)).profit));
  const auto probe = sim::interim_payoff_probe(config(env3, 0.3, sim::Format::SpaEnhanced), 0.3);
  const double se = std::hypot(probe.accept.std_error, probe.reject.std_error);
  CHECK(std::fabs(probe.accept.mean - probe.reject.mean) <= 3 * se + 1e-9);
}

TEST_CASE("first-price interim indifference") {
  const AuctionEnv env{3, 1.0, ValueDistribution::uniform()};
  const auto c = config(env, 0.25, sim::Format::Fpa, 100000);
  const auto probe = sim::interim_payoff_probe(c, 0.25);
  const double p = fpa::price_from_cutoff(env, 0.25);
  CHECK(probe.accept.mean == doctest::Approx(p - 0.25));
  CHECK(near(probe.reject, p - 0.25));
  for (int m = 1; m <= 2; ++m) {
    sim::ProbeOptions o;
    o.subgame_rivals = m;
    const auto s = sim::interim_payoff_probe(c, 0.25, o);
    CHECK(near(s.reject, fpa::lower_bid(env, m, 0.25).b_low - 0.25));
  }
}
