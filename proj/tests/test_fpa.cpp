#include <doctest.h>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "procspec/errors.hpp"
#include "procspec/fpa.hpp"
#include "procspec/spa.hpp"

using namespace procspec;

namespace {
const AuctionEnv kUniform2{2, 1.0, ValueDistribution::uniform()};
const AuctionEnv kUniform3{3, 1.0, ValueDistribution::uniform()};

std::vector<AuctionEnv> env_matrix() {
  return {kUniform2, kUniform3, AuctionEnv{2, 0.8, ValueDistribution::power(2.0)},
          AuctionEnv{3, 0.9, ValueDistribution::power(0.5)},
          AuctionEnv{4, 1.0, ValueDistribution::power(1.5)}};
}
}  // namespace

TEST_CASE("subgame closed forms") {
  const auto s = fpa::solve_subgame(kUniform2, 1, 0.2);
  CHECK(s.b_low() == doctest::Approx(0.3125).epsilon(1e-10));
  CHECK(s.b_high() == doctest::Approx(0.5).epsilon(1e-7));
  CHECK_FALSE(s.degenerate());
  for (double v : {0.2, 0.3, 0.4, 0.45})
    CHECK(s.beta(v) == doctest::Approx(0.25 / (1 - v)).epsilon(1e-9));

  const auto t = fpa::solve_subgame(kUniform3, 2, 0.0);
  CHECK(t.b_low() == doctest::Approx(4.0 / 27).epsilon(1e-10));
  CHECK(t.b_high() == doctest::Approx(1.0 / 3).epsilon(1e-7));

  const auto d = fpa::solve_subgame(kUniform2, 1, 0.5);
  CHECK(d.degenerate());
  CHECK(d.b_low() == 0.5);
  CHECK(d.b_high() == 0.5);
  CHECK(d.psi(0.5) == 1.0);
  CHECK(d.psi(0.4999) == 0.0);
  CHECK(d.psi_quantile(0.7) == 0.5);
  CHECK(d.seller_objective(0.6, 0.6) == 0.0);
}

TEST_CASE("subgame pre-conditions") {
  CHECK_THROWS_AS(fpa::solve_subgame(kUniform2, 2, 0.2), ConfigError);
  CHECK_THROWS_AS(fpa::solve_subgame(kUniform2, 0, 0.2), ConfigError);
  CHECK_THROWS_AS(fpa::solve_subgame(kUniform2, 1, 1.0), ConfigError);
  CHECK_THROWS_AS(fpa::solve_subgame({2, 0.5, ValueDistribution::uniform()}, 1, 0.6), ConfigError);
}

TEST_CASE("uniform lower bid matches the hand oracle") {
  for (int m = 1; m <= 2; ++m) {
    for (int i = 0; i < 20; ++i) {
      const double v = i / 20.0;
      const auto lb = fpa::lower_bid(kUniform3, m, v);
      CHECK(lb.b_low == doctest::Approx(oracle::fpa_b_low_uniform(m, v)).epsilon(1e-10));
      CHECK(lb.b_high == doctest::Approx(oracle::fpa_b_high_uniform(m, v)).epsilon(1e-6));
    }
  }
  CHECK(fpa::lower_bid({2, 0.6, ValueDistribution::uniform()}, 1, 0.6).b_low == 0.6);
}

TEST_CASE("subgame invariants across the matrix") {
  for (const auto& env : env_matrix()) {
    for (int m = 1; m <= env.sellers - 1; ++m) {
      for (double frac : {0.0, 0.25, 0.5}) {
        const double c = env.reserve * frac;
        const auto s = fpa::solve_subgame(env, m, c);
        CAPTURE(env.sellers);
        CAPTURE(env.reserve);
        CAPTURE(m);
        CAPTURE(c);
        CHECK(c <= s.b_low());
        CHECK(s.b_low() <= s.b_high());
        CHECK(s.b_high() <= env.reserve);
        CHECK(std::fabs(s.b_low() - s.b_high() * std::pow(s.survival(s.b_high()), m)) < 1e-8);
        CHECK(s.beta(c) == doctest::Approx(s.b_low()));
        CHECK(s.beta(s.b_high()) == doctest::Approx(s.b_high()).epsilon(1e-8));
        CHECK(s.clamp_mass() <= 1e-6);
        if (s.degenerate()) continue;
        double prev_beta = 0, prev_psi = -1;
        for (int i = 0; i <= 100; ++i) {
          const double v = c + (env.reserve - c) * i / 100;
          CHECK(s.beta(v) >= v - 1e-12);
          if (v <= s.b_high()) {
            CHECK(s.beta(v) >= prev_beta);
            prev_beta = s.beta(v);
          }
          const double b = s.b_low() + (s.b_high() - s.b_low()) * i / 100;
          const double p = s.psi(b);
          CHECK(p >= prev_psi);
          CHECK(p >= 0.0);
          CHECK(p <= 1.0);
          prev_psi = p;
        }
        CHECK(s.psi(s.b_low()) == 0.0);
        CHECK(s.psi(s.b_high()) == 1.0);
      }
    }
  }
}

TEST_CASE("speculator indifference on the mixing support") {
  for (const auto& env : env_matrix()) {
    for (int m = 1; m <= env.sellers - 1; ++m) {
      const auto s = fpa::solve_subgame(env, m, 0.1 * env.reserve);
      if (s.degenerate()) continue;
      for (int i = 0; i < 50; ++i) {
        const double b = s.b_low() + (s.b_high() - s.b_low()) * i / 49;
        const double payoff = b * std::pow(s.survival(s.beta_inv(b)), m);
        CHECK(std::fabs(payoff - s.b_low()) < 1e-6);
      }
    }
  }
}

TEST_CASE("psi quantile inverts psi") {
  const auto s = fpa::solve_subgame(kUniform3, 2, 0.1);
  for (double u : {0.0, 0.01, 0.2, 0.5, 0.8, 0.99, 0.9999}) {
    const double b = s.psi_quantile(u);
    CHECK(b >= s.b_low());
    CHECK(b <= s.b_high());
    CHECK(s.psi(b) == doctest::Approx(u).epsilon(1e-8));
  }
  CHECK(s.psi_quantile(1.0) <= s.b_high());
}

TEST_CASE("seller first-order condition") {
  for (const auto& env : env_matrix()) {
    for (int m = 1; m <= env.sellers - 1; ++m) {
      const double c = 0.1 * env.reserve;
      const auto s = fpa::solve_subgame(env, m, c);
      if (s.degenerate()) continue;
      const double hi = std::min(s.b_high(), s.clamp_point());
      for (int i = 1; i < 10; ++i) {
        const double v = c + (hi - c) * i / 10;
        const double h = 1e-5 * (hi - c);
        const double slope =
            (s.seller_objective(v + h, v) - s.seller_objective(v - h, v)) / (2 * h);
        CHECK(std::fabs(slope) < 1e-4);
      }
    }
  }
}

TEST_CASE("benchmark bid") {
  CHECK(fpa::benchmark_bid(kUniform2, 1, 0.2, 0.2) == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(fpa::benchmark_bid(kUniform2, 1, 0.2, 0.4) == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(fpa::benchmark_bid(kUniform2, 1, 0.2, 1.0) == 1.0);
  const AuctionEnv low{2, 0.6, ValueDistribution::uniform()};
  CHECK(fpa::benchmark_bid(low, 1, 0.0, 0.6) == 0.6);
  CHECK(fpa::benchmark_bid(low, 1, 0.0, 0.8) == 0.8);
  CHECK_THROWS_AS(fpa::benchmark_bid(kUniform2, 1, 0.3, 0.2), ConfigError);
  for (int i = 0; i < 10; ++i) {
    const double v = 0.3 + 0.07 * i;
    CHECK(fpa::benchmark_bid(kUniform3, 2, 0.3, v) ==
          doctest::Approx(oracle::benchmark_bid_uniform(2, v)).epsilon(1e-10));
  }
}

TEST_CASE("sellers bid more aggressively than the benchmark") {
  for (const auto& dist : {ValueDistribution::uniform(), ValueDistribution::power(2.0)}) {
    const AuctionEnv env{3, 1.0, dist};
    for (int m = 1; m <= 2; ++m) {
      for (double c : {0.0, 0.2, 0.4}) {
        const auto s = fpa::solve_subgame(env, m, c);
        for (int i = 0; i < 50; ++i) {
          const double v = c + (s.b_high() - c) * i / 50;
          if (v >= s.b_high()) break;
          CHECK(s.beta(v) < fpa::benchmark_bid(env, m, c, v));
        }
      }
    }
  }
}

TEST_CASE("price map") {
  CHECK(fpa::price_from_cutoff(kUniform2, 0.2) == doctest::Approx(0.5425).epsilon(1e-10));
  CHECK(fpa::price_from_cutoff(kUniform2, 0.0) == doctest::Approx(spa::pi0(kUniform2)));
  CHECK(fpa::price_from_cutoff(kUniform2, 1.0) == doctest::Approx(1.0));
  const AuctionEnv low{3, 0.6, ValueDistribution::power(2.0)};
  CHECK(fpa::price_from_cutoff(low, 0.6) == doctest::Approx(0.6));
  for (int i = 0; i <= 40; ++i) {
    const double v = i / 40.0;
    CHECK(fpa::price_from_cutoff(kUniform2, v) ==
          doctest::Approx(oracle::fpa_price_uniform_n2(v)).epsilon(1e-9));
  }
}

TEST_CASE("price map is strictly increasing") {
  for (const auto& env : env_matrix()) {
    double prev = -1;
    for (int i = 0; i < 200; ++i) {
      const double p = fpa::price_from_cutoff(env, env.reserve * i / 199);
      CHECK(p > prev);
      prev = p;
    }
  }
}

TEST_CASE("cutoff map") {
  CHECK(fpa::cutoff_from_price(kUniform2, 0.5425) == doctest::Approx(0.2).epsilon(1e-8));
  CHECK(fpa::cutoff_from_price(kUniform2, spa::pi0(kUniform2)) == 0.0);
  CHECK(fpa::cutoff_from_price(kUniform2, 1.0) == 1.0);
  CHECK_THROWS_AS(fpa::cutoff_from_price(kUniform2, 1.2), ConfigError);
  const AuctionEnv env{3, 0.9, ValueDistribution::power(0.5)};
  for (double v : {0.1, 0.3, 0.6, 0.85})
    CHECK(fpa::cutoff_from_price(env, fpa::price_from_cutoff(env, v)) ==
          doctest::Approx(v).epsilon(1e-8));
}

TEST_CASE("profit") {
  CHECK(fpa::profit(kUniform2, 0.2) == doctest::Approx(-0.077).epsilon(1e-10));
  CHECK(fpa::profit(kUniform2, 0.5) == doctest::Approx(-0.125).epsilon(1e-10));
  CHECK(fpa::profit(kUniform2, 0.0) == 0.0);
  for (int i = 1; i <= 40; ++i) {
    const double v = i / 40.0;
    CHECK(fpa::profit(kUniform2, v) ==
          doctest::Approx(oracle::fpa_profit_uniform_n2(v)).epsilon(1e-9));
  }
  for (const auto& env : env_matrix()) {
    const double f = env.dist.cdf(env.reserve);
    const double at_r = (1 - std::pow(1 - f, env.sellers) - env.sellers * f) * env.reserve;
    CHECK(fpa::profit(env, env.reserve) == doctest::Approx(at_r).epsilon(1e-10));
    CHECK(at_r < 0);
  }
}

TEST_CASE("second-price speculation is more profitable") {
  for (const auto& env : env_matrix()) {
    for (int i = 1; i < 200; ++i) {
      const double v = env.reserve * i / 200;
      CHECK(spa::profit(env, v) > fpa::profit(env, v));
    }
    CHECK(spa::optimize(env).profit > fpa::optimize(env, {}, false).profit);
  }
}

TEST_CASE("optimize") {
  const auto u = fpa::optimize(kUniform2);
  CHECK(u.profit >= 0);
  double best = 0;
  for (int i = 0; i <= 10000; ++i) best = std::max(best, oracle::fpa_profit_uniform_n2(i / 1e4));
  CHECK(u.profit >= best - 1e-9);
  CHECK(u.profit <= best + 1e-9);
  CHECK(u.subgames.size() == 1);

  const auto steep = fpa::optimize({2, 0.5, ValueDistribution::power(3.0)}, {}, false);
  CHECK(steep.profit <= 0);
  CHECK(steep.cutoff == 0.0);

  const auto flat = fpa::optimize({2, 0.9, ValueDistribution::power(0.3)}, {}, false);
  CHECK(flat.profit > 0);
  CHECK(flat.cutoff > 0);
}

TEST_CASE("region scan classification") {
  const std::vector<double> etas{0.05, 1.0, 3.0};
  const std::vector<double> rs{0.05, 1.0};
  const auto cells = fpa::region_scan(2, etas, rs);
  REQUIRE(cells.size() == 6);
  CHECK(cells[0].eta == 0.05);
  CHECK(cells[1].reserve == 1.0);
  CHECK(cells[1].status == fpa::RegionStatus::Profitable);
  CHECK(cells[4].status == fpa::RegionStatus::Unprofitable);
  const auto u = fpa::optimize(kUniform2, {}, false);
  const bool uniform_profitable = u.profit > 1e-6;
  CHECK((cells[3].status == fpa::RegionStatus::Profitable) == uniform_profitable);
}
