#include "procspec/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <thread>

#include "procspec/errors.hpp"
#include "procspec/rng.hpp"

namespace procspec::sim {
namespace {

// Work is split into a fixed number of streams so results do not depend on
// the thread count.
constexpr unsigned kChunks = 16;
constexpr double kInf = std::numeric_limits<double>::infinity();

struct Accumulator {
  std::uint64_t n = 0;
  double mean = 0;
  double m2 = 0;

  void add(double x) {
    ++n;
    const double d = x - mean;
    mean += d / static_cast<double>(n);
    m2 += d * (x - mean);
  }

  void merge(const Accumulator& o) {
    if (o.n == 0) return;
    if (n == 0) {
      *this = o;
      return;
    }
    const double total = static_cast<double>(n + o.n);
    const double d = o.mean - mean;
    mean += d * static_cast<double>(o.n) / total;
    m2 += o.m2 + d * d * static_cast<double>(n) * static_cast<double>(o.n) / total;
    n += o.n;
  }

  Estimate estimate() const {
    if (n < 2) return {mean, 0.0};
    const double var = m2 / static_cast<double>(n - 1);
    return {mean, std::sqrt(var / static_cast<double>(n))};
  }
};

bool same_law(const ValueDistribution& a, const ValueDistribution& b) {
  return a.family() == b.family() && a.eta() == b.eta() && a.knots() == b.knots();
}

struct Outcome {
  double profit = 0;
  double sellers = 0;
  double cost = 0;
  double welfare = 0;
  bool trade = false;
};

class Game {
 public:
  Game(const SimConfig& config, const Tolerances& tol) : config_(config), tol_(tol) {
    const auto& sc = config.scenario;
    n_ = sc.sellers;
    reserve_ = sc.reserve;
    gross_ = config.gross_value();
    cutoff_.assign(static_cast<std::size_t>(n_), -1.0);
    price_.assign(static_cast<std::size_t>(n_), 0.0);
    for (std::size_t k = 0; k < sc.access.size(); ++k) cutoff_[sc.access[k]] = sc.cutoffs[k];
    if (config.format == Format::Fpa) {
      env_ = symmetric_env(sc);
      const double p = fpa::price_from_cutoff(env_, sc.cutoffs.front(), tol);
      for (int j : sc.access) price_[j] = p;
    } else {
      const auto prices = config.format == Format::Spa ? ext::asym_prices(sc, tol)
                                                       : ext::enhanced_prices(sc, tol);
      for (std::size_t k = 0; k < sc.access.size(); ++k) price_[sc.access[k]] = prices[k];
    }
  }

  int sellers() const { return n_; }
  bool accepts(int i, double v) const { return cutoff_[i] >= 0 && v < cutoff_[i]; }

  // Seller gains are added into `gain`, which must be zeroed by the caller.
  Outcome play(const std::vector<double>& v, const std::vector<char>& accepted, double spec_u,
               std::vector<double>& gain) const {
    int acceptors = 0;
    for (int i = 0; i < n_; ++i) acceptors += accepted[i] ? 1 : 0;
    if (acceptors == 0) return counterfactual(v, &gain);

    Outcome o;
    o.trade = true;
    double paid = 0;
    int delivered = -1;
    int low_rejector = -1;
    double acquired_value = 0;
    for (int i = 0; i < n_; ++i) {
      if (accepted[i]) {
        paid += price_[i];
        gain[i] += price_[i] - v[i];
        acquired_value += v[i];
        if (delivered < 0 || v[i] < v[delivered]) delivered = i;
      } else if (low_rejector < 0 || v[i] < v[low_rejector]) {
        low_rejector = i;
      }
    }
    const double rejector_value = low_rejector < 0 ? kInf : v[low_rejector];

    if (config_.format == Format::Fpa) {
      double spec_bid = reserve_;
      const auto index = static_cast<std::size_t>(n_ - acceptors - 1);
      if (acceptors < n_ && index >= config_.subgames.size() && cutoff_[0] < reserve_)
        throw ConfigError("missing first-price subgame solution for m = " +
                          std::to_string(n_ - acceptors));
      // With the cutoff at r every rejecting bid is at least r, so the
      // speculator's bid of r wins the tie.
      if (acceptors < n_ && index < config_.subgames.size()) {
        const auto& sub = config_.subgames[index];
        spec_bid = sub.psi_quantile(spec_u);
        const double rival_bid = sub.beta(rejector_value);
        if (rival_bid <= reserve_ && rival_bid < spec_bid) {
          // A rejecting seller undercuts; every acquired item is lost.
          gain[low_rejector] += rival_bid - rejector_value;
          o.cost = rival_bid;
          o.profit = -paid;
          o.welfare = gross_ - rejector_value - acquired_value;
          return sum_sellers(o, gain);
        }
      }
      o.cost = spec_bid;
      o.profit = spec_bid - paid;
      o.welfare = gross_ - acquired_value;
      return sum_sellers(o, gain);
    }

    const double receipt = std::min(rejector_value, reserve_);
    o.cost = receipt;
    o.profit = receipt - paid;
    if (config_.format == Format::SpaEnhanced && acceptors >= 2) {
      // Return auction: all acceptors but the lowest buy back at its value.
      const double refund_price = v[delivered];
      for (int i = 0; i < n_; ++i) {
        if (!accepted[i] || i == delivered) continue;
        gain[i] += v[i] - refund_price;
      }
      o.profit += (acceptors - 1) * refund_price;
      o.welfare = gross_ - v[delivered];
    } else {
      o.welfare = gross_ - acquired_value;
    }
    return sum_sellers(o, gain);
  }

  Outcome counterfactual(const std::vector<double>& v, std::vector<double>* gain) const {
    Outcome o;
    int winner = 0;
    for (int i = 1; i < n_; ++i)
      if (v[i] < v[winner]) winner = i;
    if (v[winner] > reserve_) return o;
    o.trade = true;
    double price;
    if (config_.format == Format::Fpa) {
      price = fpa::benchmark_bid(env_, n_ - 1, 0.0, v[winner], tol_);
    } else {
      double second = kInf;
      for (int i = 0; i < n_; ++i)
        if (i != winner) second = std::min(second, v[i]);
      price = std::min(second, reserve_);
    }
    o.cost = price;
    o.sellers = price - v[winner];
    o.welfare = gross_ - v[winner];
    if (gain) (*gain)[winner] += o.sellers;
    return o;
  }

 private:
  static Outcome sum_sellers(Outcome o, const std::vector<double>& gain) {
    o.sellers = 0;
    for (double g : gain) o.sellers += g;
    return o;
  }

  const SimConfig& config_;
  Tolerances tol_;
  AuctionEnv env_;
  int n_ = 0;
  double reserve_ = 1;
  double gross_ = 1;
  std::vector<double> cutoff_;
  std::vector<double> price_;
};

struct ChunkResult {
  Accumulator profit, sellers, cost, loss, interim, seller_gain, cost_increase;
  std::uint64_t trades = 0;
};

std::uint64_t chunk_size(std::uint64_t total, unsigned c) {
  return total / kChunks + (c < total % kChunks ? 1 : 0);
}

// Runs body(chunk) for every chunk, on several threads unless `serial`.
template <class Body>
void run_chunks(bool serial, Body&& body) {
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const unsigned workers = serial ? 1u : std::min(hw, kChunks);
  if (workers == 1) {
    for (unsigned c = 0; c < kChunks; ++c) body(c);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (unsigned c = w; c < kChunks; c += workers) body(c);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

int probed_seller(const SimConfig& config, int requested) {
  const auto& sc = config.scenario;
  const int seller = requested < 0 ? sc.access.front() : requested;
  if (seller >= sc.sellers) throw ConfigError("probed seller index out of range");
  if (!sc.in_access(seller)) throw ConfigError("probed seller must be in the access set");
  return seller;
}

}  // namespace

std::string to_string(Format format) {
  switch (format) {
    case Format::Spa:
      return "spa";
    case Format::Fpa:
      return "fpa";
    case Format::SpaEnhanced:
      return "enhanced";
  }
  return "spa";
}

Format parse_format(const std::string& name) {
  if (name == "spa") return Format::Spa;
  if (name == "fpa") return Format::Fpa;
  if (name == "enhanced" || name == "spa-enhanced") return Format::SpaEnhanced;
  throw ConfigError("unknown format '" + name + "' (expected spa, fpa or enhanced)");
}

AuctionEnv symmetric_env(const ext::AsymScenario& sc) {
  sc.validate();
  if (static_cast<int>(sc.access.size()) != sc.sellers)
    throw ConfigError("first-price play requires access to every seller");
  for (const auto& d : sc.dists)
    if (!same_law(d, sc.dists.front()))
      throw ConfigError("first-price play requires identically distributed sellers");
  for (double c : sc.cutoffs)
    if (c != sc.cutoffs.front()) throw ConfigError("first-price play requires one common cutoff");
  AuctionEnv env{sc.sellers, sc.reserve, sc.dists.front()};
  env.validate();
  return env;
}

void attach_fpa_subgames(SimConfig& config, const Tolerances& tol) {
  const AuctionEnv env = symmetric_env(config.scenario);
  config.subgames.clear();
  const double cutoff = config.scenario.cutoffs.front();
  if (cutoff < 1) config.subgames = fpa::solve_subgames(env, cutoff, tol);
}

void SimConfig::validate() const {
  scenario.validate();
  if (replications < 1) throw ConfigError("replications must be at least 1");
  if (!(gross_value() >= scenario.reserve))
    throw ConfigError("auctioneer value V0 must be at least r");
  if (format != Format::Fpa) return;
  const AuctionEnv env = symmetric_env(scenario);
  const double cutoff = scenario.cutoffs.front();
  const double accept = env.dist.cdf(cutoff);
  if (accept <= 0 || accept >= 1) return;  // no mixed subgame can occur
  for (int m = 1; m <= env.sellers - 1; ++m) {
    const bool present = static_cast<int>(subgames.size()) >= m &&
                         subgames[m - 1].rivals() == m && subgames[m - 1].cutoff() == cutoff;
    if (!present)
      throw ConfigError("missing first-price subgame solution for m = " + std::to_string(m) +
                        " at cutoff " + std::to_string(cutoff));
  }
}

SimReport simulate(const SimConfig& config, const Tolerances& tol) {
  config.validate();
  const Game game(config, tol);
  const int n = game.sellers();
  const auto& sc = config.scenario;
  const int probe = sc.access.front();
  const double probe_value = sc.cutoffs.front();

  if (config.trace) {
    *config.trace << "chunk,rep,acceptors,speculator_profit,seller_surplus,auctioneer_cost,"
                     "efficiency_loss";
    for (int i = 0; i < n; ++i) *config.trace << ",v" << i;
    *config.trace << '\n';
  }

  std::vector<ChunkResult> results(kChunks);
  run_chunks(config.trace != nullptr, [&](unsigned c) {
    RngStream rng(config.seed, c);
    ChunkResult& res = results[c];
    std::vector<double> values(static_cast<std::size_t>(n));
    std::vector<char> accepted(static_cast<std::size_t>(n));
    std::vector<double> gain(static_cast<std::size_t>(n));
    const std::uint64_t reps = chunk_size(config.replications, c);
    for (std::uint64_t rep = 0; rep < reps; ++rep) {
      int acceptors = 0;
      for (int i = 0; i < n; ++i) {
        values[i] = sample(sc.dists[i], rng);
        accepted[i] = game.accepts(i, values[i]) ? 1 : 0;
        acceptors += accepted[i];
      }
      const double u = rng.uniform();
      std::fill(gain.begin(), gain.end(), 0.0);
      const Outcome o = game.play(values, accepted, u, gain);
      const Outcome base = game.counterfactual(values, nullptr);

      res.profit.add(o.profit);
      res.sellers.add(o.sellers);
      res.cost.add(o.cost);
      res.loss.add(base.welfare * base.trade - o.welfare * o.trade);
      res.seller_gain.add(o.sellers - base.sellers);
      res.cost_increase.add(o.cost - base.cost);
      res.trades += o.trade ? 1 : 0;

      if (config.trace) {
        *config.trace << c << ',' << rep << ',' << acceptors << ',' << o.profit << ','
                      << o.sellers << ',' << o.cost << ','
                      << base.welfare * base.trade - o.welfare * o.trade;
        for (int i = 0; i < n; ++i) *config.trace << ',' << values[i];
        *config.trace << '\n';
      }

      // Same draw, with the probed seller's value moved to its cutoff and
      // the offer rejected.
      values[probe] = probe_value;
      accepted[probe] = 0;
      std::fill(gain.begin(), gain.end(), 0.0);
      game.play(values, accepted, rng.uniform(), gain);
      res.interim.add(gain[probe]);
    }
  });

  ChunkResult total;
  for (const auto& r : results) {
    total.profit.merge(r.profit);
    total.sellers.merge(r.sellers);
    total.cost.merge(r.cost);
    total.loss.merge(r.loss);
    total.interim.merge(r.interim);
    total.seller_gain.merge(r.seller_gain);
    total.cost_increase.merge(r.cost_increase);
    total.trades += r.trades;
  }
  SimReport report;
  report.speculator_profit = total.profit.estimate();
  report.seller_surplus_total = total.sellers.estimate();
  report.auctioneer_cost = total.cost.estimate();
  report.efficiency_loss = total.loss.estimate();
  report.interim_payoff_at_cutoff = total.interim.estimate();
  report.seller_surplus_gain = total.seller_gain.estimate();
  report.auctioneer_cost_increase = total.cost_increase.estimate();
  report.replications = config.replications;
  report.trade_frequency =
      static_cast<double>(total.trades) / static_cast<double>(config.replications);
  return report;
}

ProbeResult interim_payoff_probe(const SimConfig& config, double v, const ProbeOptions& options,
                                 const Tolerances& tol) {
  config.validate();
  if (!(v >= 0 && v <= 1)) throw ConfigError("probe value must lie in [0, 1]");
  const auto& sc = config.scenario;
  const int seller = probed_seller(config, options.seller);
  const int n = sc.sellers;

  // In the conditioned mode the other sellers' decisions are fixed and their
  // values drawn from the matching truncations.
  std::vector<int> fixed_reject;
  std::optional<TruncatedBelow> high;
  std::optional<TruncatedAbove> low;
  if (options.subgame_rivals) {
    if (config.format != Format::Fpa)
      throw ConfigError("subgame conditioning applies to first-price play only");
    const int m = *options.subgame_rivals;
    if (m < 1 || m > n - 1) throw ConfigError("subgame size must lie in [1, N-1]");
    const double cutoff = sc.cutoffs.front();
    if (!(sc.dists.front().cdf(cutoff) > 0 && sc.dists.front().cdf(cutoff) < 1))
      throw ConfigError("subgame conditioning needs 0 < F(cutoff) < 1");
    high.emplace(sc.dists.front(), cutoff);
    low.emplace(sc.dists.front(), cutoff);
    for (int i = 0; i < n && static_cast<int>(fixed_reject.size()) < m - 1; ++i)
      if (i != seller) fixed_reject.push_back(i);
  }

  const Game game(config, tol);
  std::vector<Accumulator> acc(kChunks), rej(kChunks);
  run_chunks(false, [&](unsigned c) {
    RngStream rng(config.seed, c);
    std::vector<double> values(static_cast<std::size_t>(n));
    std::vector<char> accepted(static_cast<std::size_t>(n));
    std::vector<double> gain(static_cast<std::size_t>(n));
    const std::uint64_t reps = chunk_size(config.replications, c);
    for (std::uint64_t rep = 0; rep < reps; ++rep) {
      for (int i = 0; i < n; ++i) {
        if (i == seller) {
          values[i] = v;
          continue;
        }
        if (options.subgame_rivals) {
          const bool rejects =
              std::find(fixed_reject.begin(), fixed_reject.end(), i) != fixed_reject.end();
          const double u = rng.uniform();
          values[i] = rejects ? high->quantile(u) : low->quantile(u);
          accepted[i] = rejects ? 0 : 1;
        } else {
          values[i] = sample(sc.dists[i], rng);
          accepted[i] = game.accepts(i, values[i]) ? 1 : 0;
        }
      }
      const double u = rng.uniform();
      for (int branch = 0; branch < 2; ++branch) {
        accepted[seller] = branch == 0 ? 1 : 0;
        std::fill(gain.begin(), gain.end(), 0.0);
        game.play(values, accepted, u, gain);
        (branch == 0 ? acc : rej)[c].add(gain[seller]);
      }
    }
  });
  Accumulator a, r;
  for (unsigned c = 0; c < kChunks; ++c) {
    a.merge(acc[c]);
    r.merge(rej[c]);
  }
  return {a.estimate(), r.estimate()};
}

}  // namespace procspec::sim
