#include "procspec/extensions.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "procspec/errors.hpp"

namespace procspec::ext {
namespace {

void check_enumerable(const AsymScenario& sc) {
  if (static_cast<int>(sc.access.size()) > kMaxEnumeratedAccess)
    throw ConfigError("access set of size " + std::to_string(sc.access.size()) +
                      " exceeds the enumeration bound of " + std::to_string(kMaxEnumeratedAccess) +
                      "; estimate the profit with `simulate` instead");
}

// Product over sellers outside access of 1 - F_i(x).
double outside_survival(const AsymScenario& sc, const std::vector<char>& inside, double x) {
  double s = 1.0;
  for (int i = 0; i < sc.sellers; ++i)
    if (!inside[i]) s *= sc.dists[i].survival(x);
  return s;
}

std::vector<char> access_mask(const AsymScenario& sc) {
  std::vector<char> inside(static_cast<std::size_t>(sc.sellers), 0);
  for (int j : sc.access) inside[j] = 1;
  return inside;
}

// Integral over [lo, r] of prod_{i outside} [1 - F_i(x)] *
// prod_{s in access, s != skip} [1 - F_s(max(x, v_s))].
double rejection_tail(const AsymScenario& sc, const std::vector<char>& inside, std::size_t skip,
                      double lo, const Tolerances& tol) {
  if (lo >= sc.reserve) return 0.0;
  auto integrand = [&](double x) {
    double s = outside_survival(sc, inside, x);
    for (std::size_t k = 0; k < sc.access.size(); ++k) {
      if (k == skip) continue;
      s *= sc.dists[sc.access[k]].survival(std::max(x, sc.cutoffs[k]));
    }
    return s;
  };
  return numerics::integrate(integrand, lo, sc.reserve, sc.cutoffs, tol);
}

struct SubsetTerm {
  double probability;
  double receipt;
  std::vector<std::size_t> members;  // indices into access
};

// Calls `visit` for every acceptor set S of positive probability, S nonempty,
// in increasing bitmask order.
template <class Visit>
void for_each_acceptor_set(const AsymScenario& sc, const Tolerances& tol, Visit&& visit) {
  const std::size_t a = sc.access.size();
  const auto inside = access_mask(sc);
  std::vector<double> accept(a), tail(a);
  for (std::size_t k = 0; k < a; ++k) {
    accept[k] = sc.dists[sc.access[k]].cdf(sc.cutoffs[k]);
    tail[k] = 1.0 - accept[k];
  }
  const unsigned long count = 1ul << a;
  for (unsigned long mask = 1; mask < count; ++mask) {
    SubsetTerm term{1.0, 0.0, {}};
    for (std::size_t k = 0; k < a; ++k) {
      if (mask >> k & 1ul) {
        term.probability *= accept[k];
        term.members.push_back(k);
      } else {
        term.probability *= tail[k];
      }
    }
    if (term.probability == 0) continue;
    // The speculator bids 0 and is paid min(lowest rejecting bid, r).
    auto integrand = [&](double x) {
      double s = outside_survival(sc, inside, x);
      for (std::size_t k = 0; k < a; ++k) {
        if (mask >> k & 1ul) continue;
        s *= sc.dists[sc.access[k]].survival(std::max(x, sc.cutoffs[k])) / tail[k];
      }
      return s;
    };
    term.receipt = numerics::integrate(integrand, 0.0, sc.reserve, sc.cutoffs, tol);
    visit(term);
  }
}

double acceptance_weighted_payments(const AsymScenario& sc, const std::vector<double>& prices) {
  double paid = 0.0;
  for (std::size_t k = 0; k < sc.access.size(); ++k)
    paid += sc.dists[sc.access[k]].cdf(sc.cutoffs[k]) * prices[k];
  return paid;
}

}  // namespace

void AsymScenario::validate() const {
  if (sellers < 2) throw ConfigError("N must be at least 2, got " + std::to_string(sellers));
  if (!(reserve > 0 && reserve <= 1))
    throw ConfigError("reserve r must lie in (0, 1], got " + std::to_string(reserve));
  if (static_cast<int>(dists.size()) != sellers)
    throw ConfigError("expected " + std::to_string(sellers) + " seller distributions, got " +
                      std::to_string(dists.size()));
  if (access.empty()) throw ConfigError("access set must be nonempty");
  if (cutoffs.size() != access.size())
    throw ConfigError("need one cutoff per seller in the access set");
  std::vector<char> seen(static_cast<std::size_t>(sellers), 0);
  for (std::size_t k = 0; k < access.size(); ++k) {
    const int j = access[k];
    if (j < 0 || j >= sellers)
      throw ConfigError("access index " + std::to_string(j) + " out of range [0, N)");
    if (seen[j]) throw ConfigError("access index " + std::to_string(j) + " listed twice");
    seen[j] = 1;
    if (!(cutoffs[k] >= 0 && cutoffs[k] <= reserve))
      throw ConfigError("cutoff " + std::to_string(cutoffs[k]) + " outside [0, r]");
  }
}

bool AsymScenario::in_access(int seller) const {
  return std::find(access.begin(), access.end(), seller) != access.end();
}

AsymScenario symmetric_scenario(const AuctionEnv& env, double cutoff) {
  AsymScenario sc;
  sc.sellers = env.sellers;
  sc.reserve = env.reserve;
  sc.dists.assign(static_cast<std::size_t>(env.sellers), env.dist);
  for (int i = 0; i < env.sellers; ++i) sc.access.push_back(i);
  sc.cutoffs.assign(static_cast<std::size_t>(env.sellers), cutoff);
  return sc;
}

std::vector<double> asym_prices(const AsymScenario& sc, const Tolerances& tol) {
  sc.validate();
  const auto inside = access_mask(sc);
  std::vector<double> prices;
  for (std::size_t k = 0; k < sc.access.size(); ++k)
    prices.push_back(sc.cutoffs[k] + rejection_tail(sc, inside, k, sc.cutoffs[k], tol));
  return prices;
}

double asym_profit(const AsymScenario& sc, const Tolerances& tol) {
  sc.validate();
  check_enumerable(sc);
  double receipts = 0.0;
  for_each_acceptor_set(sc, tol,
                        [&](const SubsetTerm& t) { receipts += t.probability * t.receipt; });
  return receipts - acceptance_weighted_payments(sc, asym_prices(sc, tol));
}

Condition1Result check_condition1(const AsymScenario& sc) {
  sc.validate();
  Condition1Result out;
  const std::size_t a = sc.access.size();
  if (a < 2) {
    out.status = TrendStatus::Violated;
    return out;
  }
  std::vector<int> outside;
  for (int i = 0; i < sc.sellers; ++i)
    if (!sc.in_access(i)) outside.push_back(i);

  constexpr std::array<double, 5> probe{1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
  // Log-log slope of v F_i / F_k; a positive slope means the ratio vanishes.
  auto vanishes = [&](int i, int k) {
    bool all_high = true;
    bool all_low = true;
    for (std::size_t t = 0; t + 1 < probe.size(); ++t) {
      const double v0 = probe[t], v1 = probe[t + 1];
      const double r0 = v0 * sc.dists[i].cdf(v0) / sc.dists[k].cdf(v0);
      const double r1 = v1 * sc.dists[i].cdf(v1) / sc.dists[k].cdf(v1);
      const double slope = std::log(r0 / r1) / std::log(v0 / v1);
      if (!(slope >= 0.05)) all_high = false;
      if (!(slope <= 0.005)) all_low = false;
    }
    if (all_high) return TrendStatus::Satisfied;
    if (all_low) return TrendStatus::Violated;
    return TrendStatus::Inconclusive;
  };
  // Each seller in access is classified once against every seller outside.
  std::vector<TrendStatus> member(a, TrendStatus::Satisfied);
  for (std::size_t k = 0; k < a; ++k) {
    for (int i : outside) {
      const TrendStatus s = vanishes(i, sc.access[k]);
      if (s == TrendStatus::Violated) {
        member[k] = s;
        break;
      }
      if (s == TrendStatus::Inconclusive) member[k] = s;
    }
  }
  std::vector<std::size_t> good;
  std::size_t undecided = 0;
  for (std::size_t k = 0; k < a; ++k) {
    if (member[k] == TrendStatus::Satisfied) good.push_back(k);
    if (member[k] == TrendStatus::Inconclusive) ++undecided;
  }
  if (good.size() >= 2) {
    out.status = TrendStatus::Satisfied;
    out.witness = std::make_pair(sc.access[good[0]], sc.access[good[1]]);
  } else if (undecided > 0 && good.size() + undecided >= 2) {
    out.status = TrendStatus::Inconclusive;
  } else {
    out.status = TrendStatus::Violated;
  }
  return out;
}

std::vector<double> enhanced_prices(const AsymScenario& sc, const Tolerances& tol) {
  sc.validate();
  const auto inside = access_mask(sc);
  std::vector<double> prices;
  for (std::size_t k = 0; k < sc.access.size(); ++k) {
    const double vk = sc.cutoffs[k];
    double refund_side = 0.0;
    if (vk > 0) {
      auto integrand = [&](double x) {
        double s = 1.0;
        for (std::size_t q = 0; q < sc.access.size(); ++q) {
          if (q == k) continue;
          s *= sc.dists[sc.access[q]].survival(std::min(x, sc.cutoffs[q]));
        }
        return s;
      };
      refund_side = numerics::integrate(integrand, 0.0, vk, sc.cutoffs, tol);
    }
    prices.push_back(refund_side + rejection_tail(sc, inside, k, vk, tol));
  }
  return prices;
}

EnhancedOutcome enhanced_profit(const AsymScenario& sc, const Tolerances& tol) {
  sc.validate();
  check_enumerable(sc);
  EnhancedOutcome out;
  out.prices = enhanced_prices(sc, tol);
  out.knockout = static_cast<int>(sc.access.size()) == sc.sellers &&
                 std::all_of(sc.cutoffs.begin(), sc.cutoffs.end(),
                             [&](double c) { return c == sc.reserve; });
  double receipts = 0.0;
  double refunds = 0.0;
  for_each_acceptor_set(sc, tol, [&](const SubsetTerm& t) {
    receipts += t.probability * t.receipt;
    if (t.members.size() < 2) return;
    // Uniform price of the return auction: lowest value among acceptors.
    double top = 0.0;
    for (std::size_t k : t.members) top = std::max(top, sc.cutoffs[k]);
    auto conditional_survival = [&](double x) {
      double s = 1.0;
      for (std::size_t k : t.members) {
        const auto& d = sc.dists[sc.access[k]];
        s *= 1.0 - d.cdf(std::min(x, sc.cutoffs[k])) / d.cdf(sc.cutoffs[k]);
      }
      return s;
    };
    const double lowest = numerics::integrate(conditional_survival, 0.0, top, sc.cutoffs, tol);
    refunds += t.probability * static_cast<double>(t.members.size() - 1) * lowest;
  });
  out.refund_revenue_expectation = refunds;
  out.profit = receipts + refunds - acceptance_weighted_payments(sc, out.prices);
  return out;
}

double knockout_resale_profit(const AsymScenario& sc, const Tolerances& tol) {
  sc.validate();
  if (static_cast<int>(sc.access.size()) != sc.sellers)
    throw ConfigError("knockout requires access to every seller");
  // P(second-lowest > x) = prod S_i + sum_i F_i prod_{j != i} S_j
  auto above_second = [&](double x) {
    double all = 1.0;
    double one = 0.0;
    for (int i = 0; i < sc.sellers; ++i) {
      const double f = sc.dists[i].cdf(x);
      one = one * (1.0 - f) + all * f;
      all *= 1.0 - f;
    }
    return all + one;
  };
  return sc.reserve - numerics::integrate(above_second, 0.0, sc.reserve, tol);
}

DeviationPayoffs fpa_knockout_deviation(const AuctionEnv& env, double v, const Tolerances& tol) {
  env.validate();
  if (!(v >= 0 && v < env.reserve))
    throw ConfigError("deviation check requires 0 <= v < r, got v = " + std::to_string(v));
  if (env.dist.cdf(env.reserve) >= 1)
    throw ConfigError("F(r) = 1: no seller rejects at cutoff r, so undercutting is unavailable");
  const auto& dist = env.dist;
  const int rivals = env.sellers - 1;
  DeviationPayoffs d;
  d.equilibrium = numerics::integrate(
      [&dist, rivals](double x) { return std::pow(dist.survival(x), rivals); }, v, env.reserve,
      tol);
  d.deviation = env.reserve - kDeviationUndercut - v;
  return d;
}

}  // namespace procspec::ext
