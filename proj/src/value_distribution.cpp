#include "procspec/value_distribution.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

#include <boost/math/tools/toms748_solve.hpp>

#include "procspec/errors.hpp"

namespace procspec {

std::string to_string(DistFamily family) {
  switch (family) {
    case DistFamily::Uniform: return "uniform";
    case DistFamily::Power: return "power";
    case DistFamily::Table: return "table";
  }
  return "unknown";
}

struct ValueDistribution::Table {
  std::vector<std::pair<double, double>> knots;  // normalized to F(1) = 1
  std::vector<double> v;
  std::vector<double> f;
  std::vector<double> slope;  // dF/dv at each knot

  std::size_t segment(double x) const {
    auto it = std::upper_bound(v.begin(), v.end(), x);
    std::size_t k = static_cast<std::size_t>(it - v.begin());
    if (k == 0) return 0;
    return std::min(k - 1, v.size() - 2);
  }

  double eval(double x) const {
    const std::size_t k = segment(x);
    const double h = v[k + 1] - v[k];
    const double t = (x - v[k]) / h;
    const double t2 = t * t;
    const double t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * f[k] + (t3 - 2 * t2 + t) * h * slope[k] +
           (-2 * t3 + 3 * t2) * f[k + 1] + (t3 - t2) * h * slope[k + 1];
  }

  double derivative(double x) const {
    const std::size_t k = segment(x);
    const double h = v[k + 1] - v[k];
    const double t = (x - v[k]) / h;
    const double t2 = t * t;
    return ((6 * t2 - 6 * t) * f[k] + (6 * t2 - 6 * t) * -f[k + 1]) / h +
           (3 * t2 - 4 * t + 1) * slope[k] + (3 * t2 - 2 * t) * slope[k + 1];
  }
};

namespace {

// End-point derivative of the shape-preserving three-point formula.
double edge_slope(double h0, double h1, double d0, double d1) {
  double s = ((2 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
  if (s * d0 <= 0) return 0.0;
  if (d0 * d1 <= 0 && std::abs(s) > 3 * std::abs(d0)) return 3 * d0;
  return s;
}

}  // namespace

ValueDistribution ValueDistribution::power(double eta) {
  if (!(eta > 0) || !std::isfinite(eta))
    throw ConfigError("power distribution requires eta > 0, got " + std::to_string(eta));
  return ValueDistribution(eta == 1.0 ? DistFamily::Uniform : DistFamily::Power, eta, nullptr);
}

ValueDistribution ValueDistribution::uniform() {
  return ValueDistribution(DistFamily::Uniform, 1.0, nullptr);
}

ValueDistribution ValueDistribution::table(std::span<const std::pair<double, double>> knots) {
  if (knots.size() < 2) throw ConfigError("table distribution needs at least two knots");
  if (knots.front().first != 0.0 || knots.front().second != 0.0)
    throw ConfigError("table distribution must start at knot (0, 0)");
  if (knots.back().first != 1.0) throw ConfigError("table distribution must end at v = 1");
  for (std::size_t i = 1; i < knots.size(); ++i) {
    if (!(knots[i].first > knots[i - 1].first))
      throw ConfigError("table knots must be strictly increasing in v");
    if (!(knots[i].second > knots[i - 1].second))
      throw ConfigError("table knots must be strictly increasing in F");
  }
  auto table = std::make_shared<Table>();
  const double scale = knots.back().second;
  for (const auto& [v, f] : knots) {
    table->v.push_back(v);
    table->f.push_back(f / scale);
  }
  table->f.back() = 1.0;
  for (std::size_t k = 0; k < table->v.size(); ++k)
    table->knots.emplace_back(table->v[k], table->f[k]);

  const std::size_t n = table->v.size();
  std::vector<double> h(n - 1), d(n - 1);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    h[k] = table->v[k + 1] - table->v[k];
    d[k] = (table->f[k + 1] - table->f[k]) / h[k];
  }
  table->slope.assign(n, 0.0);
  if (n == 2) {
    table->slope[0] = table->slope[1] = d[0];
  } else {
    for (std::size_t k = 1; k + 1 < n; ++k) {
      const double w1 = 2 * h[k] + h[k - 1];
      const double w2 = h[k] + 2 * h[k - 1];
      table->slope[k] = (w1 + w2) / (w1 / d[k - 1] + w2 / d[k]);
    }
    table->slope[0] = edge_slope(h[0], h[1], d[0], d[1]);
    table->slope[n - 1] = edge_slope(h[n - 2], h[n - 3], d[n - 2], d[n - 3]);
  }
  return ValueDistribution(DistFamily::Table, 0.0, std::move(table));
}

const std::vector<std::pair<double, double>>& ValueDistribution::knots() const {
  static const std::vector<std::pair<double, double>> empty;
  return table_ ? table_->knots : empty;
}

double ValueDistribution::cdf(double v) const {
  if (v <= 0) return 0.0;
  if (v >= 1) return 1.0;
  switch (family_) {
    case DistFamily::Uniform: return v;
    case DistFamily::Power: return std::pow(v, eta_);
    case DistFamily::Table: return std::clamp(table_->eval(v), 0.0, 1.0);
  }
  return 0.0;
}

double ValueDistribution::pdf(double v) const {
  if (v < 0 || v > 1) return 0.0;
  switch (family_) {
    case DistFamily::Uniform: return 1.0;
    case DistFamily::Power:
      if (v == 0) return eta_ < 1 ? HUGE_VAL : (eta_ == 1 ? 1.0 : 0.0);
      return eta_ * std::pow(v, eta_ - 1);
    case DistFamily::Table: return std::max(0.0, table_->derivative(v));
  }
  return 0.0;
}

double ValueDistribution::quantile(double u) const {
  if (u <= 0) return 0.0;
  if (u >= 1) return 1.0;
  switch (family_) {
    case DistFamily::Uniform: return u;
    case DistFamily::Power: return std::pow(u, 1.0 / eta_);
    case DistFamily::Table: {
      const auto& t = *table_;
      auto it = std::upper_bound(t.f.begin(), t.f.end(), u);
      std::size_t k = static_cast<std::size_t>(it - t.f.begin());
      k = std::min(k == 0 ? 0 : k - 1, t.f.size() - 2);
      double lo = t.v[k], hi = t.v[k + 1];
      auto g = [&](double x) { return t.eval(x) - u; };
      double glo = g(lo), ghi = g(hi);
      if (glo >= 0) return lo;
      if (ghi <= 0) return hi;
      std::uintmax_t iters = 200;
      auto tol = [](double a, double b) { return b - a <= 4 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(b)); };
      auto [a, b] = boost::math::tools::toms748_solve(g, lo, hi, glo, ghi, tol, iters);
      return 0.5 * (a + b);
    }
  }
  return 0.0;
}

double sample(const ValueDistribution& dist, RngStream& rng) {
  return dist.quantile(rng.uniform());
}

TruncatedBelow::TruncatedBelow(ValueDistribution base, double threshold)
    : base_(std::move(base)), threshold_(threshold) {
  base_at_threshold_ = base_.cdf(threshold_);
  base_tail_ = 1.0 - base_at_threshold_;
  if (!(base_tail_ > 0))
    throw ConfigError("truncation below requires F(threshold) < 1");
}

double TruncatedBelow::cdf(double v) const {
  if (v <= threshold_) return 0.0;
  if (v >= 1) return 1.0;
  return std::clamp((base_.cdf(v) - base_at_threshold_) / base_tail_, 0.0, 1.0);
}

double TruncatedBelow::survival(double v) const {
  if (v <= threshold_) return 1.0;
  if (v >= 1) return 0.0;
  return std::clamp(base_.survival(v) / base_tail_, 0.0, 1.0);
}

double TruncatedBelow::pdf(double v) const {
  if (v < threshold_) return 0.0;
  return base_.pdf(v) / base_tail_;
}

double TruncatedBelow::quantile(double u) const {
  if (u <= 0) return threshold_;
  if (u >= 1) return 1.0;
  return std::max(threshold_, base_.quantile(base_at_threshold_ + u * base_tail_));
}

TruncatedAbove::TruncatedAbove(ValueDistribution base, double threshold)
    : base_(std::move(base)), threshold_(threshold) {
  base_at_threshold_ = base_.cdf(threshold_);
  if (!(base_at_threshold_ > 0))
    throw ConfigError("truncation above requires F(threshold) > 0");
}

double TruncatedAbove::cdf(double v) const {
  if (v <= 0) return 0.0;
  if (v >= threshold_) return 1.0;
  return std::clamp(base_.cdf(v) / base_at_threshold_, 0.0, 1.0);
}

double TruncatedAbove::pdf(double v) const {
  if (v > threshold_) return 0.0;
  return base_.pdf(v) / base_at_threshold_;
}

double TruncatedAbove::quantile(double u) const {
  if (u <= 0) return 0.0;
  if (u >= 1) return threshold_;
  return std::min(threshold_, base_.quantile(u * base_at_threshold_));
}

}  // namespace procspec
