#pragma once

#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "procspec/rng.hpp"

namespace procspec {

enum class DistFamily { Uniform, Power, Table };

std::string to_string(DistFamily family);

/// Seller-value law on [0,1]: continuous, strictly increasing, F(0) = 0 and
/// F(1) = 1. Immutable after construction; copies share the tabulated data.
class ValueDistribution {
 public:
  // F(v) = v^eta. Throws ConfigError unless eta > 0.
  static ValueDistribution power(double eta);
  static ValueDistribution uniform();
  // Monotone-cubic (Fritsch-Carlson) interpolation through (v, F) knots.
  // Knots must start at (0, 0), end at v = 1, and be strictly increasing in
  // both coordinates; F values are rescaled so that F(1) = 1.
  static ValueDistribution table(std::span<const std::pair<double, double>> knots);

  double cdf(double v) const;
  double pdf(double v) const;
  double quantile(double u) const;
  double survival(double v) const { return 1.0 - cdf(v); }

  DistFamily family() const { return family_; }
  // Exponent for Power/Uniform families; 0 for tables.
  double eta() const { return eta_; }
  const std::vector<std::pair<double, double>>& knots() const;

 private:
  struct Table;

  ValueDistribution(DistFamily family, double eta, std::shared_ptr<const Table> table)
      : family_(family), eta_(eta), table_(std::move(table)) {}

  DistFamily family_;
  double eta_;
  std::shared_ptr<const Table> table_;
};

// Inverse-transform draw: quantile(u) with u uniform on [0,1).
double sample(const ValueDistribution& dist, RngStream& rng);

// G(v; t) = (F(v) - F(t)) / (1 - F(t)) on [t, 1]. Requires F(t) < 1.
class TruncatedBelow {
 public:
  TruncatedBelow(ValueDistribution base, double threshold);

  double cdf(double v) const;
  // 1 - G(v; t), computed without cancellation.
  double survival(double v) const;
  double pdf(double v) const;
  double quantile(double u) const;

  double threshold() const { return threshold_; }
  const ValueDistribution& base() const { return base_; }

 private:
  ValueDistribution base_;
  double threshold_;
  double base_at_threshold_;
  double base_tail_;
};

// F(v) / F(t) on [0, t]. Requires F(t) > 0.
class TruncatedAbove {
 public:
  TruncatedAbove(ValueDistribution base, double threshold);

  double cdf(double v) const;
  double pdf(double v) const;
  double quantile(double u) const;

  double threshold() const { return threshold_; }

 private:
  ValueDistribution base_;
  double threshold_;
  double base_at_threshold_;
};

}  // namespace procspec
