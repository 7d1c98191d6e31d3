#pragma once

#include "procspec/value_distribution.hpp"

namespace procspec {

// Symmetric game primitives: N sellers with i.i.d. values from `dist`, and a
// procurement reserve price r in (0, 1].
struct AuctionEnv {
  int sellers = 2;
  double reserve = 1.0;
  ValueDistribution dist = ValueDistribution::uniform();

  // Throws ConfigError unless sellers >= 2 and 0 < reserve <= 1.
  void validate() const;
};

double binomial(int n, int k);

}  // namespace procspec
