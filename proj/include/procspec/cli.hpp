#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "procspec/extensions.hpp"
#include "procspec/simulator.hpp"

namespace procspec::cli {

// Exit codes.
constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kNumericalError = 3;

// Parsed scenario file. Which fields are needed depends on the subcommand.
struct ScenarioConfig {
  ext::AsymScenario scenario;  // cutoffs empty when not given
  bool has_cutoffs = false;
  sim::Format format = sim::Format::Spa;
  Tolerances tolerances;
  std::uint64_t seed = 0;
  std::uint64_t replications = 100000;
  std::optional<double> auctioneer_value;
};

ValueDistribution parse_distribution(const nlohmann::json& j);
// Throws ConfigError naming the offending field.
ScenarioConfig parse_scenario(const nlohmann::json& j);

// "start:stop:step" (endpoints included within half a step) or a single value.
std::vector<double> parse_grid(const std::string& text);

// All numbers rounded to 12 significant digits; non-finite values become null.
double round12(double x);

// Entry point behind the procspec executable; argv[0] excluded.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace procspec::cli
