#include "procspec/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "procspec/errors.hpp"
#include "procspec/fpa.hpp"
#include "procspec/spa.hpp"

namespace procspec::cli {

using nlohmann::json;

double round12(double x) {
  if (!std::isfinite(x)) return x;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return std::strtod(buf, nullptr);
}

namespace {

json num(double x) {
  if (!std::isfinite(x)) return nullptr;
  return round12(x);
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

template <class T>
T field(const json& j, const std::string& name, const std::string& where) {
  if (!j.contains(name)) throw ConfigError(where + ": missing required field '" + name + "'");
  try {
    return j.at(name).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(where + ": field '" + name + "' has the wrong type");
  }
}

template <class T>
std::optional<T> optional_field(const json& j, const std::string& name, const std::string& where) {
  if (!j.contains(name) || j.at(name).is_null()) return std::nullopt;
  return field<T>(j, name, where);
}

json dist_json(const ValueDistribution& d) {
  json j{{"family", to_string(d.family())}};
  if (d.family() == DistFamily::Power) j["eta"] = num(d.eta());
  if (d.family() == DistFamily::Table) {
    json knots = json::array();
    for (const auto& [v, f] : d.knots()) knots.push_back({num(v), num(f)});
    j["knots"] = knots;
  }
  return j;
}

json estimate_json(const sim::Estimate& e) {
  return {{"mean", num(e.mean)}, {"std_error", num(e.std_error)}};
}

json vector_json(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(num(x));
  return a;
}

// Flags shared by the leaf subcommands; unused ones are simply not registered.
struct Options {
  std::string config;
  std::optional<double> cutoff;
  std::optional<double> quad_tol;
  std::optional<double> root_tol;
  std::optional<int> grid;
  double sign_margin = 1e-6;
  std::string out;
  std::optional<std::uint64_t> reps;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> format;
  std::string trace;
  int sellers = 2;
  std::string eta;
  std::string reserve;
  std::string probe;
};

ScenarioConfig load_config(const Options& opt) {
  if (opt.config.empty()) throw ConfigError("--config <file> is required for this command");
  std::ifstream in(opt.config);
  if (!in) throw ConfigError("cannot open config file '" + opt.config + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config '" + opt.config + "' is not valid JSON: " + e.what());
  }
  ScenarioConfig cfg = parse_scenario(j);
  if (opt.cutoff) {
    cfg.scenario.cutoffs.assign(cfg.scenario.access.size(), *opt.cutoff);
    cfg.has_cutoffs = true;
    cfg.scenario.validate();
  }
  if (opt.quad_tol) cfg.tolerances.quad_abs_tol = *opt.quad_tol;
  if (opt.root_tol) cfg.tolerances.root_tol = *opt.root_tol;
  if (opt.grid) cfg.tolerances.grid_points = *opt.grid;
  cfg.tolerances.validate();
  if (opt.reps) cfg.replications = *opt.reps;
  if (opt.seed) cfg.seed = *opt.seed;
  if (opt.format) cfg.format = sim::parse_format(*opt.format);
  return cfg;
}

Tolerances flag_tolerances(const Options& opt) {
  Tolerances tol;
  if (opt.quad_tol) tol.quad_abs_tol = *opt.quad_tol;
  if (opt.root_tol) tol.root_tol = *opt.root_tol;
  if (opt.grid) tol.grid_points = *opt.grid;
  tol.validate();
  return tol;
}

bool same_law(const ValueDistribution& a, const ValueDistribution& b) {
  return a.family() == b.family() && a.eta() == b.eta() && a.knots() == b.knots();
}

AuctionEnv symmetric(const ScenarioConfig& cfg) {
  const auto& sc = cfg.scenario;
  for (const auto& d : sc.dists)
    if (!same_law(d, sc.dists.front()))
      throw ConfigError("this command needs identically distributed sellers");
  AuctionEnv env{sc.sellers, sc.reserve, sc.dists.front()};
  env.validate();
  return env;
}

double common_cutoff(const ScenarioConfig& cfg) {
  if (!cfg.has_cutoffs) throw ConfigError("a cutoff is required (--cutoff or config 'cutoff')");
  const auto& c = cfg.scenario.cutoffs;
  for (double x : c)
    if (x != c.front()) throw ConfigError("this command needs one common cutoff");
  return c.front();
}

json spa_json(const AuctionEnv& env, const spa::SpaEquilibrium& eq, const Tolerances& tol) {
  json j{{"format", "spa"},
         {"N", env.sellers},
         {"r", num(env.reserve)},
         {"distribution", dist_json(env.dist)},
         {"cutoff", num(eq.cutoff)},
         {"price", num(eq.price)},
         {"profit", num(eq.profit)},
         {"pi0", num(eq.pi0)},
         {"limit_ratio", num(spa::limit_ratio(env, tol))}};
  if (eq.decomposition) {
    j["decomposition"] = {{"gain_withholding", num(eq.decomposition->gain_withholding)},
                          {"loss_overcompensation", num(eq.decomposition->loss_overcompensation)},
                          {"loss_value_destruction", num(eq.decomposition->loss_value_destruction)}};
  } else {
    j["decomposition"] = nullptr;
  }
  return j;
}

json fpa_json(const AuctionEnv& env, const fpa::FpaEquilibrium& eq) {
  json subgames = json::array();
  for (const auto& s : eq.subgames) {
    subgames.push_back({{"m", s.rivals()},
                        {"b_low", num(s.b_low())},
                        {"b_high", num(s.b_high())},
                        {"degenerate", s.degenerate()},
                        {"clamp_point", num(s.clamp_point())},
                        {"clamp_mass", num(s.clamp_mass())}});
  }
  return {{"format", "fpa"},
          {"N", env.sellers},
          {"r", num(env.reserve)},
          {"distribution", dist_json(env.dist)},
          {"cutoff", num(eq.cutoff)},
          {"price", num(eq.price)},
          {"profit", num(eq.profit)},
          {"subgames", subgames}};
}

std::string region_csv(const Options& opt) {
  if (opt.eta.empty() || opt.reserve.empty())
    throw ConfigError("region needs --eta and --r grids (start:stop:step)");
  const auto etas = parse_grid(opt.eta);
  const auto rs = parse_grid(opt.reserve);
  for (double e : etas)
    if (!(e > 0 && e <= 3)) throw ConfigError("eta grid must lie in (0, 3], got " + fmt(e));
  for (double r : rs)
    if (!(r > 0 && r <= 1)) throw ConfigError("r grid must lie in (0, 1], got " + fmt(r));
  if (opt.sellers < 2) throw ConfigError("--N must be at least 2");
  if (!(opt.sign_margin >= 0)) throw ConfigError("--sign-margin must be non-negative");
  const auto cells = fpa::region_scan(opt.sellers, etas, rs, opt.sign_margin, flag_tolerances(opt));
  std::ostringstream os;
  os << "eta,r,profit,profitable\n";
  for (const auto& c : cells) {
    const int flag = c.status == fpa::RegionStatus::Profitable     ? 1
                     : c.status == fpa::RegionStatus::Unprofitable ? 0
                                                                   : -1;
    os << fmt(c.eta) << ',' << fmt(c.reserve) << ',' << fmt(c.profit) << ',' << flag << '\n';
  }
  return os.str();
}

json condition_json(const ext::Condition1Result& c) {
  const char* status = c.status == ext::TrendStatus::Satisfied ? "satisfied"
                       : c.status == ext::TrendStatus::Violated ? "violated"
                                                               : "inconclusive";
  json j{{"status", status}};
  if (c.witness)
    j["witness"] = {c.witness->first, c.witness->second};
  else
    j["witness"] = nullptr;
  return j;
}

json asym_report(const ScenarioConfig& cfg) {
  if (!cfg.has_cutoffs) throw ConfigError("asym solve needs 'cutoffs' in the config or --cutoff");
  const auto& tol = cfg.tolerances;
  return {{"prices", vector_json(ext::asym_prices(cfg.scenario, tol))},
          {"profit", num(ext::asym_profit(cfg.scenario, tol))},
          {"condition1", condition_json(ext::check_condition1(cfg.scenario))}};
}

json enhanced_report(const ScenarioConfig& cfg) {
  if (!cfg.has_cutoffs)
    throw ConfigError("enhanced solve needs 'cutoffs' in the config or --cutoff");
  const auto& tol = cfg.tolerances;
  const auto out = ext::enhanced_profit(cfg.scenario, tol);
  return {{"prices", vector_json(out.prices)},
          {"profit", num(out.profit)},
          {"refund_revenue_expectation", num(out.refund_revenue_expectation)},
          {"knockout", out.knockout},
          {"simple_prices", vector_json(ext::asym_prices(cfg.scenario, tol))},
          {"simple_profit", num(ext::asym_profit(cfg.scenario, tol))}};
}

json knockout_report(ScenarioConfig cfg, const Options& opt) {
  auto& sc = cfg.scenario;
  if (static_cast<int>(sc.access.size()) != sc.sellers)
    throw ConfigError("knockout needs access to every seller");
  sc.cutoffs.assign(sc.access.size(), sc.reserve);
  const auto& tol = cfg.tolerances;
  const auto enhanced = ext::enhanced_profit(sc, tol);
  json j{{"enhanced",
          {{"prices", vector_json(enhanced.prices)},
           {"profit", num(enhanced.profit)},
           {"resale_profit", num(ext::knockout_resale_profit(sc, tol))}}}};

  json dev{{"applicable", false}};
  bool symmetric_law = true;
  for (const auto& d : sc.dists) symmetric_law = symmetric_law && same_law(d, sc.dists.front());
  if (symmetric_law) {
    const AuctionEnv env{sc.sellers, sc.reserve, sc.dists.front()};
    const bool premise = env.dist.cdf(env.reserve) < 1;
    dev = {{"applicable", true}, {"premise_holds", premise}};
    if (premise) {
      std::vector<double> probes;
      if (!opt.probe.empty()) {
        probes = parse_grid(opt.probe);
      } else {
        const double top = env.reserve - 1e-3;
        for (int k = 0; k < 5; ++k) probes.push_back(top * k / 4.0);
      }
      json points = json::array();
      for (double v : probes) {
        const auto d = ext::fpa_knockout_deviation(env, v, tol);
        points.push_back({{"v", num(v)},
                          {"equilibrium", num(d.equilibrium)},
                          {"deviation", num(d.deviation)},
                          {"gain", num(d.deviation - d.equilibrium)}});
      }
      dev["points"] = points;
    }
  }
  j["fpa_deviation"] = dev;
  return j;
}

sim::SimConfig sim_config(const ScenarioConfig& cfg) {
  sim::SimConfig sc;
  sc.scenario = cfg.scenario;
  sc.format = cfg.format;
  sc.replications = cfg.replications;
  sc.seed = cfg.seed;
  sc.auctioneer_value = cfg.auctioneer_value;
  if (sc.format == sim::Format::Fpa) sim::attach_fpa_subgames(sc, cfg.tolerances);
  return sc;
}

double analytic_profit(const ScenarioConfig& cfg) {
  const auto& sc = cfg.scenario;
  const auto& tol = cfg.tolerances;
  switch (cfg.format) {
    case sim::Format::Spa:
      return ext::asym_profit(sc, tol);
    case sim::Format::Fpa:
      return fpa::profit(sim::symmetric_env(sc), sc.cutoffs.front(), tol);
    case sim::Format::SpaEnhanced:
      return ext::enhanced_profit(sc, tol).profit;
  }
  return 0.0;
}

json report_json(const sim::SimReport& r) {
  return {{"replications", r.replications},
          {"speculator_profit", estimate_json(r.speculator_profit)},
          {"seller_surplus_total", estimate_json(r.seller_surplus_total)},
          {"auctioneer_cost", estimate_json(r.auctioneer_cost)},
          {"efficiency_loss", estimate_json(r.efficiency_loss)},
          {"interim_payoff_at_cutoff", estimate_json(r.interim_payoff_at_cutoff)},
          {"seller_surplus_gain", estimate_json(r.seller_surplus_gain)},
          {"auctioneer_cost_increase", estimate_json(r.auctioneer_cost_increase)},
          {"trade_frequency", num(r.trade_frequency)}};
}

json simulate_report(const ScenarioConfig& cfg, const Options& opt) {
  if (!cfg.has_cutoffs) throw ConfigError("simulate needs 'cutoffs' in the config or --cutoff");
  sim::SimConfig sc = sim_config(cfg);
  std::ofstream trace;
  if (!opt.trace.empty()) {
    trace.open(opt.trace);
    if (!trace) throw ConfigError("cannot write trace file '" + opt.trace + "'");
    trace.precision(12);
    sc.trace = &trace;
  }
  const auto report = sim::simulate(sc, cfg.tolerances);
  json j = report_json(report);
  j["format"] = sim::to_string(cfg.format);
  j["seed"] = cfg.seed;
  if (static_cast<int>(cfg.scenario.access.size()) <= ext::kMaxEnumeratedAccess)
    j["analytic_profit"] = num(analytic_profit(cfg));
  return j;
}

std::string compare_table(ScenarioConfig cfg) {
  const AuctionEnv env = symmetric(cfg);
  const auto& tol = cfg.tolerances;
  if (static_cast<int>(cfg.scenario.access.size()) != env.sellers)
    throw ConfigError("compare needs access to every seller");
  const auto s = spa::optimize(env, tol);
  const auto f = fpa::optimize(env, tol, false);
  // Both formats see the same value draws.
  auto simulate_at = [&](sim::Format format, double cutoff) {
    ScenarioConfig c = cfg;
    c.format = format;
    c.scenario.cutoffs.assign(c.scenario.access.size(), cutoff);
    return sim::simulate(sim_config(c), tol);
  };
  const auto ss = simulate_at(sim::Format::Spa, s.cutoff);
  const auto fs = simulate_at(sim::Format::Fpa, f.cutoff);
  if (!(s.profit >= f.profit))
    throw NumericalError("self-check failed: optimal SPA profit " + fmt(s.profit) +
                         " below optimal FPA profit " + fmt(f.profit));

  std::ostringstream os;
  os << "quantity,spa,fpa\n";
  auto row = [&](const char* name, double a, double b) {
    os << name << ',' << fmt(a) << ',' << fmt(b) << '\n';
  };
  row("cutoff", s.cutoff, f.cutoff);
  row("price", s.price, f.price);
  row("profit", s.profit, f.profit);
  row("sim_profit", ss.speculator_profit.mean, fs.speculator_profit.mean);
  row("sim_profit_se", ss.speculator_profit.std_error, fs.speculator_profit.std_error);
  row("sim_efficiency_loss", ss.efficiency_loss.mean, fs.efficiency_loss.mean);
  row("sim_seller_surplus", ss.seller_surplus_total.mean, fs.seller_surplus_total.mean);
  row("sim_auctioneer_cost", ss.auctioneer_cost.mean, fs.auctioneer_cost.mean);
  row("replications", static_cast<double>(ss.replications), static_cast<double>(fs.replications));
  return os.str();
}

void emit(const std::string& text, const Options& opt, std::ostream& out) {
  if (opt.out.empty()) {
    out << text;
    return;
  }
  std::ofstream f(opt.out);
  if (!f) throw ConfigError("cannot write output file '" + opt.out + "'");
  f << text;
}

}  // namespace

ValueDistribution parse_distribution(const json& j) {
  const std::string where = "distribution";
  if (!j.is_object()) throw ConfigError("distribution block must be an object");
  const auto family = field<std::string>(j, "family", where);
  if (family == "uniform") return ValueDistribution::uniform();
  if (family == "power") return ValueDistribution::power(field<double>(j, "eta", where));
  if (family == "table") {
    const auto raw = field<std::vector<std::vector<double>>>(j, "knots", where);
    std::vector<std::pair<double, double>> knots;
    for (const auto& k : raw) {
      if (k.size() != 2) throw ConfigError("distribution: each knot must be a [v, F] pair");
      knots.emplace_back(k[0], k[1]);
    }
    return ValueDistribution::table(knots);
  }
  throw ConfigError("distribution: unknown family '" + family +
                    "' (expected uniform, power or table)");
}

ScenarioConfig parse_scenario(const json& j) {
  const std::string where = "config";
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  ScenarioConfig cfg;
  auto& sc = cfg.scenario;
  sc.sellers = field<int>(j, "N", where);
  sc.reserve = field<double>(j, "r", where);
  if (sc.sellers < 2) throw ConfigError("config: N must be at least 2");

  if (j.contains("distributions")) {
    const auto& list = j.at("distributions");
    if (!list.is_array() || static_cast<int>(list.size()) != sc.sellers)
      throw ConfigError("config: 'distributions' must list one block per seller (N = " +
                        std::to_string(sc.sellers) + ")");
    for (const auto& d : list) sc.dists.push_back(parse_distribution(d));
  } else if (j.contains("distribution")) {
    sc.dists.assign(static_cast<std::size_t>(sc.sellers), parse_distribution(j.at("distribution")));
  } else {
    throw ConfigError("config: missing required field 'distribution' (or 'distributions')");
  }

  if (auto access = optional_field<std::vector<int>>(j, "access", where)) {
    sc.access = *access;
  } else {
    for (int i = 0; i < sc.sellers; ++i) sc.access.push_back(i);
  }
  if (auto cutoffs = optional_field<std::vector<double>>(j, "cutoffs", where)) {
    sc.cutoffs = *cutoffs;
    cfg.has_cutoffs = true;
  } else if (auto cutoff = optional_field<double>(j, "cutoff", where)) {
    sc.cutoffs.assign(sc.access.size(), *cutoff);
    cfg.has_cutoffs = true;
  } else {
    sc.cutoffs.assign(sc.access.size(), 0.0);
  }
  sc.validate();

  if (auto format = optional_field<std::string>(j, "format", where))
    cfg.format = sim::parse_format(*format);
  if (j.contains("tolerances")) {
    const auto& t = j.at("tolerances");
    const std::string tw = "tolerances";
    if (auto v = optional_field<double>(t, "quad_abs_tol", tw)) cfg.tolerances.quad_abs_tol = *v;
    if (auto v = optional_field<double>(t, "root_tol", tw)) cfg.tolerances.root_tol = *v;
    if (auto v = optional_field<double>(t, "argmax_tol", tw)) cfg.tolerances.argmax_tol = *v;
    if (auto v = optional_field<int>(t, "grid_points", tw)) cfg.tolerances.grid_points = *v;
  }
  cfg.tolerances.validate();
  if (auto seed = optional_field<std::uint64_t>(j, "seed", where)) cfg.seed = *seed;
  if (auto reps = optional_field<std::uint64_t>(j, "replications", where)) {
    if (*reps < 1) throw ConfigError("config: replications must be at least 1");
    cfg.replications = *reps;
  }
  cfg.auctioneer_value = optional_field<double>(j, "V0", where);
  if (cfg.auctioneer_value && !(*cfg.auctioneer_value >= sc.reserve))
    throw ConfigError("config: V0 must be at least r");
  return cfg;
}

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ':')) {
    try {
      std::size_t used = 0;
      parts.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("grid '" + text + "': cannot parse '" + item + "' as a number");
    }
  }
  if (parts.size() == 1) return parts;
  if (parts.size() != 3) throw ConfigError("grid '" + text + "' must be start:stop:step");
  const double start = parts[0], stop = parts[1], step = parts[2];
  if (!(step > 0)) throw ConfigError("grid '" + text + "': step must be positive");
  if (stop < start) throw ConfigError("grid '" + text + "': stop is below start");
  const auto count = static_cast<long>(std::floor((stop - start) / step + 0.5)) + 1;
  if (count > 1000000) throw ConfigError("grid '" + text + "' has too many points");
  std::vector<double> out;
  for (long k = 0; k < count; ++k) out.push_back(round12(start + static_cast<double>(k) * step));
  return out;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Equilibria of speculation in procurement auctions"};
  app.name("procspec");
  app.require_subcommand(1);
  Options opt;

  auto tolerance_flags = [&](CLI::App* c) {
    c->add_option("--quad-tol", opt.quad_tol, "absolute quadrature tolerance");
    c->add_option("--root-tol", opt.root_tol, "root bracket width");
    c->add_option("--grid", opt.grid, "grid points for global maximization");
    c->add_option("--out", opt.out, "write output to this file instead of stdout");
  };
  auto config_flags = [&](CLI::App* c, bool cutoff) {
    c->add_option("--config", opt.config, "scenario JSON file")->required();
    if (cutoff) c->add_option("--cutoff", opt.cutoff, "acceptance cutoff for every seller");
    tolerance_flags(c);
  };
  auto region_flags = [&](CLI::App* c) {
    c->add_option("--N", opt.sellers, "number of sellers")->capture_default_str();
    c->add_option("--eta", opt.eta, "eta grid start:stop:step")->required();
    c->add_option("--r", opt.reserve, "reserve grid start:stop:step")->required();
    c->add_option("--sign-margin", opt.sign_margin, "profit margin for a profitable cell")
        ->capture_default_str();
    tolerance_flags(c);
  };

  auto* spa_cmd = app.add_subcommand("spa", "second-price speculation");
  spa_cmd->require_subcommand(1);
  auto* spa_solve = spa_cmd->add_subcommand("solve", "equilibrium at a given cutoff");
  config_flags(spa_solve, true);
  auto* spa_opt = spa_cmd->add_subcommand("optimize", "profit-maximizing cutoff");
  config_flags(spa_opt, false);

  auto* fpa_cmd = app.add_subcommand("fpa", "first-price speculation");
  fpa_cmd->require_subcommand(1);
  auto* fpa_solve = fpa_cmd->add_subcommand("solve", "equilibrium and subgames at a cutoff");
  config_flags(fpa_solve, true);
  auto* fpa_opt = fpa_cmd->add_subcommand("optimize", "profit-maximizing cutoff");
  config_flags(fpa_opt, false);
  auto* fpa_region = fpa_cmd->add_subcommand("region", "profitability over an (eta, r) grid");
  region_flags(fpa_region);

  auto* asym_cmd = app.add_subcommand("asym", "asymmetric sellers with limited access");
  asym_cmd->require_subcommand(1);
  auto* asym_solve = asym_cmd->add_subcommand("solve", "prices, profit and Condition 1 check");
  config_flags(asym_solve, true);

  auto* enh_cmd = app.add_subcommand("enhanced", "speculation with a return auction");
  enh_cmd->require_subcommand(1);
  auto* enh_solve = enh_cmd->add_subcommand("solve", "prices and profit");
  config_flags(enh_solve, true);

  auto* knockout = app.add_subcommand("knockout", "knockout profit and first-price deviation");
  config_flags(knockout, false);
  knockout->add_option("--v", opt.probe, "seller values for the deviation check (grid syntax)");

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo play of the game");
  config_flags(simulate, true);
  simulate->add_option("--reps", opt.reps, "replications");
  simulate->add_option("--seed", opt.seed, "random seed");
  simulate->add_option("--format", opt.format, "spa, fpa or enhanced");
  simulate->add_option("--trace", opt.trace, "per-replication CSV file");

  auto* region = app.add_subcommand("region", "alias of `fpa region`");
  region_flags(region);

  auto* compare = app.add_subcommand("compare", "second-price versus first-price table");
  config_flags(compare, false);
  compare->add_option("--reps", opt.reps, "replications per format");
  compare->add_option("--seed", opt.seed, "random seed");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (spa_solve->parsed() || spa_opt->parsed()) {
      const auto cfg = load_config(opt);
      const AuctionEnv env = symmetric(cfg);
      const auto eq = spa_solve->parsed() ? spa::evaluate(env, common_cutoff(cfg), cfg.tolerances)
                                          : spa::optimize(env, cfg.tolerances);
      emit(spa_json(env, eq, cfg.tolerances).dump(2) + "\n", opt, out);
    } else if (fpa_solve->parsed() || fpa_opt->parsed()) {
      const auto cfg = load_config(opt);
      const AuctionEnv env = symmetric(cfg);
      const auto eq = fpa_solve->parsed() ? fpa::evaluate(env, common_cutoff(cfg), cfg.tolerances)
                                          : fpa::optimize(env, cfg.tolerances);
      emit(fpa_json(env, eq).dump(2) + "\n", opt, out);
    } else if (fpa_region->parsed() || region->parsed()) {
      emit(region_csv(opt), opt, out);
    } else if (asym_solve->parsed()) {
      emit(asym_report(load_config(opt)).dump(2) + "\n", opt, out);
    } else if (enh_solve->parsed()) {
      emit(enhanced_report(load_config(opt)).dump(2) + "\n", opt, out);
    } else if (knockout->parsed()) {
      emit(knockout_report(load_config(opt), opt).dump(2) + "\n", opt, out);
    } else if (simulate->parsed()) {
      emit(simulate_report(load_config(opt), opt).dump(2) + "\n", opt, out);
    } else if (compare->parsed()) {
      emit(compare_table(load_config(opt)), opt, out);
    }
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kNumericalError;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kNumericalError;
  }
  return kOk;
}

}  // namespace procspec::cli
