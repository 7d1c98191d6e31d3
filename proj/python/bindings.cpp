#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "procspec/errors.hpp"
#include "procspec/extensions.hpp"
#include "procspec/fpa.hpp"
#include "procspec/simulator.hpp"
#include "procspec/spa.hpp"

namespace py = pybind11;
using namespace procspec;

namespace {

py::dict estimate(const sim::Estimate& e) {
  py::dict d;
  d["mean"] = e.mean;
  d["std_error"] = e.std_error;
  return d;
}

ext::AsymScenario scenario(int sellers, double reserve, std::vector<ValueDistribution> dists,
                           std::optional<std::vector<int>> access, std::vector<double> cutoffs) {
  ext::AsymScenario sc;
  sc.sellers = sellers;
  sc.reserve = reserve;
  sc.dists = std::move(dists);
  if (access) {
    sc.access = *access;
  } else {
    for (int i = 0; i < sellers; ++i) sc.access.push_back(i);
  }
  sc.cutoffs = std::move(cutoffs);
  if (sc.cutoffs.size() == 1 && sc.access.size() > 1) sc.cutoffs.assign(sc.access.size(), sc.cutoffs[0]);
  sc.validate();
  return sc;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Equilibria of speculation in procurement auctions";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_RuntimeError);

  py::class_<Tolerances>(m, "Tolerances")
      .def(py::init<>())
      .def_readwrite("quad_abs_tol", &Tolerances::quad_abs_tol)
      .def_readwrite("root_tol", &Tolerances::root_tol)
      .def_readwrite("argmax_tol", &Tolerances::argmax_tol)
      .def_readwrite("grid_points", &Tolerances::grid_points);

  py::class_<ValueDistribution>(m, "ValueDistribution")
      .def_static("uniform", &ValueDistribution::uniform)
      .def_static("power", &ValueDistribution::power, py::arg("eta"))
      .def_static(
          "table",
          [](const std::vector<std::pair<double, double>>& knots) {
            return ValueDistribution::table(knots);
          },
          py::arg("knots"))
      .def("cdf", &ValueDistribution::cdf)
      .def("pdf", &ValueDistribution::pdf)
      .def("quantile", &ValueDistribution::quantile)
      .def_property_readonly("family",
                             [](const ValueDistribution& d) { return to_string(d.family()); })
      .def_property_readonly("eta", &ValueDistribution::eta);

  py::class_<AuctionEnv>(m, "AuctionEnv")
      .def(py::init([](int sellers, double reserve, const ValueDistribution& dist) {
             AuctionEnv env{sellers, reserve, dist};
             env.validate();
             return env;
           }),
           py::arg("sellers") = 2, py::arg("reserve") = 1.0,
           py::arg("dist") = ValueDistribution::uniform())
      .def_readonly("sellers", &AuctionEnv::sellers)
      .def_readonly("reserve", &AuctionEnv::reserve)
      .def_readonly("dist", &AuctionEnv::dist);

  const Tolerances defaults;
  auto spa = m.def_submodule("spa", "second-price speculation");
  spa.def("pi0", &spa::pi0, py::arg("env"), py::arg("tol") = defaults);
  spa.def("price_from_cutoff", &spa::price_from_cutoff, py::arg("env"), py::arg("cutoff"),
          py::arg("tol") = defaults);
  spa.def("cutoff_from_price", &spa::cutoff_from_price, py::arg("env"), py::arg("price"),
          py::arg("tol") = defaults);
  spa.def("expected_payment", &spa::expected_payment, py::arg("env"), py::arg("m"),
          py::arg("cutoff"), py::arg("tol") = defaults);
  spa.def("profit", &spa::profit, py::arg("env"), py::arg("cutoff"), py::arg("tol") = defaults);
  spa.def("limit_ratio", &spa::limit_ratio, py::arg("env"), py::arg("tol") = defaults);
  spa.def(
      "decompose_n2",
      [](const AuctionEnv& env, double cutoff, const Tolerances& tol) {
        const auto d = spa::decompose_n2(env, cutoff, tol);
        py::dict out;
        out["gain_withholding"] = d.gain_withholding;
        out["loss_overcompensation"] = d.loss_overcompensation;
        out["loss_value_destruction"] = d.loss_value_destruction;
        return out;
      },
      py::arg("env"), py::arg("cutoff"), py::arg("tol") = defaults);
  spa.def(
      "optimize",
      [](const AuctionEnv& env, const Tolerances& tol) {
        const auto eq = spa::optimize(env, tol);
        py::dict out;
        out["cutoff"] = eq.cutoff;
        out["price"] = eq.price;
        out["profit"] = eq.profit;
        out["pi0"] = eq.pi0;
        return out;
      },
      py::arg("env"), py::arg("tol") = defaults);

  auto fpa = m.def_submodule("fpa", "first-price speculation");
  py::class_<fpa::FpaSubgameSolution>(fpa, "SubgameSolution")
      .def_property_readonly("m", &fpa::FpaSubgameSolution::rivals)
      .def_property_readonly("cutoff", &fpa::FpaSubgameSolution::cutoff)
      .def_property_readonly("b_low", &fpa::FpaSubgameSolution::b_low)
      .def_property_readonly("b_high", &fpa::FpaSubgameSolution::b_high)
      .def_property_readonly("degenerate", &fpa::FpaSubgameSolution::degenerate)
      .def_property_readonly("clamp_point", &fpa::FpaSubgameSolution::clamp_point)
      .def_property_readonly("clamp_mass", &fpa::FpaSubgameSolution::clamp_mass)
      .def("beta", &fpa::FpaSubgameSolution::beta)
      .def("beta_inv", &fpa::FpaSubgameSolution::beta_inv)
      .def("psi", &fpa::FpaSubgameSolution::psi)
      .def("psi_quantile", &fpa::FpaSubgameSolution::psi_quantile)
      .def("seller_objective", &fpa::FpaSubgameSolution::seller_objective);
  fpa.def("solve_subgame", &fpa::solve_subgame, py::arg("env"), py::arg("m"), py::arg("cutoff"),
          py::arg("tol") = defaults);
  fpa.def("benchmark_bid", &fpa::benchmark_bid, py::arg("env"), py::arg("m"), py::arg("cutoff"),
          py::arg("v"), py::arg("tol") = defaults);
  fpa.def("price_from_cutoff", &fpa::price_from_cutoff, py::arg("env"), py::arg("cutoff"),
          py::arg("tol") = defaults);
  fpa.def("cutoff_from_price", &fpa::cutoff_from_price, py::arg("env"), py::arg("price"),
          py::arg("tol") = defaults);
  fpa.def("profit", &fpa::profit, py::arg("env"), py::arg("cutoff"), py::arg("tol") = defaults);
  fpa.def(
      "optimize",
      [](const AuctionEnv& env, const Tolerances& tol) {
        const auto eq = fpa::optimize(env, tol, false);
        py::dict out;
        out["cutoff"] = eq.cutoff;
        out["price"] = eq.price;
        out["profit"] = eq.profit;
        return out;
      },
      py::arg("env"), py::arg("tol") = defaults);
  fpa.def(
      "region_scan",
      [](int sellers, const std::vector<double>& etas, const std::vector<double>& rs,
         double margin, const Tolerances& tol) {
        py::list rows;
        for (const auto& c : fpa::region_scan(sellers, etas, rs, margin, tol)) {
          const int flag = c.status == fpa::RegionStatus::Profitable     ? 1
                           : c.status == fpa::RegionStatus::Unprofitable ? 0
                                                                         : -1;
          rows.append(py::make_tuple(c.eta, c.reserve, c.profit, flag));
        }
        return rows;
      },
      py::arg("sellers"), py::arg("etas"), py::arg("reserves"), py::arg("sign_margin") = 1e-6,
      py::arg("tol") = defaults);

  auto ext = m.def_submodule("ext", "asymmetric sellers and enhanced speculation");
  py::class_<ext::AsymScenario>(ext, "Scenario")
      .def(py::init(&scenario), py::arg("sellers"), py::arg("reserve"), py::arg("dists"),
           py::arg("access") = py::none(), py::arg("cutoffs"))
      .def_readonly("access", &ext::AsymScenario::access)
      .def_readonly("cutoffs", &ext::AsymScenario::cutoffs);
  ext.def("asym_prices", &ext::asym_prices, py::arg("scenario"), py::arg("tol") = defaults);
  ext.def("asym_profit", &ext::asym_profit, py::arg("scenario"), py::arg("tol") = defaults);
  ext.def("enhanced_prices", &ext::enhanced_prices, py::arg("scenario"),
          py::arg("tol") = defaults);
  ext.def(
      "enhanced_profit",
      [](const ext::AsymScenario& sc, const Tolerances& tol) {
        const auto o = ext::enhanced_profit(sc, tol);
        py::dict out;
        out["prices"] = o.prices;
        out["profit"] = o.profit;
        out["refund_revenue_expectation"] = o.refund_revenue_expectation;
        out["knockout"] = o.knockout;
        return out;
      },
      py::arg("scenario"), py::arg("tol") = defaults);
  ext.def("knockout_resale_profit", &ext::knockout_resale_profit, py::arg("scenario"),
          py::arg("tol") = defaults);
  ext.def(
      "check_condition1",
      [](const ext::AsymScenario& sc) {
        const auto c = ext::check_condition1(sc);
        const char* status = c.status == ext::TrendStatus::Satisfied ? "satisfied"
                             : c.status == ext::TrendStatus::Violated ? "violated"
                                                                     : "inconclusive";
        return py::make_tuple(status, c.witness);
      },
      py::arg("scenario"));
  ext.def(
      "fpa_knockout_deviation",
      [](const AuctionEnv& env, double v, const Tolerances& tol) {
        const auto d = ext::fpa_knockout_deviation(env, v, tol);
        return py::make_tuple(d.equilibrium, d.deviation);
      },
      py::arg("env"), py::arg("v"), py::arg("tol") = defaults);

  m.def(
      "simulate",
      [](const ext::AsymScenario& sc, const std::string& format, std::uint64_t replications,
         std::uint64_t seed, std::optional<double> auctioneer_value, const Tolerances& tol) {
        sim::SimConfig cfg;
        cfg.scenario = sc;
        cfg.format = sim::parse_format(format);
        cfg.replications = replications;
        cfg.seed = seed;
        cfg.auctioneer_value = auctioneer_value;
        if (cfg.format == sim::Format::Fpa) sim::attach_fpa_subgames(cfg, tol);
        sim::SimReport r;
        {
          py::gil_scoped_release release;
          r = sim::simulate(cfg, tol);
        }
        py::dict out;
        out["speculator_profit"] = estimate(r.speculator_profit);
        out["seller_surplus_total"] = estimate(r.seller_surplus_total);
        out["auctioneer_cost"] = estimate(r.auctioneer_cost);
        out["efficiency_loss"] = estimate(r.efficiency_loss);
        out["interim_payoff_at_cutoff"] = estimate(r.interim_payoff_at_cutoff);
        out["seller_surplus_gain"] = estimate(r.seller_surplus_gain);
        out["auctioneer_cost_increase"] = estimate(r.auctioneer_cost_increase);
        out["trade_frequency"] = r.trade_frequency;
        out["replications"] = r.replications;
        return out;
      },
      py::arg("scenario"), py::arg("format") = "spa", py::arg("replications") = 100000,
      py::arg("seed") = 0, py::arg("auctioneer_value") = py::none(), py::arg("tol") = defaults);
}
