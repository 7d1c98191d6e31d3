#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include <json.hpp>

#include "procspec/cli.hpp"
#include "procspec/errors.hpp"

using namespace procspec;
using nlohmann::json;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result call(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string write_config(const std::string& name, const json& j) {
  const auto path = std::filesystem::temp_directory_path() / ("procspec_test_" + name + ".json");
  std::ofstream(path) << j.dump();
  return path.string();
}

const json kUniform2 = {{"N", 2}, {"r", 1.0}, {"distribution", {{"family", "uniform"}}}};

}  // namespace

TEST_CASE("grid syntax") {
  const auto g = cli::parse_grid("0.2:3:0.1");
  CHECK(g.size() == 29);
  CHECK(g.front() == 0.2);
  CHECK(g[1] == 0.3);
  CHECK(g.back() == 3.0);
  CHECK(cli::parse_grid("0.05:1:0.05").size() == 20);
  CHECK(cli::parse_grid("0.4") == std::vector<double>{0.4});
  CHECK_THROWS_AS(cli::parse_grid("1:0:0.1"), ConfigError);
  CHECK_THROWS_AS(cli::parse_grid("0:1:0"), ConfigError);
  CHECK_THROWS_AS(cli::parse_grid("0:1"), ConfigError);
  CHECK_THROWS_AS(cli::parse_grid("a:1:0.1"), ConfigError);
}

TEST_CASE("scenario parsing") {
  const auto cfg = cli::parse_scenario(kUniform2);
  CHECK(cfg.scenario.sellers == 2);
  CHECK(cfg.scenario.access.size() == 2);
  CHECK_FALSE(cfg.has_cutoffs);

  json asym = {{"N", 3},
               {"r", 0.8},
               {"distributions",
                {{{"family", "uniform"}},
                 {{"family", "power"}, {"eta", 2.0}},
                 {{"family", "table"}, {"knots", {{0, 0}, {0.5, 0.7}, {1, 1}}}}}},
               {"access", {0, 2}},
               {"cutoffs", {0.2, 0.3}},
               {"format", "fpa"},
               {"seed", 9},
               {"replications", 500},
               {"tolerances", {{"grid_points", 300}}}};
  const auto a = cli::parse_scenario(asym);
  CHECK(a.scenario.dists[2].cdf(0.5) == doctest::Approx(0.7));
  CHECK(a.scenario.access == std::vector<int>{0, 2});
  CHECK(a.scenario.cutoffs == std::vector<double>{0.2, 0.3});
  CHECK(a.format == sim::Format::Fpa);
  CHECK(a.seed == 9);
  CHECK(a.replications == 500);
  CHECK(a.tolerances.grid_points == 300);

  json missing = kUniform2;
  missing.erase("r");
  try {
    cli::parse_scenario(missing);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("'r'") != std::string::npos);
  }
  json bad = kUniform2;
  bad["distribution"] = {{"family", "power"}, {"eta", -1}};
  CHECK_THROWS_AS(cli::parse_scenario(bad), ConfigError);
  bad = kUniform2;
  bad["N"] = "two";
  CHECK_THROWS_AS(cli::parse_scenario(bad), ConfigError);
}

TEST_CASE("spa commands") {
  const auto path = write_config("spa", kUniform2);
  const auto solved = call({"spa", "solve", "--config", path, "--cutoff", "0.2"});
  REQUIRE(solved.code == cli::kOk);
  const auto j = json::parse(solved.out);
  CHECK(j["price"].get<double>() == doctest::Approx(0.52).epsilon(1e-9));
  CHECK(j["profit"].get<double>() == doctest::Approx(0.024).epsilon(1e-9));
  CHECK(j["decomposition"]["gain_withholding"].is_number());

  const auto best = call({"spa", "optimize", "--config", path});
  REQUIRE(best.code == cli::kOk);
  const auto b = json::parse(best.out);
  CHECK(b["cutoff"].get<double>() == doctest::Approx(1.0 / 3).epsilon(1e-6));
  CHECK(b["profit"].get<double>() == doctest::Approx(1.0 / 27).epsilon(1e-6));
}

TEST_CASE("fpa commands") {
  const auto path = write_config("fpa", kUniform2);
  const auto solved = call({"fpa", "solve", "--config", path, "--cutoff", "0.2"});
  REQUIRE(solved.code == cli::kOk);
  const auto j = json::parse(solved.out);
  CHECK(j["price"].get<double>() == doctest::Approx(0.5425).epsilon(1e-7));
  REQUIRE(j["subgames"].size() == 1);
  CHECK(j["subgames"][0]["b_low"].get<double>() == doctest::Approx(0.3125).epsilon(1e-7));

  const auto region = call({"region", "--N", "2", "--eta", "0.5:1:0.5", "--r", "0.5:1:0.5"});
  REQUIRE(region.code == cli::kOk);
  std::istringstream rows(region.out);
  std::string header;
  std::getline(rows, header);
  CHECK(header == "eta,r,profit,profitable");
  int count = 0;
  for (std::string line; std::getline(rows, line);) ++count;
  CHECK(count == 4);
}

TEST_CASE("extension commands") {
  json asym = {{"N", 3},
               {"r", 1.0},
               {"distribution", {{"family", "uniform"}}},
               {"access", {0, 1}},
               {"cutoff", 0.3}};
  const auto a = call({"asym", "solve", "--config", write_config("asym", asym)});
  REQUIRE(a.code == cli::kOk);
  const auto aj = json::parse(a.out);
  CHECK(aj["prices"].size() == 2);
  CHECK(aj["condition1"]["status"].is_string());

  const auto path = write_config("enh", kUniform2);
  const auto e = call({"enhanced", "solve", "--config", path, "--cutoff", "0.5"});
  REQUIRE(e.code == cli::kOk);
  CHECK(json::parse(e.out)["profit"].get<double>() == doctest::Approx(1.0 / 6).epsilon(1e-7));

  const auto k = call({"knockout", "--config", path});
  REQUIRE(k.code == cli::kOk);
  const auto kj = json::parse(k.out);
  CHECK(kj["enhanced"]["profit"].get<double>() == doctest::Approx(1.0 / 3).epsilon(1e-7));
  CHECK_FALSE(kj["fpa_deviation"]["premise_holds"].get<bool>());

  json low = kUniform2;
  low["r"] = 0.8;
  const auto d = call({"knockout", "--config", write_config("low", low), "--v", "0:0.5:0.25"});
  REQUIRE(d.code == cli::kOk);
  const auto points = json::parse(d.out)["fpa_deviation"]["points"];
  REQUIRE(points.size() == 3);
  for (const auto& p : points) CHECK(p["gain"].get<double>() > 0);
}

TEST_CASE("simulate and compare") {
  json c = kUniform2;
  c["seed"] = 4;
  const auto path = write_config("sim", c);
  const auto a = call({"simulate", "--config", path, "--cutoff", "0.2", "--reps", "4000"});
  const auto b = call({"simulate", "--config", path, "--cutoff", "0.2", "--reps", "4000"});
  REQUIRE(a.code == cli::kOk);
  CHECK(a.out == b.out);
  const auto j = json::parse(a.out);
  CHECK(j["replications"].get<int>() == 4000);
  CHECK(j["analytic_profit"].get<double>() == doctest::Approx(0.024).epsilon(1e-9));

  const auto trace_path = (std::filesystem::temp_directory_path() / "procspec_trace.csv").string();
  const auto t = call({"simulate", "--config", path, "--cutoff", "0.2", "--reps", "10",
                       "--format", "fpa", "--trace", trace_path});
  REQUIRE(t.code == cli::kOk);
  std::ifstream trace(trace_path);
  int lines = 0;
  for (std::string line; std::getline(trace, line);) ++lines;
  CHECK(lines == 11);

  json small = kUniform2;
  small["replications"] = 2000;
  const auto cmp = call({"compare", "--config", write_config("cmp", small)});
  REQUIRE(cmp.code == cli::kOk);
  CHECK(cmp.out.rfind("quantity,spa,fpa\n", 0) == 0);
  CHECK(cmp.out.find("\nprofit,") != std::string::npos);
}

TEST_CASE("exit codes") {
  json missing = kUniform2;
  missing.erase("r");
  const auto m = call({"spa", "optimize", "--config", write_config("missing", missing)});
  CHECK(m.code == cli::kConfigError);
  CHECK(m.err.find("'r'") != std::string::npos);

  CHECK(call({"spa", "optimize", "--config", "/nonexistent/file.json"}).code == cli::kConfigError);
  CHECK(call({"bogus"}).code == cli::kConfigError);
  CHECK(call({"spa", "solve", "--config", write_config("nocut", kUniform2)}).code ==
        cli::kConfigError);
  CHECK(call({"spa", "solve", "--config", write_config("far", kUniform2), "--cutoff", "2"}).code ==
        cli::kConfigError);
  CHECK(call({"region", "--eta", "0:1:0.5", "--r", "0.5"}).code == cli::kConfigError);
  CHECK(call({"--help"}).code == cli::kOk);

  if (const char* exe = std::getenv("PROCSPEC_CLI")) {
    const auto path = write_config("exe", missing);
    const std::string cmd = std::string(exe) + " spa optimize --config " + path + " 2>/dev/null";
    const int status = std::system(cmd.c_str());
    CHECK(WEXITSTATUS(status) == cli::kConfigError);
  }
}
