#include "doctest.h"
#include "fewlab/experiments.hpp"
#include "fewlab/parallel.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

using namespace fewlab;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::filesystem::path scratch_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("fewlab_cli_" + name);
  std::filesystem::remove_all(p);
  return p;
}

ExperimentConfig config(const std::string& text) {
  return ExperimentConfig::from_json(Json::parse(text));
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(FEWLAB_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("seed derivation") {
  CHECK(derive_seed(1, "a", 0) == derive_seed(1, "a", 0));
  CHECK(derive_seed(1, "a", 0) != derive_seed(1, "a", 1));
  CHECK(derive_seed(1, "a", 0) != derive_seed(1, "b", 0));
  CHECK(derive_seed(1, "a", 0) != derive_seed(2, "a", 0));
}

TEST_CASE("parallel_map keeps index order and rethrows") {
  for (int w : {1, 3, 8}) {
    const auto v = parallel_map<long>(1000, w, [](long i) { return i * i; });
    REQUIRE(v.size() == 1000);
    for (long i = 0; i < 1000; ++i) CHECK(v[static_cast<std::size_t>(i)] == i * i);
  }
  CHECK_THROWS_AS(parallel_map<int>(50, 4, [](long i) -> int {
                    if (i == 17) throw std::runtime_error("boom");
                    return 0;
                  }),
                  std::runtime_error);
  CHECK(parallel_map<int>(0, 4, [](long) { return 1; }).empty());
}

TEST_CASE("config validation") {
  CHECK_NOTHROW(config(R"({"experiment":"example-2n","samples":10})"));
  CHECK_THROWS_AS(config(R"({"experiment":"example-2n","samples":0})"), ConfigError);
  CHECK_THROWS_AS(config(R"({"experiment":"example-2n","samples":-3})"), ConfigError);
  CHECK_THROWS_AS(config(R"({"experiment":"no-such","samples":10})"), ConfigError);
  CHECK_THROWS_AS(config(R"({"samples":10})"), ConfigError);
  CHECK_THROWS_AS(config(R"({"experiment":"example-2n"})"), ConfigError);
  CHECK_THROWS_AS(config(R"({"experiment":"example-2n","samples":10,"workers":0})"), ConfigError);
  CHECK_THROWS_AS(config(R"({"experiment":"example-2n","samples":10,"seed":-1})"), ConfigError);
  CHECK_THROWS_AS(config(R"({"experiment":"example-2n","samples":10,"sampels":3})"), ConfigError);
  CHECK_THROWS_AS(config(R"([1, 2])"), ConfigError);

  const auto c = ExperimentConfig::from_json(
      Json::parse(R"({"experiment":"example-2n","samples":10})"), 77);
  CHECK(c.seed == 77);
  const auto d = ExperimentConfig::from_json(
      Json::parse(R"({"experiment":"example-2n","samples":10,"seed":5})"), 77);
  CHECK(d.seed == 5);
  const auto big = config(R"({"experiment":"example-2n","samples":1,"seed":18446744073709551615})");
  CHECK(big.seed == 18446744073709551615ULL);
}

TEST_CASE("support generators") {
  SUBCASE("explicit list") {
    const auto cs = expand_supports(Json::parse("[[[0,0],[1,0]],[[0,0],[0,1]]]"), 1);
    REQUIRE(cs.size() == 1);
    CHECK(cs[0].supports.size() == 2);
    CHECK(cs[0].supports[1].points()(1, 1) == 1.0);
  }
  SUBCASE("malformed supports") {
    CHECK_THROWS_AS(expand_supports(Json::parse("[[[0,0],[1,0]]]"), 1), ConfigError);
    CHECK_THROWS_AS(expand_supports(Json::parse("[[[0,0],[1]],[[0,0],[0,1]]]"), 1), ConfigError);
    CHECK_THROWS_AS(expand_supports(Json::parse(R"({"generator":"magic"})"), 1), ConfigError);
    CHECK_THROWS_AS(expand_supports(Json::parse("[[[0,0],[0,0]],[[0,0],[0,1]]]"), 1), ConfigError);
  }
  SUBCASE("random supports are reproducible and full dimensional") {
    const Json spec = Json::parse(R"({"generator":"random","n":2,"t":{"min":2,"max":5},"count":12,"box":[0,6]})");
    const auto a = expand_supports(spec, 3);
    const auto b = expand_supports(spec, 3);
    REQUIRE(a.size() == 12);
    for (std::size_t k = 0; k < a.size(); ++k) {
      CHECK(a[k].label == b[k].label);
      for (std::size_t i = 0; i < 2; ++i) {
        CHECK(a[k].supports[i].points() == b[k].supports[i].points());
        CHECK(a[k].supports[i].size() >= 2);
        CHECK(a[k].supports[i].size() <= 5);
        CHECK(a[k].supports[i].points().minCoeff() >= 0);
        CHECK(a[k].supports[i].points().maxCoeff() <= 6);
      }
      CHECK(SystemGeometry::of(a[k].supports).full_dimensional);
    }
  }
  SUBCASE("sweep over t") {
    const auto cs = expand_supports(
        Json::parse(R"({"generator":"random","n":1,"t":{"min":2,"max":6},"sweep_t":true,"box":[0,20]})"), 1);
    REQUIRE(cs.size() == 5);
    for (int k = 0; k < 5; ++k) CHECK(cs[static_cast<std::size_t>(k)].supports[0].size() == k + 2);
  }
  SUBCASE("product and stretched") {
    const Support p = product_support({{0, 1, 3}, {0, 2}});
    CHECK(p.size() == 6);
    CHECK(p.dim() == 2);
    const auto st = expand_supports(
        Json::parse(R"({"generator":"stretched","base":[[[0,0],[1,0]],[[0,0],[0,1]]],"multipliers":[1,3]})"), 1);
    REQUIRE(st.size() == 2);
    CHECK(st[1].stretch == 3.0);
    CHECK(st[1].supports[0].points()(0, 1) == 3.0);
  }
  SUBCASE("json round trip") {
    const Support s = product_support({{0, 1, 3}, {0, 2}});
    CHECK(support_from_json(support_to_json(s)).points() == s.points());
  }
}

TEST_CASE("monte carlo counting does not depend on the worker count") {
  const auto cs = expand_supports(Json::parse(R"({"generator":"random","n":2,"count":1})"), 11);
  const CountingSummary a = monte_carlo_count(cs[0].supports, 300, 5, "s", 1);
  const CountingSummary b = monte_carlo_count(cs[0].supports, 300, 5, "s", 4);
  CHECK(a.mean == b.mean);
  CHECK(a.std_error == b.std_error);
  REQUIRE(a.outcomes.size() == b.outcomes.size());
  for (std::size_t i = 0; i < a.outcomes.size(); ++i) CHECK(a.outcomes[i].count == b.outcomes[i].count);
  const CountingSummary c = monte_carlo_count(cs[0].supports, 300, 6, "s", 1);
  CHECK(c.mean != a.mean);
}

TEST_CASE("example-2n run, reports and reproducibility") {
  ExperimentConfig cfg = config(R"({"experiment":"example-2n","samples":4000,"seed":3,
                                    "supports":{"generator":"decoupled","n":[1,2]}})");
  const ExperimentReport r = run_experiment(cfg);
  REQUIRE(r.rows.size() == 2);
  CHECK(r.passed());
  CHECK(std::abs(r.rows[0].estimate - 0.5) < 0.05);
  CHECK(std::abs(r.rows[1].estimate - 0.25) < 0.05);
  CHECK(r.rows[1].value("expected") == 0.25);
  CHECK(std::isnan(r.rows[1].value("missing")));

  const auto d1 = scratch_dir("e1"), d8 = scratch_dir("e8");
  cfg.output_dir = d1.string();
  cfg.plots = true;
  write_report(r, cfg);
  cfg.workers = 8;
  cfg.output_dir = d8.string();
  write_report(run_experiment(cfg), cfg);
  CHECK(slurp(d1 / "report.json") == slurp(d8 / "report.json"));
  CHECK(std::filesystem::exists(d1 / "example-2n.svg"));
  CHECK(slurp(d1 / "example-2n.svg").find("<svg") == 0);

  const std::string csv = slurp(d1 / "report.csv");
  CHECK(csv.rfind("# fewnomial-lab report csv v1\n", 0) == 0);
  CHECK(csv.find("wall_time") != std::string::npos);
  const Json j = Json::parse(slurp(d1 / "report.json"));
  CHECK(j["schema"] == "fewnomial-lab/report/1");
  CHECK(j["passed"] == true);
  CHECK(j["rows"][0].contains("wall_time") == false);
  CHECK(j["rows"][1]["bounds"]["V0"] == 4);
}

TEST_CASE("unwritable output directory") {
  const auto f = scratch_dir("file");
  std::ofstream(f) << "x";
  ExperimentConfig cfg = config(R"({"experiment":"example-2n","samples":1})");
  cfg.output_dir = (f / "sub").string();
  ExperimentReport r;
  CHECK_THROWS_AS(write_report(r, cfg), ConfigError);
}

TEST_CASE("catalog experiments at small scale") {
  SUBCASE("unmixed-compare reproduces the n = 5, t = 7 comparison") {
    const ExperimentReport r = run_experiment(config(
        R"({"experiment":"unmixed-compare","samples":200,"params":{"cases":[[2,4],[5,7]]}})"));
    REQUIRE(r.rows.size() == 2);
    CHECK(r.rows[1].value("prop_exceeds_betc") == 1.0);
    CHECK(r.rows[1].bounds->prop_unmixed > r.rows[1].bounds->betc_unmixed);
    CHECK(r.passed());
  }
  SUBCASE("jindal-sweep rows respect the bound") {
    const ExperimentReport r = run_experiment(config(
        R"({"experiment":"jindal-sweep","samples":500,
            "supports":{"generator":"random","n":1,"t":{"min":2,"max":6},"sweep_t":true,"box":[0,20]}})"));
    CHECK(r.rows.size() == 5);
    CHECK(r.passed());
  }
  SUBCASE("concentration trend") {
    const ExperimentReport r =
        run_experiment(config(R"({"experiment":"concentration","samples":1500})"));
    CHECK(r.rows.size() == 4);
    CHECK(r.passed());
  }
  SUBCASE("mvr-product needs product supports") {
    CHECK_THROWS_AS(run_experiment(config(
                        R"({"experiment":"mvr-product","samples":10,"supports":[[[0,0],[1,0]],[[0,0],[0,1]]]})")),
                    ConfigError);
  }
}

TEST_CASE("command line") {
  const auto dir = scratch_dir("cmd");
  std::filesystem::create_directories(dir);
  const auto cfg = dir / "cfg.json";
  std::ofstream(cfg) << R"({"experiment":"example-2n","samples":500,"supports":{"generator":"decoupled","n":[1]}})";
  CHECK(run_cli("list-experiments") == 0);
  CHECK(run_cli("run --config " + cfg.string() + " --out " + (dir / "a").string()) == 0);
  CHECK(std::filesystem::exists(dir / "a" / "report.json"));
  CHECK(run_cli("run --config " + cfg.string() + " --seed 9 --workers 3 --out " + (dir / "b").string()) == 0);
  CHECK(Json::parse(slurp(dir / "b" / "report.json"))["seed"] == 9);
  CHECK(run_cli("run --config " + cfg.string() + " --out " + (dir / "e").string()) == 0);
  CHECK(Json::parse(slurp(dir / "e" / "report.json"))["seed"] == 0);
  CHECK(std::system(("FEWNOMIAL_LAB_SEED=42 " + std::string(FEWLAB_CLI) + " run --config " +
                     cfg.string() + " --out " + (dir / "f").string() + " > /dev/null").c_str()) == 0);
  CHECK(Json::parse(slurp(dir / "f" / "report.json"))["seed"] == 42);

  const auto bad = dir / "bad.json";
  std::ofstream(bad) << R"({"experiment":"example-2n","samples":)";
  CHECK(run_cli("run --config " + bad.string()) == 2);
  const auto zero = dir / "zero.json";
  std::ofstream(zero) << R"({"experiment":"example-2n","samples":0})";
  CHECK(run_cli("run --config " + zero.string()) == 2);
  const auto unknown = dir / "unknown.json";
  std::ofstream(unknown) << R"({"experiment":"nope","samples":3})";
  CHECK(run_cli("run --config " + unknown.string()) == 2);
  CHECK(run_cli("run --config " + cfg.string() + " --out /proc/forbidden") == 2);
  CHECK(run_cli("frobnicate") == 2);

  // A run whose verdicts fail exits with 1.
  const auto failing = dir / "failing.json";
  std::ofstream(failing)
      << R"({"experiment":"invariance","samples":1,"seed":7,
             "supports":{"generator":"random","n":2,"t":{"min":3,"max":5},"count":40}})";
  CHECK(run_cli("run --config " + failing.string() + " --out " + (dir / "c").string()) == 1);

  const auto sys = dir / "sys.json";
  std::ofstream(sys) << R"({"supports":[[[0,0],[1,0]],[[0,0],[0,1]]],"coeffs":[[1,-2],[-3,1]]})";
  const std::string out = (dir / "replay.json").string();
  CHECK(std::system((std::string(FEWLAB_CLI) + " replay --compact --system " + sys.string() + " > " + out).c_str()) == 0);
  const Json r = Json::parse(slurp(out));
  CHECK(r["count"] == 1);
  CHECK(r["certified"] == true);
  CHECK(r["zeros"][0]["w"][0].get<double>() == doctest::Approx(std::log(0.5)));
  CHECK(r["zeros"][0]["w"][1].get<double>() == doctest::Approx(std::log(3.0)));
}
