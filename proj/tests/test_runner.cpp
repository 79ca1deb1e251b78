#include <doctest.h>

#include "runner/config.hpp"
#include "runner/records.hpp"
#include "runner/suites.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace conelab::runner;
namespace fs = std::filesystem;

namespace {
fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("conelab_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

ExperimentConfig small_config() {
  ExperimentConfig c = parse_config("seed = 5\n[grid]\nn_lat = 16\nn_lon = 32\n", "<test>", known_check);
  c.decay_jmax = 2000;
  c.alg_grid = 4;
  c.bootstrap_m = 60;
  return c;
}
}  // namespace

TEST_SUITE("runner") {
  TEST_CASE("config values") {
    const ExperimentConfig c = parse_config(
        "seed = 42\n[grid]\nn_lat = 24\nn_lon = 48\nL = 3\n[cone-models]\nmodels = euclidean, cone:0.8\n"
        "[tolerances]\ncone-models.property_spread = 20\n",
        "<test>", known_check);
    CHECK(*c.seed == 42);
    CHECK(c.n_lat == 24);
    CHECK(c.L == 3);
    CHECK(c.models == std::vector<std::string>{"euclidean", "cone:0.8"});
    CHECK(c.tolerances.at("cone-models.property_spread") == 20.0);
    CHECK_NOTHROW(validate(c));
  }

  TEST_CASE("config errors name the line and key") {
    try {
      parse_config("seed = 1\n[grid]\nn_lat = 24\nn_lon = abc\n", "<test>", known_check);
      FAIL("no error");
    } catch (const ConfigError& e) {
      CHECK(e.line() == 4);
      CHECK(e.key() == "grid.n_lon");
    }
    CHECK_THROWS_AS(parse_config("[grid]\nbogus = 1\n", "<test>", known_check), ConfigError);
    CHECK_THROWS_AS(parse_config("[nowhere]\nx = 1\n", "<test>", known_check), ConfigError);
    CHECK_THROWS_AS(parse_config("[tolerances]\ncone-models.property_spread = 0\n", "<test>", known_check),
                    ConfigError);
    CHECK_THROWS_AS(parse_config("[tolerances]\ncone-models.nothing = 1\n", "<test>", known_check), ConfigError);
    CHECK_THROWS_AS(parse_config("[tolerances]\nplain = 1\n", "<test>", known_check), ConfigError);
    CHECK_THROWS(validate(parse_config("[grid]\nn_lat = 24\n", "<test>", known_check)));
    CHECK_THROWS(validate(parse_config("seed = 1\n[grid]\nn_lon = 33\n", "<test>", known_check)));
  }

  TEST_CASE("check table") {
    CHECK(suite_names().size() == 9);
    for (const auto& s : suite_names()) CHECK(find_check(s, "completed") != nullptr);
    for (const CheckSpec& c : check_table()) {
      CHECK(c.tol > 0.0);
      CHECK(!c.anchor.empty());
      CHECK(c.criterion >= 1);
      CHECK(c.criterion <= 12);
    }
    CHECK(known_check("bootstrap.tail_bound"));
    CHECK_FALSE(known_check("bootstrap.nothing"));
  }

  TEST_CASE("records apply overrides and reject unknown ids") {
    ExperimentConfig c = small_config();
    c.tolerances["decay-engine.series_bound"] = 1e-30;
    SuiteContext ctx("decay-engine", c, scratch("records"));
    ctx.record("series_bound", 1e-20);
    ctx.record("theta_sum", 0.0);
    CHECK_THROWS_AS(ctx.record("nothing", 0.0), std::logic_error);
    const auto rs = ctx.take();
    REQUIRE(rs.size() == 2);
    CHECK_FALSE(rs[0].pass);
    CHECK(rs[0].tol == 1e-30);
    CHECK(rs[0].value == 1e-20);
    CHECK(rs[1].pass);
    CHECK(rs[0].seconds == 0.0);
  }

  TEST_CASE("non-finite values fail") {
    ResultRecord r{"s", "c", "a", std::nan(""), 1.0, false, 0.0, 1};
    CHECK_FALSE(r.recompute());
    r.value = 1.0;
    CHECK(r.recompute());
    r.value = std::numeric_limits<double>::infinity();
    CHECK_FALSE(r.recompute());
  }

  TEST_CASE("csv round trip") {
    std::vector<ResultRecord> rs{{"geometry-oracles", "sphere_scalar", "anchor, with comma", 1.25e-11, 1e-6, true, 0.0, 1},
                                 {"bootstrap", "completed", "suite \"ran\"", 0.0, 0.5, true, 0.0, 12}};
    const std::string csv = results_csv(rs);
    CHECK(csv.rfind("suite,check,anchor,value,tol,pass,seconds\n", 0) == 0);
    const auto back = parse_results_csv(csv);
    REQUIRE(back.size() == 2);
    for (std::size_t i = 0; i < rs.size(); ++i) {
      CHECK(back[i].suite == rs[i].suite);
      CHECK(back[i].check == rs[i].check);
      CHECK(back[i].anchor == rs[i].anchor);
      CHECK(back[i].value == rs[i].value);
      CHECK(back[i].tol == rs[i].tol);
      CHECK(back[i].pass == rs[i].pass);
    }
  }

  TEST_CASE("seed derivation") {
    CHECK(derive_seed(1, "a", 0) == derive_seed(1, "a", 0));
    CHECK(derive_seed(1, "a", 0) != derive_seed(2, "a", 0));
    CHECK(derive_seed(1, "a", 0) != derive_seed(1, "b", 0));
    CHECK(derive_seed(1, "a", 0) != derive_seed(1, "a", 1));
  }

  TEST_CASE("geometry oracles on a small grid") {
    ExperimentConfig c = small_config();
    c.n_lat = 32;
    c.n_lon = 64;
    const auto rs = run_suite("geometry-oracles", c, scratch("geometry"));
    CHECK(rs.size() == 11);
    for (const auto& r : rs) {
      INFO(r.check, " = ", r.value);
      CHECK(r.pass);
    }
  }

  TEST_CASE("runs are reproducible") {
    ExperimentConfig c = small_config();
    c.suite = "decay-engine";
    const fs::path a = scratch("det_a"), b = scratch("det_b");
    const auto ra = run(c, a);
    const auto rb = run(c, b);
    CHECK(ra.size() == rb.size());
    CHECK(slurp(a / "results.csv") == slurp(b / "results.csv"));
    CHECK(slurp(a / "results.json") == slurp(b / "results.json"));
    CHECK(std::all_of(ra.begin(), ra.end(), [](const ResultRecord& r) { return r.pass; }));
  }

  TEST_CASE("unknown suite") {
    ExperimentConfig c = small_config();
    c.suite = "nothing";
    CHECK_THROWS(run(c, scratch("unknown")));
  }
}
