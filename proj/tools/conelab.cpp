#include "runner/config.hpp"
#include "runner/models.hpp"
#include "runner/records.hpp"
#include "runner/suites.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace conelab::runner;

constexpr int kMaxFailureCode = 250;
constexpr int kUsageError = 255;

int failure_code(std::size_t failures) { return int(std::min<std::size_t>(failures, kMaxFailureCode)); }

void validate_models(const ExperimentConfig& cfg) {
  for (const auto& m : cfg.models) {
    try {
      make_model(m);
    } catch (const std::exception& e) {
      throw ConfigError("<config>", 0, "cone-models.models", e.what());
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"conelab: numerical checks for cone uniqueness arguments"};
  app.require_subcommand(1);

  auto* list = app.add_subcommand("list", "List suites and checks");
  bool list_checks = false;
  list->add_flag("--checks", list_checks, "Also list every check with its tolerance");

  auto* run = app.add_subcommand("run", "Run a suite and write results.csv / results.json");
  std::string suite, config_path, out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> parallel, threads;
  bool plot = false, timing = false;
  run->add_option("-s,--suite", suite, "Suite name or 'all'");
  run->add_option("-c,--config", config_path, "Config file (default: $CONELAB_CONFIG)");
  run->add_option("-o,--out", out_dir, "Output directory (overrides the config)");
  run->add_option("--seed", seed, "Random seed (overrides the config)");
  run->add_option("-j,--parallel", parallel, "Suites to run at once")->check(CLI::PositiveNumber);
  run->add_option("-t,--threads", threads, "Worker threads inside a suite")->check(CLI::PositiveNumber);
  run->add_flag("--plot", plot, "Write SVG plots");
  run->add_flag("--timing", timing, "Fill the seconds column (results are then not reproducible)");

  auto* verify = app.add_subcommand("verify", "Recompute pass/fail of a results.csv from its stored values");
  std::string csv_path;
  verify->add_option("csv", csv_path, "results.csv")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kUsageError;
  }

  if (*list) {
    for (const auto& s : list_suites()) {
      std::cout << s << '\n';
      if (!list_checks) continue;
      for (const auto& c : check_table())
        if (c.suite == s) std::cout << "  " << c.id << "  tol " << c.tol << "  " << c.anchor << '\n';
    }
    return 0;
  }

  if (*verify) {
    std::ifstream in(csv_path);
    if (!in) {
      std::cerr << "conelab: cannot open " << csv_path << '\n';
      return kUsageError;
    }
    std::stringstream ss;
    ss << in.rdbuf();
    std::size_t failures = 0, mismatches = 0;
    try {
      for (const auto& r : parse_results_csv(ss.str())) {
        const bool pass = r.recompute();
        failures += pass ? 0 : 1;
        if (pass != r.pass || r.anchor.empty()) {
          ++mismatches;
          std::cout << "mismatch: " << r.suite << '.' << r.check << '\n';
        }
      }
    } catch (const std::exception& e) {
      std::cerr << "conelab: " << e.what() << '\n';
      return kUsageError;
    }
    std::cout << failures << " failing records, " << mismatches << " inconsistent\n";
    return mismatches ? kUsageError : failure_code(failures);
  }

  ExperimentConfig cfg;
  try {
    if (config_path.empty())
      if (const char* env = std::getenv("CONELAB_CONFIG")) config_path = env;
    if (!config_path.empty()) cfg = load_config(config_path, known_check);
    if (!suite.empty()) cfg.suite = suite;
    if (!out_dir.empty()) cfg.output = out_dir;
    if (seed) cfg.seed = *seed;
    if (parallel) cfg.parallel = *parallel;
    if (threads) cfg.threads = *threads;
    if (plot) cfg.plot = true;
    if (timing) cfg.record_timing = true;
    validate(cfg);
    validate_models(cfg);
    const auto names = list_suites();
    if (std::find(names.begin(), names.end(), cfg.suite) == names.end())
      throw ConfigError("<config>", 0, "suite", "unknown suite '" + cfg.suite + "'");
  } catch (const ConfigError& e) {
    std::cerr << "conelab: " << e.what() << '\n';
    return kUsageError;
  }

  const auto t0 = std::chrono::steady_clock::now();
  std::vector<ResultRecord> records;
  try {
    records = conelab::runner::run(cfg, cfg.output);
  } catch (const std::exception& e) {
    std::cerr << "conelab: " << e.what() << '\n';
    return kUsageError;
  }

  std::size_t failures = 0;
  for (const auto& r : records) {
    if (r.pass) continue;
    ++failures;
    std::printf("FAIL %s.%s value %.6g tol %.3g  (%s)\n", r.suite.c_str(), r.check.c_str(), r.value, r.tol,
                r.anchor.c_str());
  }
  std::printf("%zu records, %zu failed; results in %s\n", records.size(), failures, cfg.output.c_str());
  std::fprintf(stderr, "conelab: %.1f s\n", std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  return failure_code(failures);
}
