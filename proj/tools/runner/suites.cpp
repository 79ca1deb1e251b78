#include "runner/suites.hpp"

#include <algorithm>
#include <atomic>
#include <functional>
#include <iostream>
#include <map>
#include <stdexcept>
#include <thread>

namespace conelab::runner {

namespace {

using SuiteFn = void (*)(SuiteContext&);

const std::map<std::string, SuiteFn>& registry() {
  static const std::map<std::string, SuiteFn> m = {
      {"geometry-oracles", geometry_oracles},   {"variation-oracles", variation_oracles},
      {"second-variation", second_variation},   {"linearization-structure", linearization_structure},
      {"lojasiewicz", lojasiewicz},             {"cone-models", cone_models},
      {"appendix-b", appendix_b},               {"decay-engine", decay_engine},
      {"bootstrap", bootstrap}};
  return m;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, const std::string& suite, std::uint64_t k) {
  // FNV-1a over the suite name, mixed with splitmix64
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : suite) h = (h ^ ch) * 1099511628211ull;
  std::uint64_t z = seed ^ h ^ (k * 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

std::vector<std::string> list_suites() {
  std::vector<std::string> v = suite_names();
  v.push_back("all");
  return v;
}

std::vector<ResultRecord> run_suite(const std::string& name, const ExperimentConfig& cfg,
                                    const std::filesystem::path& out) {
  const auto it = registry().find(name);
  if (it == registry().end()) throw std::invalid_argument("unknown suite '" + name + "'");
  SuiteContext ctx(name, cfg, out);
  double failed = 0.0;
  try {
    it->second(ctx);
  } catch (const std::exception& e) {
    std::cerr << "conelab: suite " << name << " stopped: " << e.what() << '\n';
    failed = 1.0;
  }
  ctx.record("completed", failed);
  return ctx.take();
}

std::vector<ResultRecord> run(const ExperimentConfig& cfg, const std::filesystem::path& out) {
  std::vector<std::string> names;
  if (cfg.suite == "all") {
    names = suite_names();
  } else if (registry().count(cfg.suite)) {
    names = {cfg.suite};
  } else {
    throw std::invalid_argument("unknown suite '" + cfg.suite + "'");
  }
  std::filesystem::create_directories(out);

  std::vector<std::vector<ResultRecord>> parts(names.size());
  const int workers = std::clamp<int>(cfg.parallel, 1, int(names.size()));
  if (workers == 1) {
    for (std::size_t i = 0; i < names.size(); ++i) parts[i] = run_suite(names[i], cfg, out);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t i; (i = next++) < names.size();) parts[i] = run_suite(names[i], cfg, out);
      });
    for (auto& t : pool) t.join();
  }

  std::vector<ResultRecord> all;
  for (auto& p : parts) std::move(p.begin(), p.end(), std::back_inserter(all));
  write_file(out / "results.csv", results_csv(all));
  write_file(out / "results.json", results_json(all, cfg));
  return all;
}

}  // namespace conelab::runner
