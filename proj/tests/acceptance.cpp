// Runs the CLI end to end and prints one PASS/FAIL line per acceptance item.
#include "runner/records.hpp"

#include <CLI11.hpp>

#include <sys/wait.h>

#include <algorithm>
#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#ifndef CONELAB_EXE
#define CONELAB_EXE "conelab"
#endif

namespace fs = std::filesystem;
using conelab::runner::ResultRecord;

namespace {

const std::array<const char*, 12> kTitles{
    "curvature oracles",
    "base values and constraint preservation",
    "criticality of the base pair",
    "first variation formulas against finite differences",
    "second variation formulas and conformal symbol",
    "structure of the linearized operator",
    "reduction, exponent recovery and inequality at the base",
    "exact cone models and level-set identities",
    "uniform property constants across the warp family",
    "Eguchi-Hanson monotonicity (non-blocking)",
    "decay engine and bootstrap certificates",
    "deterministic CLI output, exit code and anchors",
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::map<std::string, std::string> tree(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file()) files[fs::relative(e.path(), root).string()] = slurp(e.path());
  return files;
}

int run_cli(const std::string& exe, const std::string& args) {
  const std::string cmd = "\"" + exe + "\" " + args + " > /dev/null";
  const int st = std::system(cmd.c_str());
  return st != -1 && WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"end-to-end acceptance run"};
  std::string exe = CONELAB_EXE, config, work = (fs::temp_directory_path() / "conelab_acceptance").string();
  std::uint64_t seed = 20240601;
  std::vector<int> expect_fail;
  app.add_option("--conelab", exe, "path of the conelab executable");
  app.add_option("--config", config, "config file passed to both runs");
  app.add_option("--seed", seed, "seed for both runs");
  app.add_option("--work", work, "scratch directory");
  app.add_option("--expect-fail", expect_fail, "items known to fail; they do not count against the exit code")
      ->check(CLI::Range(1, 12));
  CLI11_PARSE(app, argc, argv);

  const fs::path a = fs::path(work) / "a", b = fs::path(work) / "b";
  fs::remove_all(work);
  std::string args = "run --suite all --seed " + std::to_string(seed);
  if (!config.empty()) args += " --config \"" + config + "\"";
  const int code_a = run_cli(exe, args + " --out \"" + a.string() + "\" --plot");
  const int code_b = run_cli(exe, args + " --out \"" + b.string() + "\" --plot");
  if (!fs::exists(a / "results.csv")) {
    std::cerr << "acceptance: no results from " << exe << " (exit " << code_a << ")\n";
    return 255;
  }

  const std::vector<ResultRecord> recs = conelab::runner::parse_results_csv(slurp(a / "results.csv"));
  std::array<int, 13> total{}, failed{};
  std::map<int, std::vector<std::string>> failures;
  std::size_t fail_count = 0;
  bool anchors = !recs.empty(), consistent = true;
  std::set<std::string> completed;
  for (const auto& r : recs) {
    const auto* spec = conelab::runner::find_check(r.suite, r.check);
    const int k = spec ? spec->criterion : 0;
    anchors = anchors && !r.anchor.empty() && spec && r.anchor == spec->anchor;
    consistent = consistent && r.pass == r.recompute();
    if (r.check == "completed" && r.pass) completed.insert(r.suite);
    if (!r.pass) ++fail_count;
    if (k < 1 || k > 12) continue;
    ++total[k];
    if (!r.pass) {
      ++failed[k];
      std::ostringstream os;
      os.precision(6);
      os << r.suite << '.' << r.check << " = " << r.value << " (tol " << r.tol << ')';
      failures[k].push_back(os.str());
    }
  }

  const bool same = tree(a) == tree(b);
  const int expected_code = static_cast<int>(std::min<std::size_t>(fail_count, 250));
  const bool all_suites = completed.size() == conelab::runner::suite_names().size();
  const bool cli_ok = same && code_a == expected_code && code_b == code_a && anchors && consistent && all_suites;

  int bad = 0;
  for (int k = 1; k <= 12; ++k) {
    bool ok = failed[k] == 0 && total[k] > 0;
    std::ostringstream detail;
    detail << total[k] - failed[k] << '/' << total[k] << " checks";
    if (k == 12) {
      ok = ok && cli_ok;
      detail << ", identical outputs " << (same ? "yes" : "no") << ", exit " << code_a << " for " << fail_count
             << " failing records, anchors " << (anchors ? "complete" : "missing") << ", suites completed "
             << completed.size();
    }
    std::cout << (ok ? "PASS" : "FAIL") << "  " << k << "  " << kTitles[k - 1] << "  (" << detail.str() << ")\n";
    for (const auto& f : failures[k]) std::cout << "        " << f << '\n';
    const bool expected = std::find(expect_fail.begin(), expect_fail.end(), k) != expect_fail.end();
    if (!ok && !expected) ++bad;
    if (ok && expected) {
      std::cout << "        item " << k << " was expected to fail but passed\n";
      ++bad;
    }
  }
  return bad;
}
