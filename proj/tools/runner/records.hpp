#pragma once

#include "runner/config.hpp"

#include <chrono>
#include <filesystem>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

namespace conelab::runner {

// A check passes when its measured value is finite and at most its tolerance.
// Values are errors, residuals, spreads or violation counts.
struct CheckSpec {
  std::string_view suite;
  std::string_view id;
  std::string_view anchor;  // the statement being checked
  double tol;
  int criterion;            // acceptance item the check feeds, 0 for none
};

const std::vector<CheckSpec>& check_table();
const CheckSpec* find_check(std::string_view suite, std::string_view id);
// "suite.check"
bool known_check(const std::string& key);

const std::vector<std::string>& suite_names();  // run order, without "all"

struct ResultRecord {
  std::string suite, check, anchor;
  double value = 0.0, tol = 0.0;
  bool pass = false;
  double seconds = 0.0;
  int criterion = 0;

  bool recompute() const;  // pass from value and tol
};

class SuiteContext {
 public:
  SuiteContext(std::string suite, const ExperimentConfig& cfg, std::filesystem::path out);

  const ExperimentConfig& config() const { return *cfg_; }
  const std::string& suite() const { return suite_; }
  std::uint64_t seed() const { return *cfg_->seed; }

  // Seconds are measured from the previous record (or the suite start).
  void record(std::string_view id, double value);
  // Writes artifacts/<suite>/<name>.
  void artifact(const std::string& name, const std::string& content) const;
  // Writes plots/<name> when plotting is on.
  void plot(const std::string& name, const std::string& svg) const;
  bool plotting() const { return cfg_->plot; }

  std::vector<ResultRecord> take() { return std::move(records_); }

 private:
  std::string suite_;
  const ExperimentConfig* cfg_;
  std::filesystem::path out_;
  std::vector<ResultRecord> records_;
  std::chrono::steady_clock::time_point mark_;
};

std::string results_csv(const std::vector<ResultRecord>& rs);
std::string results_json(const std::vector<ResultRecord>& rs, const ExperimentConfig& cfg);
std::vector<ResultRecord> parse_results_csv(const std::string& text);

void write_file(const std::filesystem::path& p, const std::string& content);

}  // namespace conelab::runner
