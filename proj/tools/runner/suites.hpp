#pragma once

#include "runner/config.hpp"
#include "runner/records.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace conelab::runner {

void geometry_oracles(SuiteContext& ctx);
void variation_oracles(SuiteContext& ctx);
void second_variation(SuiteContext& ctx);
void linearization_structure(SuiteContext& ctx);
void lojasiewicz(SuiteContext& ctx);
void cone_models(SuiteContext& ctx);
void appendix_b(SuiteContext& ctx);
void decay_engine(SuiteContext& ctx);
void bootstrap(SuiteContext& ctx);

// Names accepted by run(): suite_names() plus "all".
std::vector<std::string> list_suites();

// One suite; an exception is turned into a failed "completed" record.
std::vector<ResultRecord> run_suite(const std::string& name, const ExperimentConfig& cfg,
                                    const std::filesystem::path& out);

// The configured suite (or all of them, `parallel` at a time), with records
// in a fixed order.  Writes results.csv and results.json under `out`.
std::vector<ResultRecord> run(const ExperimentConfig& cfg, const std::filesystem::path& out);

// Per-suite seed stream, stable under reordering of suites.
std::uint64_t derive_seed(std::uint64_t seed, const std::string& suite, std::uint64_t k);

}  // namespace conelab::runner
