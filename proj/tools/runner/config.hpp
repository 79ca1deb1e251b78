#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace conelab::runner {

// Flat key/value text with one section per suite:
//
//   seed = 7
//   [grid]
//   n_lat = 48
//   [tolerances]
//   geometry-oracles.sphere_scalar = 1e-6
//
// Comments start with '#' or ';'.  Unknown sections and keys are errors.
struct ExperimentConfig {
  std::string suite = "all";
  std::optional<std::uint64_t> seed;
  std::string output = "results";
  bool plot = false;
  bool record_timing = false;  // seconds column; off keeps output files reproducible
  int parallel = 1;            // suites run at once
  int threads = 1;             // workers inside a suite

  int n_lat = 48, n_lon = 96, L = 4;

  int geometry_samples = 3;
  int variation_samples = 10;
  int second_variation_samples = 10;
  int york_samples = 3;
  int conformal_images = 4;
  int reduction_samples = 20;
  int exponent_samples = 200;
  double exponent_radius = 1e-2;
  int flow_iterations = 20;

  std::vector<std::string> models{"euclidean", "cone:0.9", "tanh:1.2:0.9", "bump:0.1"};
  std::vector<double> family{0.2, 0.1, 0.05, 0.025, 0.0125};
  int property_radii = 8;
  bool eguchi_hanson = true;
  std::vector<double> levels{0.5, 1.0, 1.7};

  std::size_t decay_jmax = 10000;
  int alg_grid = 10;
  std::size_t bootstrap_m = 400;

  // "suite.check" -> tolerance
  std::map<std::string, double> tolerances;
};

class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& origin, int line, const std::string& key, const std::string& what);
  int line() const { return line_; }
  const std::string& key() const { return key_; }

 private:
  int line_;
  std::string key_;
};

// `origin` names the source in error messages.
// `known_check` vets [tolerances] keys when given.
ExperimentConfig parse_config(const std::string& text, const std::string& origin = "<config>",
                              const std::function<bool(const std::string&)>& known_check = {});
ExperimentConfig load_config(const std::filesystem::path& path,
                             const std::function<bool(const std::string&)>& known_check = {});

// Throws ConfigError when the seed is missing or a value is out of range.
void validate(const ExperimentConfig& c);

}  // namespace conelab::runner
