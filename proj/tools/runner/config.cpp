#include "runner/config.hpp"

#include <algorithm>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <functional>
#include <fstream>
#include <sstream>

namespace conelab::runner {

namespace pt = boost::property_tree;

ConfigError::ConfigError(const std::string& origin, int line, const std::string& key, const std::string& what)
    : std::runtime_error(origin + (line > 0 ? ":" + std::to_string(line) : std::string()) +
                         (key.empty() ? std::string() : ": key '" + key + "'") + ": " + what),
      line_(line),
      key_(key) {}

namespace {

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Line of `key` inside `section` ("" for the top level); 0 if not found.
int locate(const std::string& text, const std::string& section, const std::string& key) {
  std::istringstream is(text);
  std::string line, current;
  int no = 0;
  while (std::getline(is, line)) {
    ++no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[') {
      current = trim(t.substr(1, t.find(']') - 1));
      if (key.empty() && current == section) return no;
      continue;
    }
    const auto eq = t.find('=');
    if (current == section && eq != std::string::npos && trim(t.substr(0, eq)) == key) return no;
  }
  return 0;
}

class Reader {
 public:
  Reader(const std::string& text, const std::string& origin) : text_(text), origin_(origin) {}

  [[noreturn]] void fail(const std::string& section, const std::string& key, const std::string& what) const {
    const std::string full = section.empty() ? key : section + "." + key;
    throw ConfigError(origin_, locate(text_, section, key), full, what);
  }

  template <class T>
  T number(const std::string& section, const std::string& key, const std::string& raw) const {
    const std::string s = trim(raw);
    T v{};
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) fail(section, key, "not a number: '" + s + "'");
    return v;
  }

  bool boolean(const std::string& section, const std::string& key, const std::string& raw) const {
    const std::string s = trim(raw);
    if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
    if (s == "false" || s == "0" || s == "no" || s == "off") return false;
    fail(section, key, "not a boolean: '" + s + "'");
  }

  template <class T>
  std::vector<T> list(const std::string& section, const std::string& key, const std::string& raw) const {
    std::string spaced = raw;  // commas and whitespace both separate items
    std::replace(spaced.begin(), spaced.end(), ',', ' ');
    std::istringstream is(spaced);
    std::vector<T> out;
    std::string item;
    while (is >> item) {
      if constexpr (std::is_same_v<T, std::string>)
        out.push_back(item);
      else
        out.push_back(number<T>(section, key, item));
    }
    if (out.empty()) fail(section, key, "empty list");
    return out;
  }

  template <class T>
  T positive(const std::string& section, const std::string& key, const std::string& raw) const {
    const T v = number<T>(section, key, raw);
    if (!(v > T(0))) fail(section, key, "must be positive");
    return v;
  }

 private:
  const std::string& text_;
  const std::string& origin_;
};

using Setter = std::function<void(ExperimentConfig&, const Reader&, const std::string&, const std::string&,
                                  const std::string&)>;
using KeyTable = std::map<std::string, Setter>;

template <class T, class M>
Setter pos(M ExperimentConfig::*field) {
  return [field](ExperimentConfig& c, const Reader& r, const std::string& s, const std::string& k,
                 const std::string& v) { c.*field = r.positive<T>(s, k, v); };
}

const std::map<std::string, KeyTable>& schema() {
  static const std::map<std::string, KeyTable> table = [] {
    std::map<std::string, KeyTable> t;
    t[""] = {
        {"suite", [](auto& c, auto&, auto&, auto&, auto& v) { c.suite = trim(v); }},
        {"seed", [](auto& c, auto& r, auto& s, auto& k, auto& v) { c.seed = r.template number<std::uint64_t>(s, k, v); }},
        {"output", [](auto& c, auto&, auto&, auto&, auto& v) { c.output = trim(v); }},
        {"plot", [](auto& c, auto& r, auto& s, auto& k, auto& v) { c.plot = r.boolean(s, k, v); }},
        {"record_timing", [](auto& c, auto& r, auto& s, auto& k, auto& v) { c.record_timing = r.boolean(s, k, v); }},
        {"parallel", pos<int>(&ExperimentConfig::parallel)},
        {"threads", pos<int>(&ExperimentConfig::threads)},
    };
    t["grid"] = {
        {"n_lat", pos<int>(&ExperimentConfig::n_lat)},
        {"n_lon", pos<int>(&ExperimentConfig::n_lon)},
        {"L", pos<int>(&ExperimentConfig::L)},
    };
    t["geometry-oracles"] = {{"samples", pos<int>(&ExperimentConfig::geometry_samples)}};
    t["variation-oracles"] = {{"samples", pos<int>(&ExperimentConfig::variation_samples)}};
    t["second-variation"] = {{"samples", pos<int>(&ExperimentConfig::second_variation_samples)}};
    t["linearization-structure"] = {
        {"york_samples", pos<int>(&ExperimentConfig::york_samples)},
        {"conformal_images", pos<int>(&ExperimentConfig::conformal_images)},
    };
    t["lojasiewicz"] = {
        {"reduction_samples", pos<int>(&ExperimentConfig::reduction_samples)},
        {"exponent_samples", pos<int>(&ExperimentConfig::exponent_samples)},
        {"radius", pos<double>(&ExperimentConfig::exponent_radius)},
        {"flow_iterations", pos<int>(&ExperimentConfig::flow_iterations)},
    };
    t["cone-models"] = {
        {"models", [](auto& c, auto& r, auto& s, auto& k, auto& v) { c.models = r.template list<std::string>(s, k, v); }},
        {"family", [](auto& c, auto& r, auto& s, auto& k, auto& v) {
           c.family = r.template list<double>(s, k, v);
           for (double e : c.family)
             if (!(e > 0.0)) r.fail(s, k, "family members must be positive");
         }},
        {"property_radii", pos<int>(&ExperimentConfig::property_radii)},
        {"eguchi_hanson", [](auto& c, auto& r, auto& s, auto& k, auto& v) { c.eguchi_hanson = r.boolean(s, k, v); }},
    };
    t["appendix-b"] = {
        {"levels", [](auto& c, auto& r, auto& s, auto& k, auto& v) {
           c.levels = r.template list<double>(s, k, v);
           for (double e : c.levels)
             if (!(e > 0.0)) r.fail(s, k, "levels must be positive");
         }},
    };
    t["decay-engine"] = {
        {"jmax", pos<std::size_t>(&ExperimentConfig::decay_jmax)},
        {"alg_grid", pos<int>(&ExperimentConfig::alg_grid)},
    };
    t["bootstrap"] = {{"m", pos<std::size_t>(&ExperimentConfig::bootstrap_m)}};
    return t;
  }();
  return table;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text, const std::string& origin,
                              const std::function<bool(const std::string&)>& known_check) {
  pt::ptree tree;
  std::istringstream is(text);
  try {
    pt::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(origin, static_cast<int>(e.line()), "", e.message());
  }

  ExperimentConfig c;
  const Reader reader(text, origin);
  for (const auto& [name, node] : tree) {
    if (node.empty() && node.data().empty() && locate(text, name, "") > 0) {
      if (!schema().count(name) && name != "tolerances")
        throw ConfigError(origin, locate(text, name, ""), name, "unknown section");
      continue;
    }
    if (node.empty()) {
      const auto& top = schema().at("");
      const auto it = top.find(name);
      if (it == top.end()) reader.fail("", name, "unknown key");
      it->second(c, reader, "", name, node.data());
      continue;
    }
    if (name == "tolerances") {
      for (const auto& [key, leaf] : node) {
        const double tol = reader.number<double>(name, key, leaf.data());
        if (!(tol > 0.0)) reader.fail(name, key, "tolerance must be positive");
        if (key.find('.') == std::string::npos) reader.fail(name, key, "expected suite.check");
        if (known_check && !known_check(key)) reader.fail(name, key, "no such check");
        c.tolerances[key] = tol;
      }
      continue;
    }
    const auto sec = schema().find(name);
    if (sec == schema().end() || name.empty())
      throw ConfigError(origin, locate(text, name, ""), name, "unknown section");
    for (const auto& [key, leaf] : node) {
      const auto it = sec->second.find(key);
      if (it == sec->second.end()) reader.fail(name, key, "unknown key");
      it->second(c, reader, name, key, leaf.data());
    }
  }
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path,
                             const std::function<bool(const std::string&)>& known_check) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string(), 0, "", "cannot open config file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.string(), known_check);
}

void validate(const ExperimentConfig& c) {
  if (!c.seed) throw ConfigError("<config>", 0, "seed", "a seed is required (config key or --seed)");
  if (c.n_lon % 2 != 0) throw ConfigError("<config>", 0, "grid.n_lon", "must be even");
  if (c.n_lat < 8) throw ConfigError("<config>", 0, "grid.n_lat", "must be at least 8");
  if (c.family.size() < 2) throw ConfigError("<config>", 0, "cone-models.family", "needs at least two members");
}

}  // namespace conelab::runner
