#include "runner/models.hpp"

#include <charconv>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace conelab::runner {

WarpedModel make_model(const std::string& preset) {
  std::vector<std::string> parts;
  std::istringstream is(preset);
  for (std::string p; std::getline(is, p, ':');) parts.push_back(p);
  if (parts.empty()) throw std::invalid_argument("empty model preset");

  std::vector<double> args;
  for (std::size_t i = 1; i < parts.size(); ++i) {
    double v = 0.0;
    const auto& s = parts[i];
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size())
      throw std::invalid_argument("model preset '" + preset + "': bad number '" + s + "'");
    args.push_back(v);
  }
  auto want = [&](std::size_t k) {
    if (args.size() != k)
      throw std::invalid_argument("model preset '" + preset + "': expected " + std::to_string(k) + " parameters");
  };

  const std::string& kind = parts[0];
  WarpedModel m;
  if (kind == "euclidean") {
    want(0);
    m = WarpedModel::euclidean();
  } else if (kind == "cone") {
    want(1);
    m = WarpedModel::cone(args[0]);
  } else if (kind == "tanh") {
    want(2);
    m = WarpedModel::tanh_warp(args[0], args[1]);
  } else if (kind == "bump") {
    want(1);
    m = WarpedModel::log_bump(args[0]);
  } else if (kind == "poly") {
    if (args.empty()) throw std::invalid_argument("model preset '" + preset + "': no coefficients");
    m = WarpedModel::polynomial(args);
  } else {
    throw std::invalid_argument("unknown model preset '" + preset + "'");
  }
  m.validate();
  return m;
}

}  // namespace conelab::runner
