#pragma once

#include <string>
#include <vector>

namespace conelab::runner {

struct Series {
  std::string name;
  std::vector<double> x, y;
};

struct PlotSpec {
  std::string title, xlabel, ylabel;
  bool logx = false, logy = false;
};

// Polyline chart with axes, ticks at the data range ends and a legend.
// Non-finite points (and nonpositive ones on log axes) are skipped.
std::string line_plot(const PlotSpec& spec, const std::vector<Series>& series);

}  // namespace conelab::runner
