#pragma once

// Minimal SVG line charts for trajectory records.

#include "pinnet/output.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace pinnet {

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  bool dashed = false;
};

struct LineChart {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_y = false;
  std::vector<PlotSeries> series;

  std::string to_svg(int width = 800, int height = 480) const;
};

/// states.svg (controlled vs reference traces), errors.svg (per-node error
/// norms, log scale) and inputs.svg. Refuses empty records.
std::vector<std::filesystem::path> emit_plots(const TrajectoryRecord& record,
                                              const RunSummary& summary,
                                              const std::filesystem::path& directory);

}  // namespace pinnet
