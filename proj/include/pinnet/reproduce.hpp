#pragma once

// Convergence checks for the two bundled experiments: the Kuramoto network
// driven onto a uniformly rotating reference, and seizure suppression in a
// pair of Jansen-Rit columns.

#include "pinnet/scenario.hpp"
#include "pinnet/simulate.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace pinnet {

struct CriterionResult {
  std::string id;
  std::string description;
  bool passed = false;
  std::string detail;
};

struct ReproductionReport {
  std::string scenario;
  std::vector<CriterionResult> criteria;
  /// Extra measurements that are reported but not asserted.
  std::vector<std::string> notes;

  bool passed() const;
};

struct KuramotoThresholds {
  double final_error_ratio = 0.10;   // |e_i(t_end)| <= ratio * |e_i(0)|
  double window_fraction = 0.20;     // first/last window length, fraction of t_end
  double window_improvement = 5.0;   // mean(first) >= factor * mean(last)
  double max_runtime_s = 5.0;
};

struct JansenRitThresholds {
  double transient_s = 0.5;
  double uphill_relative = 1e-6;
  double final_to_peak_V = 0.01;
  double oscillation_factor = 5.0;
  double window_s = 1.0;
  double max_runtime_s = 30.0;
};

ReproductionReport reproduce_kuramoto(const Scenario& scenario, const KuramotoThresholds& th = {});
ReproductionReport reproduce_jansen_rit(const Scenario& scenario, const JansenRitThresholds& th = {});

/// Peak-to-peak of y1 - y2 of `node` over samples with t >= t_from.
double pyramidal_peak_to_peak(const TrajectoryRecord& record, std::size_t node, double t_from);

/// Directory holding the bundled scenario files (env PINNET_SCENARIO_DIR wins).
std::filesystem::path default_scenario_dir();

}  // namespace pinnet
