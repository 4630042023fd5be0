#pragma once

#include "pinnet/certify.hpp"
#include "pinnet/diagnostics.hpp"
#include "pinnet/simulate.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace pinnet {

class OutputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Column names: t, x[i][k], xr[k], u[i][k], enorm[i], V, v1, v2, v3 (1-based).
std::vector<std::string> timeseries_header(std::size_t nodes, Eigen::Index state_dim);

/// Comma-separated values, one header row, 17 significant digits. Written to
/// a temporary file and renamed into place.
void write_timeseries(const TrajectoryRecord& record, const std::filesystem::path& destination);

struct TimeseriesTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  std::vector<double> column(const std::string& name) const;
};

/// Reads any numeric CSV with a header row; empty cells become NaN.
TimeseriesTable read_timeseries(const std::filesystem::path& source);

struct RunSummary {
  std::string scenario;
  std::uint64_t seed = 0;
  Certificate certificate;
  double initial_error_norm = 0.0;
  double final_error_norm = 0.0;
  /// First time with |e| <= 5% of |e(0)|.
  std::optional<double> time_to_threshold;
  /// Trapezoidal integral of |u|^2 over the recorded samples.
  double control_energy = 0.0;
  std::size_t bound_violations = 0;
  std::optional<double> final_order_parameter;
};

RunSummary summarize(const std::string& scenario_name, std::uint64_t seed,
                     const TrajectoryRecord& record, const Certificate& certificate,
                     const BoundReport& bounds);

std::string summary_to_json(const RunSummary& summary);
void write_summary(const RunSummary& summary, const std::filesystem::path& destination);

/// Writes `content` next to `destination` and renames it into place.
void write_file_atomic(const std::filesystem::path& destination, const std::string& content);

}  // namespace pinnet
