#include "pinnet/output.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace pinnet {

namespace fs = std::filesystem;

void write_file_atomic(const fs::path& destination, const std::string& content) {
  if (destination.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(destination.parent_path(), ec);
    if (ec) throw OutputError("cannot create " + destination.parent_path().string() + ": " + ec.message());
  }
  fs::path tmp = destination;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw OutputError("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw OutputError("write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, destination, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw OutputError("cannot move output into " + destination.string());
  }
}

std::vector<std::string> timeseries_header(std::size_t nodes, Eigen::Index p) {
  std::vector<std::string> h{"t"};
  for (std::size_t i = 1; i <= nodes; ++i) {
    for (Eigen::Index k = 1; k <= p; ++k) {
      h.push_back("x[" + std::to_string(i) + "][" + std::to_string(k) + "]");
    }
  }
  for (Eigen::Index k = 1; k <= p; ++k) h.push_back("xr[" + std::to_string(k) + "]");
  for (std::size_t i = 1; i <= nodes; ++i) {
    for (Eigen::Index k = 1; k <= p; ++k) {
      h.push_back("u[" + std::to_string(i) + "][" + std::to_string(k) + "]");
    }
  }
  for (std::size_t i = 1; i <= nodes; ++i) h.push_back("enorm[" + std::to_string(i) + "]");
  for (const char* name : {"V", "v1", "v2", "v3"}) h.emplace_back(name);
  return h;
}

void write_timeseries(const TrajectoryRecord& rec, const fs::path& destination) {
  std::ostringstream os;
  os << std::setprecision(17);
  const auto header = timeseries_header(rec.nodes, rec.state_dim);
  for (std::size_t c = 0; c < header.size(); ++c) os << (c ? "," : "") << header[c];
  os << "\n";
  for (std::size_t k = 0; k < rec.size(); ++k) {
    os << rec.times[k];
    const Matrix& x = rec.states[k];
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      for (Eigen::Index j = 0; j < x.cols(); ++j) os << "," << x(i, j);
    }
    for (Eigen::Index j = 0; j < rec.reference[k].size(); ++j) os << "," << rec.reference[k](j);
    const Matrix& u = rec.inputs[k];
    for (Eigen::Index i = 0; i < u.rows(); ++i) {
      for (Eigen::Index j = 0; j < u.cols(); ++j) os << "," << u(i, j);
    }
    for (Eigen::Index i = 0; i < rec.error_norms[k].size(); ++i) os << "," << rec.error_norms[k](i);
    os << "," << rec.V[k] << "," << rec.v1[k] << "," << rec.v2[k] << "," << rec.v3[k] << "\n";
  }
  write_file_atomic(destination, os.str());
}

std::vector<double> TimeseriesTable::column(const std::string& name) const {
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] == name) {
      std::vector<double> out;
      out.reserve(rows.size());
      for (const auto& row : rows) out.push_back(row[c]);
      return out;
    }
  }
  throw OutputError("no column named '" + name + "'");
}

TimeseriesTable read_timeseries(const fs::path& source) {
  std::ifstream in(source);
  if (!in) throw OutputError("cannot open " + source.string());
  TimeseriesTable table;
  std::string line;
  if (!std::getline(in, line)) throw OutputError(source.string() + " is empty");
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) table.header.push_back(cell);
  }
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<double> row;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      const std::string cell = line.substr(start, comma == std::string::npos ? comma : comma - start);
      if (cell.empty()) {
        row.push_back(std::numeric_limits<double>::quiet_NaN());
      } else {
        try {
          std::size_t used = 0;
          row.push_back(std::stod(cell, &used));
          if (used != cell.size()) throw std::invalid_argument(cell);
        } catch (const std::exception&) {
          throw OutputError(source.string() + ":" + std::to_string(line_no) + ": bad number '" + cell + "'");
        }
      }
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (row.size() != table.header.size()) {
      throw OutputError(source.string() + ":" + std::to_string(line_no) + ": wrong column count");
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

RunSummary summarize(const std::string& scenario_name, std::uint64_t seed,
                     const TrajectoryRecord& rec, const Certificate& certificate,
                     const BoundReport& bounds) {
  if (rec.empty()) throw OutputError("cannot summarize an empty trajectory");
  RunSummary s;
  s.scenario = scenario_name;
  s.seed = seed;
  s.certificate = certificate;
  s.initial_error_norm = rec.total_error_norm(0);
  s.final_error_norm = rec.total_error_norm(rec.size() - 1);
  const double threshold = 0.05 * s.initial_error_norm;
  for (std::size_t k = 0; k < rec.size(); ++k) {
    if (rec.total_error_norm(k) <= threshold) {
      s.time_to_threshold = rec.times[k];
      break;
    }
  }
  for (std::size_t k = 1; k < rec.size(); ++k) {
    const double dt = rec.times[k] - rec.times[k - 1];
    s.control_energy += 0.5 * dt * (rec.inputs[k - 1].squaredNorm() + rec.inputs[k].squaredNorm());
  }
  s.bound_violations = bounds.total_violations();
  if (rec.kind == "kuramoto") s.final_order_parameter = order_parameter(Vector(rec.states.back().col(0)));
  return s;
}

namespace {

nlohmann::json estimate_json(const AssumptionEstimate& e) {
  nlohmann::json j{{"value", e.value}, {"raw", e.raw}, {"source", to_string(e.source)},
                   {"sample_count", e.sample_count}};
  if (e.region) {
    j["region"] = {{"low", std::vector<double>(e.region->low.begin(), e.region->low.end())},
                   {"high", std::vector<double>(e.region->high.begin(), e.region->high.end())}};
  }
  return j;
}

}  // namespace

std::string summary_to_json(const RunSummary& s) {
  const Certificate& c = s.certificate;
  nlohmann::json cert{{"theta_f", estimate_json(c.theta_f_estimate)},
                      {"theta_h", estimate_json(c.theta_h_estimate)},
                      {"c", c.coupling},
                      {"norm_L_kron", c.norm_L_kron},
                      {"gain", c.gain},
                      {"pin_mask", c.pin_mask},
                      {"lambda_max", c.lambda_max},
                      {"verdict", c.certified ? "certified" : "not certified"}};
  cert["min_certified_gain"] = c.min_gain ? nlohmann::json(*c.min_gain) : nlohmann::json(nullptr);
  nlohmann::json j{{"scenario", s.scenario},
                   {"seed", s.seed},
                   {"certificate", cert},
                   {"initial_error_norm", s.initial_error_norm},
                   {"final_error_norm", s.final_error_norm},
                   {"control_energy", s.control_energy},
                   {"bound_violations", s.bound_violations}};
  j["time_to_threshold"] =
      s.time_to_threshold ? nlohmann::json(*s.time_to_threshold) : nlohmann::json(nullptr);
  if (s.final_order_parameter) j["final_order_parameter"] = *s.final_order_parameter;
  return j.dump(2) + "\n";
}

void write_summary(const RunSummary& summary, const fs::path& destination) {
  write_file_atomic(destination, summary_to_json(summary));
}

}  // namespace pinnet
