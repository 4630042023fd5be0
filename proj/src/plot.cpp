#include "pinnet/plot.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

namespace pinnet {

namespace {

constexpr std::array<const char*, 10> kPalette = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                                  "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
                                                  "#bcbd22", "#17becf"};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string tick_label(double v) {
  std::ostringstream os;
  os << std::setprecision(3) << v;
  return os.str();
}

}  // namespace

std::string LineChart::to_svg(int width, int height) const {
  const double left = 80, right = 160, top = 40, bottom = 60;
  const double pw = width - left - right;
  const double ph = height - top - bottom;

  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  auto ty = [this](double y) { return log_y ? std::log10(y) : y; };
  for (const auto& s : series) {
    for (std::size_t k = 0; k < s.x.size(); ++k) {
      if (log_y && !(s.y[k] > 0.0)) continue;
      xmin = std::min(xmin, s.x[k]);
      xmax = std::max(xmax, s.x[k]);
      ymin = std::min(ymin, ty(s.y[k]));
      ymax = std::max(ymax, ty(s.y[k]));
    }
  }
  if (!std::isfinite(xmin)) xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  if (xmax == xmin) xmax = xmin + 1;
  if (ymax == ymin) ymin -= 0.5, ymax += 0.5;
  auto px = [&](double x) { return left + (x - xmin) / (xmax - xmin) * pw; };
  auto py = [&](double y) { return top + ph - (ty(y) - ymin) / (ymax - ymin) * ph; };

  std::ostringstream os;
  os << std::setprecision(6);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
     << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << left + pw / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">"
     << escape(title) << "</text>\n";
  os << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
     << "\" fill=\"none\" stroke=\"black\"/>\n";

  for (int i = 0; i <= 5; ++i) {
    const double fx = xmin + (xmax - xmin) * i / 5.0;
    const double fy = ymin + (ymax - ymin) * i / 5.0;
    const double X = left + pw * i / 5.0;
    const double Y = top + ph - ph * i / 5.0;
    os << "<line x1=\"" << X << "\" y1=\"" << top + ph << "\" x2=\"" << X << "\" y2=\""
       << top + ph + 5 << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << X << "\" y=\"" << top + ph + 18 << "\" text-anchor=\"middle\">"
       << tick_label(fx) << "</text>\n";
    os << "<line x1=\"" << left - 5 << "\" y1=\"" << Y << "\" x2=\"" << left << "\" y2=\"" << Y
       << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << left - 8 << "\" y=\"" << Y + 4 << "\" text-anchor=\"end\">"
       << (log_y ? "1e" + tick_label(fy) : tick_label(fy)) << "</text>\n";
  }
  os << "<text x=\"" << left + pw / 2 << "\" y=\"" << height - 15 << "\" text-anchor=\"middle\">"
     << escape(x_label) << "</text>\n";
  os << "<text transform=\"translate(18," << top + ph / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
     << escape(y_label) << "</text>\n";

  for (std::size_t s = 0; s < series.size(); ++s) {
    const auto& ser = series[s];
    const char* color = kPalette[s % kPalette.size()];
    os << "<polyline fill=\"none\" stroke=\"" << (ser.dashed ? "black" : color)
       << "\" stroke-width=\"1.2\"" << (ser.dashed ? " stroke-dasharray=\"6,4\"" : "")
       << " points=\"";
    for (std::size_t k = 0; k < ser.x.size(); ++k) {
      if (log_y && !(ser.y[k] > 0.0)) continue;
      os << px(ser.x[k]) << "," << py(ser.y[k]) << " ";
    }
    os << "\"/>\n";
    const double ly = top + 12 + 16.0 * static_cast<double>(s);
    os << "<line x1=\"" << left + pw + 10 << "\" y1=\"" << ly - 4 << "\" x2=\"" << left + pw + 30
       << "\" y2=\"" << ly - 4 << "\" stroke=\"" << (ser.dashed ? "black" : color) << "\""
       << (ser.dashed ? " stroke-dasharray=\"6,4\"" : "") << "/>\n";
    os << "<text x=\"" << left + pw + 35 << "\" y=\"" << ly << "\">" << escape(ser.label)
       << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::vector<std::filesystem::path> emit_plots(const TrajectoryRecord& rec, const RunSummary& summary,
                                              const std::filesystem::path& directory) {
  if (rec.empty()) throw OutputError("refusing to plot an empty trajectory record");

  // Jansen-Rit columns are shown by their pyramidal potential y1 - y2; other
  // models by their first state component.
  const bool jansen_rit = rec.kind == "jansen_rit";
  auto observable = [jansen_rit](const auto& row) {
    return jansen_rit ? row(1) - row(2) : row(0);
  };
  const std::string unit = jansen_rit ? "y1 - y2 (mV)" : "x[i][1] (state units)";

  LineChart states{summary.scenario + ": controlled vs reference", "time (s)", unit, false, {}};
  LineChart errors{summary.scenario + ": tracking error", "time (s)", "|e_i| (state units, log)",
                   true, {}};
  LineChart inputs{summary.scenario + ": control input", "time (s)",
                   jansen_rit ? "u[i][5] (mV/s^2)" : "u[i][1] (state units/s)", false, {}};

  for (std::size_t i = 0; i < rec.nodes; ++i) {
    PlotSeries xs{"node " + std::to_string(i + 1), rec.times, {}, false};
    PlotSeries es{"node " + std::to_string(i + 1), rec.times, {}, false};
    PlotSeries us{"node " + std::to_string(i + 1), rec.times, {}, false};
    for (std::size_t k = 0; k < rec.size(); ++k) {
      const auto row = rec.states[k].row(static_cast<Eigen::Index>(i));
      xs.y.push_back(observable(row));
      es.y.push_back(rec.error_norms[k](static_cast<Eigen::Index>(i)));
      us.y.push_back(rec.inputs[k](static_cast<Eigen::Index>(i), jansen_rit ? 4 : 0));
    }
    states.series.push_back(std::move(xs));
    errors.series.push_back(std::move(es));
    inputs.series.push_back(std::move(us));
  }
  PlotSeries ref{"reference", rec.times, {}, true};
  for (const auto& xr : rec.reference) ref.y.push_back(observable(xr));
  states.series.push_back(std::move(ref));

  std::vector<std::filesystem::path> written;
  const std::pair<const char*, const LineChart*> charts[] = {
      {"states.svg", &states}, {"errors.svg", &errors}, {"inputs.svg", &inputs}};
  for (const auto& [file, chart] : charts) {
    const auto path = directory / file;
    write_file_atomic(path, chart->to_svg());
    written.push_back(path);
  }
  return written;
}

}  // namespace pinnet
