#include "pinnet/reproduce.hpp"

#include "pinnet/certify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <iomanip>
#include <limits>
#include <numbers>
#include <sstream>

namespace pinnet {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(4) << v;
  return os.str();
}

double window_mean(const TrajectoryRecord& rec, double t_lo, double t_hi) {
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t k = 0; k < rec.size(); ++k) {
    if (rec.times[k] >= t_lo && rec.times[k] <= t_hi) {
      sum += rec.total_error_norm(k);
      ++count;
    }
  }
  return count ? sum / static_cast<double>(count) : std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

bool ReproductionReport::passed() const {
  return std::all_of(criteria.begin(), criteria.end(), [](const auto& c) { return c.passed; });
}

double pyramidal_peak_to_peak(const TrajectoryRecord& rec, std::size_t node, double t_from) {
  if (rec.kind != "jansen_rit") throw ArgumentError("pyramidal potential needs Jansen-Rit states");
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t k = 0; k < rec.size(); ++k) {
    if (rec.times[k] < t_from) continue;
    const auto i = static_cast<Eigen::Index>(node);
    const double v = rec.states[k](i, 1) - rec.states[k](i, 2);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return hi >= lo ? hi - lo : 0.0;
}

ReproductionReport reproduce_kuramoto(const Scenario& scenario, const KuramotoThresholds& th) {
  if (kind_of(scenario.reference) != "kuramoto") {
    throw ArgumentError("reproduce_kuramoto needs a Kuramoto scenario");
  }
  ReproductionReport report;
  report.scenario = scenario.name;

  const auto start = Clock::now();
  const TrajectoryRecord rec = simulate(scenario);
  const double runtime = seconds_since(start);
  const double t_end = rec.times.back();

  {
    double worst = 0.0;
    std::size_t worst_node = 0;
    for (std::size_t i = 0; i < rec.nodes; ++i) {
      const auto idx = static_cast<Eigen::Index>(i);
      const double e0 = rec.error_norms.front()(idx);
      const double e1 = rec.error_norms.back()(idx);
      const double ratio = e0 > 0.0 ? e1 / e0 : (e1 > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
      if (ratio >= worst) {
        worst = ratio;
        worst_node = i;
      }
    }
    report.criteria.push_back({"kuramoto.final_error",
                               "every node: |e_i(t_end)| <= " + fmt(th.final_error_ratio) + " |e_i(0)|",
                               worst <= th.final_error_ratio,
                               "worst ratio " + fmt(worst) + " at node " + std::to_string(worst_node + 1)});
  }
  {
    const double first = window_mean(rec, 0.0, th.window_fraction * t_end);
    const double last = window_mean(rec, (1.0 - th.window_fraction) * t_end, t_end);
    report.criteria.push_back(
        {"kuramoto.window_decay",
         "mean |e| over the first " + fmt(100 * th.window_fraction) + "% >= " +
             fmt(th.window_improvement) + " x mean over the last " + fmt(100 * th.window_fraction) + "%",
         first >= th.window_improvement * last,
         "first " + fmt(first) + ", last " + fmt(last) + ", factor " + fmt(first / last)});
  }
  report.criteria.push_back({"kuramoto.runtime", "simulation runtime < " + fmt(th.max_runtime_s) + " s",
                             runtime < th.max_runtime_s, fmt(runtime) + " s"});

  // Not asserted: frequency locking and the steady phase lag the linear
  // feedback leaves behind when natural frequencies differ from the reference.
  {
    const double omega_r = std::get<KuramotoParams>(scenario.reference).omega;
    const double t_lo = (1.0 - th.window_fraction) * t_end;
    std::size_t k0 = 0;
    while (k0 + 1 < rec.size() && rec.times[k0] < t_lo) ++k0;
    const std::size_t k1 = rec.size() - 1;
    double worst_freq = 0.0;
    double mean_offset = 0.0;
    double omega_excess = 0.0;
    for (std::size_t i = 0; i < rec.nodes; ++i) {
      const auto idx = static_cast<Eigen::Index>(i);
      if (k1 > k0) {
        const double freq = (rec.states[k1](idx, 0) - rec.states[k0](idx, 0)) / (rec.times[k1] - rec.times[k0]);
        worst_freq = std::max(worst_freq, std::abs(freq - omega_r));
      }
      mean_offset += rec.states[k1](idx, 0) - rec.reference[k1](0);
      omega_excess += std::get<KuramotoParams>(scenario.nodes[i]).omega - omega_r;
    }
    mean_offset /= static_cast<double>(rec.nodes);
    std::ostringstream os;
    os << "frequency locking: max |<dtheta_i/dt> - omega_r| over the last window = " << fmt(worst_freq)
       << " rad/s";
    report.notes.push_back(os.str());
    if (scenario.gain > 0.0 &&
        std::all_of(scenario.pinned.begin(), scenario.pinned.end(), [](bool w) { return w; })) {
      std::ostringstream off;
      off << "mean steady phase lag: observed " << fmt(mean_offset) << " rad, predicted sum(omega_i - omega_r)/(n gain) = "
          << fmt(omega_excess / (static_cast<double>(rec.nodes) * scenario.gain)) << " rad";
      report.notes.push_back(off.str());
    }
    report.notes.push_back("final order parameter r = " +
                           fmt(order_parameter(Vector(rec.states.back().col(0)))));
  }
  return report;
}

ReproductionReport reproduce_jansen_rit(const Scenario& scenario, const JansenRitThresholds& th) {
  if (kind_of(scenario.reference) != "jansen_rit") {
    throw ArgumentError("reproduce_jansen_rit needs a Jansen-Rit scenario");
  }
  ReproductionReport report;
  report.scenario = scenario.name;

  std::size_t focus = 0;
  for (std::size_t i = 1; i < scenario.size(); ++i) {
    if (std::get<JansenRitParams>(scenario.nodes[i]).A > std::get<JansenRitParams>(scenario.nodes[focus]).A) {
      focus = i;
    }
  }

  Scenario open_loop = scenario;
  open_loop.gain = 0.0;

  const auto start = Clock::now();
  const TrajectoryRecord controlled = simulate(scenario);
  const TrajectoryRecord uncontrolled = simulate(open_loop);
  const double runtime = seconds_since(start);
  const double t_end = controlled.times.back();

  {
    std::size_t uphill = 0;
    double worst = 0.0;
    double worst_t = 0.0;
    for (std::size_t k = 1; k < controlled.size(); ++k) {
      if (controlled.times[k - 1] < th.transient_s) continue;
      const double prev = controlled.total_error_norm(k - 1);
      const double cur = controlled.total_error_norm(k);
      const double rel = prev > 0.0 ? (cur - prev) / prev : (cur > 0.0 ? 1.0 : 0.0);
      if (rel > worst) {
        worst = rel;
        worst_t = controlled.times[k];
      }
      if (rel > th.uphill_relative) ++uphill;
    }
    report.criteria.push_back(
        {"jansen_rit.monotone_error",
         "|e| non-increasing after " + fmt(th.transient_s) + " s (uphill <= " + fmt(th.uphill_relative) +
             " relative per sample)",
         uphill == 0,
         std::to_string(uphill) + " uphill samples, worst relative rise " + fmt(worst) + " at t = " +
             fmt(worst_t)});
  }
  {
    const double peak = *std::max_element(controlled.V.begin(), controlled.V.end());
    const double final_v = controlled.V.back();
    report.criteria.push_back({"jansen_rit.final_V",
                               "final V < " + fmt(th.final_to_peak_V) + " x peak V",
                               final_v < th.final_to_peak_V * peak,
                               "final " + fmt(final_v) + ", peak " + fmt(peak) + ", ratio " +
                                   fmt(final_v / peak)});
  }
  {
    const double from = t_end - th.window_s;
    const double pp_open = pyramidal_peak_to_peak(uncontrolled, focus, from);
    const double pp_closed = pyramidal_peak_to_peak(controlled, focus, from);
    report.criteria.push_back(
        {"jansen_rit.suppression",
         "uncontrolled peak-to-peak of node " + std::to_string(focus + 1) + " > " +
             fmt(th.oscillation_factor) + " x controlled, final " + fmt(th.window_s) + " s",
         pp_open > th.oscillation_factor * pp_closed,
         "uncontrolled " + fmt(pp_open) + " mV, controlled " + fmt(pp_closed) + " mV"});
  }
  report.criteria.push_back({"jansen_rit.runtime",
                             "controlled + uncontrolled runtime < " + fmt(th.max_runtime_s) + " s",
                             runtime < th.max_runtime_s, fmt(runtime) + " s"});

  report.notes.push_back("final total error norm " + fmt(controlled.total_error_norm(controlled.size() - 1)));
  return report;
}

std::filesystem::path default_scenario_dir() {
  if (const char* env = std::getenv("PINNET_SCENARIO_DIR"); env && *env) return env;
  return PINNET_DEFAULT_SCENARIO_DIR;
}

}  // namespace pinnet
