#include "pinnet/cli.hpp"

#include "pinnet/certify.hpp"
#include "pinnet/diagnostics.hpp"
#include "pinnet/output.hpp"
#include "pinnet/plot.hpp"
#include "pinnet/reproduce.hpp"
#include "pinnet/scenario_io.hpp"
#include "pinnet/simulate.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

namespace pinnet {

namespace fs = std::filesystem;

namespace {

struct Overrides {
  std::optional<double> dt;
  std::optional<double> t_end;
  std::optional<double> gain;
  std::optional<std::uint64_t> seed;
  std::string out;

  void apply(Scenario& s) const {
    if (dt) s.integration.dt = *dt;
    if (t_end) s.integration.t_end = *t_end;
    if (gain) s.gain = *gain;
    if (seed) s.seed = *seed;
    s.validate();
  }
};

void add_overrides(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--dt", o.dt, "Integration step (s)")->check(CLI::PositiveNumber);
  cmd->add_option("--t-end", o.t_end, "Integration horizon (s)")->check(CLI::PositiveNumber);
  cmd->add_option("--gain", o.gain, "Controller gain")->check(CLI::NonNegativeNumber);
  cmd->add_option("--seed", o.seed, "Seed for sampling and random initial states");
  cmd->add_option("--out", o.out, "Output directory (default $PINNET_OUT_DIR or ./pinnet_out)");
}

fs::path output_dir(const Overrides& o) {
  if (!o.out.empty()) return o.out;
  if (const char* env = std::getenv("PINNET_OUT_DIR"); env && *env) return env;
  return "pinnet_out";
}

Scenario load(const std::string& path, const Overrides& o) {
  Scenario s = load_scenario(path, o.seed);
  o.apply(s);
  return s;
}

int run_simulate(const std::string& path, const Overrides& o, bool plots, std::ostream& out) {
  const Scenario scenario = load(path, o);
  const fs::path dir = output_dir(o) / scenario.name;
  write_file_atomic(dir / "scenario.yaml", normalize_scenario(scenario));

  TrajectoryRecord record;
  try {
    record = simulate(scenario);
  } catch (const SimulationFault& fault) {
    write_timeseries(fault.partial(), dir / "timeseries.partial.csv");
    throw;
  }
  write_timeseries(record, dir / "timeseries.csv");

  const Certificate cert = certify_scenario(scenario);
  const BoundReport bounds = check_proof_bounds(record, cert);
  const RunSummary summary = summarize(scenario.name, scenario.seed, record, cert, bounds);
  write_summary(summary, dir / "summary.json");
  if (plots) emit_plots(record, summary, dir);

  out << describe(cert);
  out << "initial |e| = " << summary.initial_error_norm << ", final |e| = " << summary.final_error_norm
      << "\n";
  out << "bound violations: " << summary.bound_violations << "\n";
  out << "wrote " << dir.string() << "\n";
  return kExitOk;
}

int run_certify(const std::string& path, const Overrides& o, std::ostream& out) {
  const Scenario scenario = load(path, o);
  Certificate cert;
  try {
    cert = certify_scenario(scenario);
  } catch (const EstimationError& e) {
    out << "assumption estimation failed: " << e.what() << "\n";
    return kExitEstimationFailed;
  }
  out << "scenario: " << scenario.name << "\n" << describe(cert);
  return cert.certified ? kExitOk : kExitNotCertified;
}

std::vector<double> sweep_gains(const std::vector<double>& listed, double lo, double hi, std::size_t steps) {
  if (!listed.empty()) return listed;
  std::vector<double> gains;
  if (steps <= 1) return {lo};
  for (std::size_t k = 0; k < steps; ++k) {
    gains.push_back(lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(steps - 1));
  }
  return gains;
}

int run_sweep(const std::string& path, const Overrides& o, const std::vector<double>& gains,
              std::size_t jobs, std::ostream& out) {
  const Scenario scenario = load(path, o);
  const Certificate base = certify_scenario(scenario);
  const fs::path dir = output_dir(o);
  fs::create_directories(dir);
  const fs::path file = dir / (scenario.name + "_sweep.csv");

  const bool fresh = !fs::exists(file) || fs::file_size(file) == 0;
  std::ofstream sink(file, std::ios::app);
  if (!sink) throw OutputError("cannot append to " + file.string());
  const std::string header =
      "gain,lambda_max,certified,initial_error_norm,final_error_norm,time_to_threshold,control_energy,"
      "bound_violations,fault";
  if (fresh) sink << header << "\n" << std::flush;
  out << header << "\n";

  std::mutex io;
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  auto worker = [&] {
    for (std::size_t idx = next++; idx < gains.size(); idx = next++) {
      Scenario run = scenario;
      run.gain = gains[idx];
      const Certificate cert = base.with_gain(run.gain);
      std::ostringstream row;
      row << std::setprecision(17) << run.gain << "," << cert.lambda_max << ","
          << (cert.certified ? 1 : 0) << ",";
      try {
        const TrajectoryRecord rec = simulate(run);
        const BoundReport bounds = check_proof_bounds(rec, cert);
        const RunSummary s = summarize(run.name, run.seed, rec, cert, bounds);
        row << s.initial_error_norm << "," << s.final_error_norm << ",";
        if (s.time_to_threshold) row << *s.time_to_threshold;
        row << "," << s.control_energy << "," << s.bound_violations << ",0";
      } catch (const IntegrationFault& fault) {
        row << ",,,,,1";
        failed = true;
      }
      std::lock_guard lock(io);
      sink << row.str() << "\n" << std::flush;
      out << row.str() << "\n";
    }
  };
  const std::size_t workers = std::max<std::size_t>(1, std::min(jobs, gains.size()));
  std::vector<std::jthread> pool;
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  pool.clear();
  out << "appended " << gains.size() << " rows to " << file.string() << "\n";
  return failed ? kExitRuntimeFault : kExitOk;
}

void print_report(const ReproductionReport& report, std::ostream& out) {
  out << "== " << report.scenario << "\n";
  for (const auto& c : report.criteria) {
    out << (c.passed ? "[PASS] " : "[FAIL] ") << c.id << ": " << c.description << " (" << c.detail
        << ")\n";
  }
  for (const auto& note : report.notes) out << "  info: " << note << "\n";
}

int run_reproduce(const std::string& scenario_dir, std::ostream& out) {
  const fs::path dir = scenario_dir.empty() ? default_scenario_dir() : fs::path(scenario_dir);
  const auto kuramoto = reproduce_kuramoto(load_scenario(dir / "kuramoto_paper.yaml"));
  print_report(kuramoto, out);
  const auto jansen_rit = reproduce_jansen_rit(load_scenario(dir / "jansen_rit_paper.yaml"));
  print_report(jansen_rit, out);
  const bool ok = kuramoto.passed() && jansen_rit.passed();
  out << (ok ? "all reproduction checks passed" : "some reproduction checks failed") << "\n";
  return ok ? kExitOk : kExitNotCertified;
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Pinning control of network-coupled dynamical systems", "pinnet"};
  app.require_subcommand(1);

  Overrides sim_o, cert_o, sweep_o;
  std::string sim_path, cert_path, sweep_path, scenario_dir;
  bool no_plots = false;
  std::vector<double> gains;
  double gain_min = 0.0, gain_max = 0.0;
  std::size_t gain_steps = 0;
  std::size_t jobs = std::max(1u, std::thread::hardware_concurrency());

  auto* sim = app.add_subcommand("simulate", "Run a scenario and write CSV, summary and plots");
  sim->add_option("scenario", sim_path, "Scenario file")->required();
  sim->add_flag("--no-plots", no_plots, "Skip SVG plots");
  add_overrides(sim, sim_o);

  auto* cert = app.add_subcommand("certify", "Evaluate the stability certificate (exit 0 certified, 1 not, 2 estimation failure)");
  cert->add_option("scenario", cert_path, "Scenario file")->required();
  add_overrides(cert, cert_o);

  auto* sweep = app.add_subcommand("sweep", "Run a scenario over a grid of gains");
  sweep->add_option("scenario", sweep_path, "Scenario file")->required();
  sweep->add_option("--gains", gains, "Explicit gain list")->delimiter(',');
  sweep->add_option("--gain-min", gain_min, "Grid start")->check(CLI::NonNegativeNumber);
  sweep->add_option("--gain-max", gain_max, "Grid end")->check(CLI::NonNegativeNumber);
  sweep->add_option("--gain-steps", gain_steps, "Grid points");
  sweep->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
  add_overrides(sweep, sweep_o);

  auto* repro = app.add_subcommand("reproduce", "Run the bundled Kuramoto and Jansen-Rit experiments");
  repro->add_option("--scenario-dir", scenario_dir, "Directory with the bundled scenario files");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return kExitUsage;
  }

  try {
    if (sim->parsed()) return run_simulate(sim_path, sim_o, !no_plots, out);
    if (cert->parsed()) return run_certify(cert_path, cert_o, out);
    if (sweep->parsed()) {
      const auto grid = sweep_gains(gains, gain_min, gain_max, gain_steps);
      if (gains.empty() && gain_steps == 0) {
        err << "error: sweep needs --gains or --gain-min/--gain-max/--gain-steps\n" << sweep->help();
        return kExitUsage;
      }
      return run_sweep(sweep_path, sweep_o, grid, jobs, out);
    }
    if (repro->parsed()) return run_reproduce(scenario_dir, out);
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const IntegrationFault& e) {
    err << "runtime fault: " << e.what() << "\n";
    return kExitRuntimeFault;
  } catch (const std::exception& e) {
    err << "runtime fault: " << e.what() << "\n";
    return kExitRuntimeFault;
  }
  return kExitUsage;
}

int cli_main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return cli_main(args, std::cout, std::cerr);
}

}  // namespace pinnet
