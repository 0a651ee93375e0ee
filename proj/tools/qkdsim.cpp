// Command-line front end: analytic link budgets, Monte Carlo runs, parameter
// sweeps, detector response curves and arrival-time histograms, all emitted
// as CSV (or aligned text) from `section.key = value` scenario configs.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "qkd/commands.hpp"

namespace {

// CLI11 parses into doubles for count-like flags so `--pulses 1e7` works.
std::optional<std::uint64_t> as_count(double v) {
  if (v < 0.0) return std::nullopt;
  return static_cast<std::uint64_t>(v);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Phase-encoding QKD link simulator and rate calculator"};
  app.require_subcommand(1);

  qkd::AnalyzeArgs analyze;
  auto* cmd_an = app.add_subcommand(
      "analyze", "Analytic link budget per scenario (rates, QBER, secure rate)");
  cmd_an->add_option("--config", analyze.config_path, "Scenario config file")
      ->required();
  cmd_an->add_option("--format", analyze.format, "Output format: csv or text")
      ->check(CLI::IsMember({"csv", "text"}));
  cmd_an->add_option("--out", analyze.out_path, "Output file (default stdout)");

  qkd::SimulateArgs simulate;
  double sim_pulses = -1.0, sim_seed = -1.0;
  auto* cmd_sim = app.add_subcommand(
      "simulate", "Monte Carlo run per scenario, summary CSV");
  cmd_sim->add_option("--config", simulate.config_path, "Scenario config file")
      ->required();
  cmd_sim->add_option("--pulses", sim_pulses, "Override run.pulses");
  cmd_sim->add_option("--seed", sim_seed, "Override run.seed");
  cmd_sim->add_option("--workers", simulate.workers,
                      "Worker threads (results are identical for any count)");
  cmd_sim->add_option("--out", simulate.out_path, "Output file (default stdout)");
  cmd_sim->add_option("--events-out", simulate.events_path,
                      "Also write the per-event stream to this CSV file");

  qkd::SweepArgs sweep;
  auto* cmd_sw = app.add_subcommand(
      "sweep", "Distance sweep of the modelled secure rate, both protocols");
  cmd_sw->add_option("--km-from", sweep.km_from, "Start distance [km]");
  cmd_sw->add_option("--km-to", sweep.km_to, "End distance [km]");
  cmd_sw->add_option("--step", sweep.step_km, "Step [km]");
  cmd_sw->add_option("--config", sweep.config_path,
                     "Optional config; its first scenario seeds the model");
  cmd_sw->add_option("--out", sweep.out_path, "Output file (default stdout)");

  qkd::CurveArgs curve;
  auto* cmd_cv = app.add_subcommand(
      "detector-curve", "Detector efficiency and noise vs pump power");
  cmd_cv->add_option("--pump-from", curve.pump_from_w, "Start pump power [W]");
  cmd_cv->add_option("--pump-to", curve.pump_to_w, "End pump power [W]");
  cmd_cv->add_option("--points", curve.points, "Number of rows");
  cmd_cv->add_option("--config", curve.config_path,
                     "Optional config; its first scenario's detector is used");
  cmd_cv->add_option("--out", curve.out_path, "Output file (default stdout)");

  qkd::HistogramArgs hist;
  double hist_pulses = -1.0, hist_seed = -1.0;
  auto* cmd_hi = app.add_subcommand(
      "histogram", "Arrival-time histogram over one clock period");
  cmd_hi->add_option("--config", hist.config_path, "Scenario config file")
      ->required();
  cmd_hi->add_option("--bin-ps", hist.bin_ps, "Bin width [ps]");
  cmd_hi->add_flag("--controlled", hist.controlled,
                   "Emit the polarization-controlled column");
  cmd_hi->add_flag("--uncontrolled", hist.uncontrolled,
                   "Emit the uncontrolled column");
  cmd_hi->add_option("--pulses", hist_pulses, "Override run.pulses");
  cmd_hi->add_option("--seed", hist_seed, "Override run.seed");
  cmd_hi->add_option("--workers", hist.workers, "Worker threads");
  cmd_hi->add_option("--out", hist.out_path, "Output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    // CLI11's help paths return 0; everything else is a usage error.
    return code == 0 ? qkd::kExitOk : qkd::kExitUsage;
  }

  if (sim_pulses >= 0.0) simulate.pulses = as_count(sim_pulses);
  if (sim_seed >= 0.0) simulate.seed = as_count(sim_seed);
  if (hist_pulses >= 0.0) hist.pulses = as_count(hist_pulses);
  if (hist_seed >= 0.0) hist.seed = as_count(hist_seed);

  if (cmd_an->parsed())
    return qkd::cmd_analyze(analyze, std::cout, std::cerr);
  if (cmd_sim->parsed())
    return qkd::cmd_simulate(simulate, std::cout, std::cerr);
  if (cmd_sw->parsed()) return qkd::cmd_sweep(sweep, std::cout, std::cerr);
  if (cmd_cv->parsed())
    return qkd::cmd_detector_curve(curve, std::cout, std::cerr);
  if (cmd_hi->parsed()) return qkd::cmd_histogram(hist, std::cout, std::cerr);
  return qkd::kExitUsage;
}
