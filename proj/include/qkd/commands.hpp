#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace qkd {

// Shared exit codes: 0 success, 2 usage/config/validation problem, 3 runtime
// failure (I/O and the like).
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitRuntime = 3;

struct AnalyzeArgs {
  std::string config_path;
  std::string format = "csv";  // csv | text
  std::string out_path;        // empty -> stdout
};

struct SimulateArgs {
  std::string config_path;
  std::optional<std::uint64_t> pulses;  // overrides run.pulses
  std::optional<std::uint64_t> seed;    // overrides run.seed
  unsigned workers = 1;
  std::string out_path;
  std::string events_path;  // optional per-event CSV stream
};

struct SweepArgs {
  double km_from = 0.0;
  double km_to = 100.0;
  double step_km = 5.0;
  // Optional config whose first scenario supplies the model parameters
  // (channel coefficients, efficiency, noise, visibility); defaults follow
  // the built-in presets otherwise.
  std::string config_path;
  std::string out_path;
};

struct CurveArgs {
  double pump_from_w = 0.0;
  double pump_to_w = 0.12;
  int points = 121;
  std::string config_path;  // optional detector preset override
  std::string out_path;
};

struct HistogramArgs {
  std::string config_path;
  double bin_ps = 5.0;
  // Column selection; with neither (or both) flag set, both columns are
  // emitted side by side.
  bool controlled = false;
  bool uncontrolled = false;
  std::optional<std::uint64_t> pulses;
  std::optional<std::uint64_t> seed;
  unsigned workers = 1;
  std::string out_path;
};

// Each command writes its artifact to --out (or `out` when no path is given),
// diagnostics to `err`, and returns an exit code.  Outputs depend only on
// (config, flags, seed).
int cmd_analyze(const AnalyzeArgs& args, std::ostream& out, std::ostream& err);
int cmd_simulate(const SimulateArgs& args, std::ostream& out, std::ostream& err);
int cmd_sweep(const SweepArgs& args, std::ostream& out, std::ostream& err);
int cmd_detector_curve(const CurveArgs& args, std::ostream& out,
                       std::ostream& err);
int cmd_histogram(const HistogramArgs& args, std::ostream& out,
                  std::ostream& err);

}  // namespace qkd
