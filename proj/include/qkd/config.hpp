#pragma once

#include <istream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qkd/keyrate.hpp"
#include "qkd/simulator.hpp"

namespace qkd {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// One named run description from a config file: the full Monte Carlo setup
// plus the effective parameters of the analytic path.  The analytic
// efficiency/noise are separate knobs (rate.*) because published link budgets
// quote effective values that need not equal the modelled detector's.
struct Scenario {
  std::string name;
  SimConfig sim;

  double eta_eff = 0.008;    // effective detection efficiency, analytic path
  double p_dark_eff = 7e-6;  // per-gate noise probability, analytic path
  double i1 = 0.4;
  double q_disp = 0.0;       // extra optical error from dispersive overlap
  std::optional<double> measured_r_bps;   // measured raw rate, if any
  std::optional<double> measured_qber;

  // Analytic model inputs: mu/t from the simulated source and channel,
  // efficiency and noise from the rate.* effective values.
  RateParams analytic_params() const;
};

// Parse a line-oriented `section.key = value unit` file.  `scenario = name`
// opens a block; keys before the first block become defaults for every
// scenario.  Unknown keys, malformed numbers, missing or unsupported units
// and out-of-range values all raise ConfigError with file:line context.
std::vector<Scenario> parse_scenarios(std::istream& in,
                                      const std::string& origin);
std::vector<Scenario> load_scenarios(const std::string& path);

}  // namespace qkd
