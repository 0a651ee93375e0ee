#include "qkd/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <unordered_map>

namespace qkd {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

// Dimension of a config value; each one lists the units it accepts and their
// multipliers into the canonical internal unit.
enum class Dim {
  Frequency,   // -> Hz
  TimePs,      // -> ps
  LengthKm,    // -> km
  LengthCm,    // -> cm
  WavelengthNm,
  SpectralPm,
  PowerW,
  AttenDbKm,   // -> dB/km
  LossDb,      // -> dB
  Dispersion,  // -> ps/nm/km
  Scalar,      // bare or %
  BitRate,     // -> bit/s
  NoisePerW,   // -> Hz/W
  NoisePerW2,  // -> Hz/W^2
  EtaNorm,     // -> 1/(W cm^2)
  Count,       // bare nonnegative integer (scientific notation allowed)
};

struct UnitDef {
  const char* unit;
  double mult;
};

const std::vector<UnitDef>& units_for(Dim d) {
  static const std::vector<UnitDef> frequency = {
      {"Hz", 1.0}, {"kHz", 1e3}, {"MHz", 1e6}, {"GHz", 1e9}};
  static const std::vector<UnitDef> time_ps = {
      {"ps", 1.0}, {"ns", 1e3}, {"fs", 1e-3}};
  static const std::vector<UnitDef> length_km = {{"km", 1.0}, {"m", 1e-3}};
  static const std::vector<UnitDef> length_cm = {{"cm", 1.0}, {"mm", 0.1}};
  static const std::vector<UnitDef> wavelength = {{"nm", 1.0}, {"um", 1e3}};
  static const std::vector<UnitDef> spectral = {{"pm", 1.0}, {"nm", 1e3}};
  static const std::vector<UnitDef> power = {
      {"W", 1.0}, {"mW", 1e-3}, {"uW", 1e-6}};
  static const std::vector<UnitDef> atten = {{"dB/km", 1.0}};
  static const std::vector<UnitDef> loss = {{"dB", 1.0}};
  static const std::vector<UnitDef> dispersion = {{"ps/nm/km", 1.0}};
  static const std::vector<UnitDef> scalar = {{"", 1.0}, {"%", 0.01}};
  static const std::vector<UnitDef> bitrate = {
      {"bit/s", 1.0}, {"kbit/s", 1e3}, {"Mbit/s", 1e6}};
  static const std::vector<UnitDef> noise_w = {{"Hz/W", 1.0}, {"kHz/W", 1e3}};
  static const std::vector<UnitDef> noise_w2 = {{"Hz/W2", 1.0},
                                                {"Hz/W^2", 1.0}};
  static const std::vector<UnitDef> eta_norm = {
      {"", 1.0}, {"/W/cm2", 1.0}, {"/W/cm^2", 1.0}};
  static const std::vector<UnitDef> count = {{"", 1.0}};
  switch (d) {
    case Dim::Frequency: return frequency;
    case Dim::TimePs: return time_ps;
    case Dim::LengthKm: return length_km;
    case Dim::LengthCm: return length_cm;
    case Dim::WavelengthNm: return wavelength;
    case Dim::SpectralPm: return spectral;
    case Dim::PowerW: return power;
    case Dim::AttenDbKm: return atten;
    case Dim::LossDb: return loss;
    case Dim::Dispersion: return dispersion;
    case Dim::Scalar: return scalar;
    case Dim::BitRate: return bitrate;
    case Dim::NoisePerW: return noise_w;
    case Dim::NoisePerW2: return noise_w2;
    case Dim::EtaNorm: return eta_norm;
    case Dim::Count: return count;
  }
  return count;  // unreachable
}

std::string expected_units(Dim d) {
  std::string out;
  for (const auto& u : units_for(d)) {
    if (!out.empty()) out += ", ";
    out += u.unit[0] == '\0' ? "<bare number>" : u.unit;
  }
  return out;
}

using Setter = void (*)(Scenario&, double);

struct NumericKey {
  Dim dim;
  Setter set;
};

const std::unordered_map<std::string, NumericKey>& numeric_keys() {
  static const std::unordered_map<std::string, NumericKey> keys = {
      {"source.rep_rate",
       {Dim::Frequency, [](Scenario& s, double v) { s.sim.source.rep_rate_hz = v; }}},
      {"source.mu",
       {Dim::Scalar, [](Scenario& s, double v) { s.sim.source.mu = v; }}},
      {"source.wavelength",
       {Dim::WavelengthNm,
        [](Scenario& s, double v) { s.sim.source.wavelength_nm = v; }}},
      {"source.spectral_width",
       {Dim::SpectralPm,
        [](Scenario& s, double v) { s.sim.source.spectral_width_pm = v; }}},
      {"source.pulse_width",
       {Dim::TimePs, [](Scenario& s, double v) { s.sim.source.pulse_width_ps = v; }}},
      {"source.tbp_constant",
       {Dim::Scalar, [](Scenario& s, double v) { s.sim.source.tbp_constant = v; }}},
      {"channel.length",
       {Dim::LengthKm, [](Scenario& s, double v) { s.sim.channel.length_km = v; }}},
      {"channel.attenuation",
       {Dim::AttenDbKm,
        [](Scenario& s, double v) { s.sim.channel.attenuation_db_per_km = v; }}},
      {"channel.dispersion",
       {Dim::Dispersion,
        [](Scenario& s, double v) { s.sim.channel.dispersion_ps_per_nm_km = v; }}},
      {"channel.excess_loss",
       {Dim::LossDb, [](Scenario& s, double v) { s.sim.channel.excess_loss_db = v; }}},
      {"detector.eta_norm",
       {Dim::EtaNorm,
        [](Scenario& s, double v) { s.sim.detector.eta_norm_per_w_cm2 = v; }}},
      {"detector.waveguide_length",
       {Dim::LengthCm,
        [](Scenario& s, double v) { s.sim.detector.waveguide_length_cm = v; }}},
      {"detector.pump_power",
       {Dim::PowerW, [](Scenario& s, double v) { s.sim.detector.pump_power_w = v; }}},
      {"detector.fixed_loss",
       {Dim::Scalar, [](Scenario& s, double v) { s.sim.detector.fixed_loss = v; }}},
      {"detector.spad_efficiency",
       {Dim::Scalar,
        [](Scenario& s, double v) { s.sim.detector.spad_efficiency = v; }}},
      {"detector.jitter",
       {Dim::TimePs, [](Scenario& s, double v) { s.sim.detector.jitter_fwhm_ps = v; }}},
      {"detector.gate_width",
       {Dim::TimePs, [](Scenario& s, double v) { s.sim.detector.gate_width_ps = v; }}},
      {"detector.dark_rate",
       {Dim::Frequency,
        [](Scenario& s, double v) { s.sim.detector.intrinsic_dark_rate_hz = v; }}},
      {"detector.noise_lin",
       {Dim::NoisePerW,
        [](Scenario& s, double v) { s.sim.detector.noise_lin_hz_per_w = v; }}},
      {"detector.noise_quad",
       {Dim::NoisePerW2,
        [](Scenario& s, double v) { s.sim.detector.noise_quad_hz_per_w2 = v; }}},
      {"detector.afterpulse",
       {Dim::Scalar, [](Scenario& s, double v) { s.sim.detector.afterpulse_prob = v; }}},
      {"link.visibility",
       {Dim::Scalar, [](Scenario& s, double v) { s.sim.visibility = v; }}},
      {"link.delay",
       {Dim::TimePs,
        [](Scenario& s, double v) { s.sim.interferometer_delay_ps = v; }}},
      {"run.pulses",
       {Dim::Count,
        [](Scenario& s, double v) { s.sim.n_pulses = static_cast<std::uint64_t>(v); }}},
      {"run.seed",
       {Dim::Count,
        [](Scenario& s, double v) { s.sim.seed = static_cast<std::uint64_t>(v); }}},
      {"rate.eta_eff", {Dim::Scalar, [](Scenario& s, double v) { s.eta_eff = v; }}},
      {"rate.p_dark", {Dim::Scalar, [](Scenario& s, double v) { s.p_dark_eff = v; }}},
      {"rate.i1", {Dim::Scalar, [](Scenario& s, double v) { s.i1 = v; }}},
      {"rate.q_disp", {Dim::Scalar, [](Scenario& s, double v) { s.q_disp = v; }}},
      {"rate.measured_r",
       {Dim::BitRate, [](Scenario& s, double v) { s.measured_r_bps = v; }}},
      {"rate.measured_qber",
       {Dim::Scalar, [](Scenario& s, double v) { s.measured_qber = v; }}},
  };
  return keys;
}

[[noreturn]] void fail(const std::string& origin, int line, const std::string& msg) {
  std::ostringstream os;
  os << origin << ":" << line << ": " << msg;
  throw ConfigError(os.str());
}

double parse_value(const std::string& origin, int line, const std::string& key,
                   Dim dim, const std::string& text) {
  const char* begin = text.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin)
    fail(origin, line, "key '" + key + "': expected a number, got '" + text + "'");
  const std::string unit = trim(std::string(end));
  for (const auto& u : units_for(dim))
    if (unit == u.unit) return v * u.mult;
  fail(origin, line, "key '" + key + "': unsupported unit '" + unit +
                         "' (expected one of: " + expected_units(dim) + ")");
}

void check_count(const std::string& origin, int line, const std::string& key,
                 double v) {
  if (v < 0.0 || v != std::floor(v) || v > 1.8e19)
    fail(origin, line, "key '" + key + "': expected a nonnegative integer");
}

bool parse_bool(const std::string& origin, int line, const std::string& key,
                const std::string& value) {
  if (value == "true" || value == "on") return true;
  if (value == "false" || value == "off") return false;
  fail(origin, line, "key '" + key + "': expected true/false, got '" + value + "'");
}

// Range checks beyond what the value parser can see.  n_pulses is validated
// at run time instead, so analysis-only scenarios may omit it.
void validate_scenario(const std::string& origin, const Scenario& sc) {
  try {
    sc.sim.source.validate();
    sc.sim.channel.validate();
    sc.sim.detector.validate();
    if (sc.sim.visibility < 0.0 || sc.sim.visibility > 1.0)
      throw std::invalid_argument("link.visibility must be in [0, 1]");
    if (sc.sim.interferometer_delay_ps <= 0.0)
      throw std::invalid_argument("link.delay must be positive");
    if (sc.eta_eff <= 0.0 || sc.eta_eff > 1.0)
      throw std::invalid_argument("rate.eta_eff must be in (0, 1]");
    if (sc.p_dark_eff < 0.0 || sc.p_dark_eff >= 1.0)
      throw std::invalid_argument("rate.p_dark must be in [0, 1)");
    if (sc.i1 < 0.0 || sc.i1 > 1.0)
      throw std::invalid_argument("rate.i1 must be in [0, 1]");
    if (sc.q_disp < 0.0 || sc.q_disp > 0.5)
      throw std::invalid_argument("rate.q_disp must be in [0, 0.5]");
    if (sc.measured_qber && (*sc.measured_qber < 0.0 || *sc.measured_qber > 1.0))
      throw std::invalid_argument("rate.measured_qber must be in [0, 1]");
    if (sc.measured_r_bps && *sc.measured_r_bps < 0.0)
      throw std::invalid_argument("rate.measured_r must be >= 0");
  } catch (const std::invalid_argument& e) {
    throw ConfigError(origin + ": scenario '" + sc.name + "': " + e.what());
  }
}

}  // namespace

RateParams Scenario::analytic_params() const {
  RateParams p;
  p.protocol = sim.protocol;
  p.receiver = sim.receiver;
  p.mu = sim.source.mu;
  p.t = transmission(sim.channel);
  p.eta = eta_eff;
  p.p_dark = p_dark_eff;
  p.q_opt = 0.5 * (1.0 - sim.visibility);
  p.q_disp = q_disp;
  p.rep_rate_hz = sim.source.rep_rate_hz;
  p.i1 = i1;
  return p;
}

std::vector<Scenario> parse_scenarios(std::istream& in,
                                      const std::string& origin) {
  std::vector<Scenario> scenarios;
  Scenario defaults;  // keys before the first block apply to all scenarios
  bool in_block = false;
  std::string raw;
  int line_no = 0;

  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw;
    if (const auto hash = line.find('#'); hash != std::string::npos)
      line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;

    const auto eq = line.find('=');
    if (eq == std::string::npos)
      fail(origin, line_no, "expected 'key = value', got '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) fail(origin, line_no, "missing key before '='");
    if (value.empty()) fail(origin, line_no, "key '" + key + "': missing value");

    Scenario& target = in_block ? scenarios.back() : defaults;

    if (key == "scenario") {
      Scenario sc = defaults;
      sc.name = value;
      scenarios.push_back(std::move(sc));
      in_block = true;
    } else if (key == "protocol") {
      if (value == "bb84")
        target.sim.protocol = Protocol::BB84;
      else if (value == "sarg")
        target.sim.protocol = Protocol::SARG;
      else
        fail(origin, line_no, "key 'protocol': expected bb84 or sarg");
    } else if (key == "receiver") {
      if (value == "2det")
        target.sim.receiver = Receiver::TwoDetector;
      else if (value == "4det")
        target.sim.receiver = Receiver::FourDetector;
      else
        fail(origin, line_no, "key 'receiver': expected 2det or 4det");
    } else if (key == "link.polarization_controlled") {
      target.sim.polarization_controlled = parse_bool(origin, line_no, key, value);
    } else if (const auto it = numeric_keys().find(key);
               it != numeric_keys().end()) {
      const double v = parse_value(origin, line_no, key, it->second.dim, value);
      if (it->second.dim == Dim::Count) check_count(origin, line_no, key, v);
      it->second.set(target, v);
    } else {
      fail(origin, line_no, "unknown key '" + key + "'");
    }
  }

  for (const auto& sc : scenarios) validate_scenario(origin, sc);
  return scenarios;
}

std::vector<Scenario> load_scenarios(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_scenarios(in, path);
}

}  // namespace qkd
