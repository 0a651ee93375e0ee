#include "qkd/commands.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <ostream>
#include <vector>

#include "qkd/config.hpp"
#include "qkd/keyrate.hpp"
#include "qkd/simulator.hpp"
#include "qkd/updetector.hpp"

namespace qkd {

namespace {

// Fixed-precision numeric formatting so CSV output is byte-stable.
std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

const char* protocol_name(Protocol p) {
  return p == Protocol::BB84 ? "bb84" : "sarg";
}

const char* basis_name(Basis b) { return b == Basis::Z ? "Z" : "X"; }

const char* detector_name(DetectorId d) {
  return d == DetectorId::D1 ? "D1" : "D2";
}

const char* origin_name(ClickOrigin o) {
  switch (o) {
    case ClickOrigin::Signal: return "signal";
    case ClickOrigin::Dark: return "dark";
    case ClickOrigin::Afterpulse: return "afterpulse";
  }
  return "?";
}

// Run `body` against --out (or the fallback stream), mapping error classes to
// exit codes in one place.
int guarded(const std::string& out_path, std::ostream& fallback,
            std::ostream& err, const std::function<void(std::ostream&)>& body) {
  try {
    if (out_path.empty()) {
      body(fallback);
    } else {
      std::ofstream file(out_path);
      if (!file) {
        err << "error: cannot open output file '" << out_path << "'\n";
        return kExitRuntime;
      }
      body(file);
    }
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

std::vector<Scenario> load_nonempty(const std::string& path) {
  auto scenarios = load_scenarios(path);
  if (scenarios.empty())
    throw ConfigError("no scenarios in '" + path + "'");
  return scenarios;
}

}  // namespace

int cmd_analyze(const AnalyzeArgs& args, std::ostream& out, std::ostream& err) {
  if (args.format != "csv" && args.format != "text") {
    err << "error: --format must be csv or text\n";
    return kExitUsage;
  }
  return guarded(args.out_path, out, err, [&](std::ostream& os) {
    const auto scenarios = load_nonempty(args.config_path);
    const bool csv = args.format == "csv";
    if (csv) {
      os << "scenario,protocol,distance_km,mu,t,mu_opt,raw_rate_bps,qber,"
            "qber_th,p_sift,i_eve,secure_rate_bps\n";
    } else {
      char head[160];
      std::snprintf(head, sizeof head,
                    "%-12s %-5s %6s %7s %8s %7s %12s %8s %8s %7s %6s %12s\n",
                    "scenario", "proto", "km", "mu", "t", "mu_opt", "R[bit/s]",
                    "QBER[%]", "th[%]", "P_sift", "I_Eve", "S[bit/s]");
      os << head;
    }
    for (const auto& sc : scenarios) {
      const RateParams p = sc.analytic_params();
      const LinkReport rep = analyze(p, sc.measured_r_bps, sc.measured_qber);
      const double mu_opt = optimal_mu(p.protocol, p.t);
      for (const auto& note : approximation_warnings(p))
        err << "note: scenario '" << sc.name << "': " << note << "\n";
      if (csv) {
        os << sc.name << ',' << protocol_name(p.protocol) << ','
           << num(sc.sim.channel.length_km) << ',' << num(p.mu) << ','
           << num(p.t) << ',' << num(mu_opt) << ',' << num(rep.raw_rate_bps)
           << ',' << num(rep.qber) << ',' << num(rep.qber_th) << ','
           << num(rep.sift_ratio) << ',' << num(rep.eve_info) << ','
           << num(rep.secure_rate_bps) << '\n';
      } else {
        char row[200];
        std::snprintf(row, sizeof row,
                      "%-12s %-5s %6.1f %7.4f %8.5f %7.4f %12.0f %8.3f %8.3f "
                      "%7.4f %6.3f %12.1f\n",
                      sc.name.c_str(), protocol_name(p.protocol),
                      sc.sim.channel.length_km, p.mu, p.t, mu_opt,
                      rep.raw_rate_bps, 100.0 * rep.qber, 100.0 * rep.qber_th,
                      rep.sift_ratio, rep.eve_info, rep.secure_rate_bps);
        os << row;
      }
    }
  });
}

int cmd_simulate(const SimulateArgs& args, std::ostream& out,
                 std::ostream& err) {
  return guarded(args.out_path, out, err, [&](std::ostream& os) {
    auto scenarios = load_nonempty(args.config_path);

    std::ofstream events_file;
    if (!args.events_path.empty()) {
      events_file.open(args.events_path);
      if (!events_file)
        throw std::runtime_error("cannot open events file '" +
                                 args.events_path + "'");
      events_file
          << "scenario,slot,basis,detector,origin,time_ps,gated\n";
    }

    os << "scenario,protocol,distance_km,pulses,seed,events,resolved,sifted,"
          "errors,raw_rate_bps,qber_emp,qber_th,sift_fraction,p_sift_th,"
          "secure_rate_bps\n";
    for (auto& sc : scenarios) {
      if (args.pulses) sc.sim.n_pulses = *args.pulses;
      if (args.seed) sc.sim.seed = *args.seed;
      try {
        sc.sim.validate();
      } catch (const std::invalid_argument& e) {
        throw ConfigError("scenario '" + sc.name + "': " + std::string(e.what()));
      }
      for (const auto& note : sc.sim.warnings())
        err << "note: scenario '" << sc.name << "': " << note << "\n";

      const SimResult result = run(sc.sim, args.workers);
      const RateParams p = rate_params_from(sc.sim);

      const double slots = static_cast<double>(result.n_pulses);
      const double raw_rate =
          static_cast<double>(result.resolved) * sc.sim.source.rep_rate_hz / slots;
      const bool have_key = !result.sifted.empty();
      const double qber_emp =
          have_key ? result.empirical_qber()
                   : std::numeric_limits<double>::quiet_NaN();
      const double sift_frac =
          result.resolved > 0 ? result.sift_fraction() : 0.0;
      // Secure rate from the measured run: empirical rate, QBER and sifting,
      // with the analytic eavesdropper bound.
      const double secure =
          have_key ? secure_rate_bps(raw_rate, qber_emp, i_eve(p), sift_frac)
                   : 0.0;

      os << sc.name << ',' << protocol_name(sc.sim.protocol) << ','
         << num(sc.sim.channel.length_km) << ',' << result.n_pulses << ','
         << sc.sim.seed << ',' << result.events.size() << ',' << result.resolved
         << ',' << result.sifted.size() << ',' << result.errors << ','
         << num(raw_rate) << ',' << num(qber_emp) << ','
         << num(qber_theory(p)) << ',' << num(sift_frac) << ','
         << num(p_sift(p)) << ',' << num(secure) << '\n';

      if (events_file.is_open()) {
        for (const Event& e : result.events) {
          events_file << sc.name << ',' << e.slot << ','
                      << basis_name(e.click.basis) << ','
                      << detector_name(e.click.detector) << ','
                      << origin_name(e.click.origin) << ','
                      << num(e.click.time_ps) << ',' << (e.gated ? 1 : 0)
                      << '\n';
        }
      }
    }
  });
}

int cmd_sweep(const SweepArgs& args, std::ostream& out, std::ostream& err) {
  if (args.step_km <= 0.0) {
    err << "error: --step must be positive\n";
    return kExitUsage;
  }
  if (args.km_to < args.km_from || args.km_from < 0.0) {
    err << "error: sweep range must satisfy 0 <= --km-from <= --km-to\n";
    return kExitUsage;
  }
  return guarded(args.out_path, out, err, [&](std::ostream& os) {
    // Model template: bundled defaults, or the first scenario of --config.
    FiberChannel channel;
    RateParams base;
    if (!args.config_path.empty()) {
      const auto scenarios = load_nonempty(args.config_path);
      channel = scenarios.front().sim.channel;
      base = scenarios.front().analytic_params();
    }
    os << "protocol,distance_km,t,mu_opt,r_model_bps,qber_th,secure_rate_bps\n";
    const auto n_steps = static_cast<long>(
        std::floor((args.km_to - args.km_from) / args.step_km + 1e-9));
    for (long i = 0; i <= n_steps; ++i) {
      const double km = args.km_from + static_cast<double>(i) * args.step_km;
      FiberChannel ch = channel;
      ch.length_km = km;
      const double t = transmission(ch);
      for (const Protocol proto : {Protocol::BB84, Protocol::SARG}) {
        RateParams p = base;
        p.protocol = proto;
        p.t = t;
        p.mu = optimal_mu(proto, t);
        const double r_model = modeled_raw_rate_bps(p);
        const double qber = qber_theory(p);
        const double secure =
            secure_rate_bps(r_model, qber, i_eve(p), p_sift(p));
        os << protocol_name(proto) << ',' << num(km) << ',' << num(t) << ','
           << num(p.mu) << ',' << num(r_model) << ',' << num(qber) << ','
           << num(secure) << '\n';
      }
    }
  });
}

int cmd_detector_curve(const CurveArgs& args, std::ostream& out,
                       std::ostream& err) {
  if (args.points < 2) {
    err << "error: --points must be at least 2\n";
    return kExitUsage;
  }
  if (args.pump_from_w < 0.0 || args.pump_to_w <= args.pump_from_w) {
    err << "error: pump range must satisfy 0 <= --pump-from < --pump-to\n";
    return kExitUsage;
  }
  return guarded(args.out_path, out, err, [&](std::ostream& os) {
    UpconversionDetector det;
    if (!args.config_path.empty())
      det = load_nonempty(args.config_path).front().sim.detector;
    os << "pump_w,sfg_efficiency,overall_efficiency,noise_hz\n";
    for (int i = 0; i < args.points; ++i) {
      const double pump =
          args.pump_from_w + (args.pump_to_w - args.pump_from_w) *
                                 static_cast<double>(i) /
                                 static_cast<double>(args.points - 1);
      os << num(pump) << ',' << num(sfg_efficiency_at(det, pump)) << ','
         << num(overall_efficiency_at(det, pump)) << ','
         << num(noise_rate_hz_at(det, pump)) << '\n';
    }
  });
}

int cmd_histogram(const HistogramArgs& args, std::ostream& out,
                  std::ostream& err) {
  if (args.bin_ps <= 0.0) {
    err << "error: --bin-ps must be positive\n";
    return kExitUsage;
  }
  return guarded(args.out_path, out, err, [&](std::ostream& os) {
    auto scenarios = load_nonempty(args.config_path);
    Scenario sc = scenarios.front();  // one histogram per invocation
    if (args.pulses) sc.sim.n_pulses = *args.pulses;
    if (args.seed) sc.sim.seed = *args.seed;
    try {
      sc.sim.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError("scenario '" + sc.name + "': " + std::string(e.what()));
    }

    // Neither flag means both columns.
    const bool both = args.controlled == args.uncontrolled;
    const bool want_controlled = both || args.controlled;
    const bool want_uncontrolled = both || args.uncontrolled;
    const double window = sc.sim.source.period_ps();

    Histogram controlled, uncontrolled;
    if (want_controlled) {
      SimConfig cfg = sc.sim;
      cfg.polarization_controlled = true;
      controlled =
          build_histogram(run(cfg, args.workers).events, args.bin_ps, window);
    }
    if (want_uncontrolled) {
      SimConfig cfg = sc.sim;
      cfg.polarization_controlled = false;
      uncontrolled =
          build_histogram(run(cfg, args.workers).events, args.bin_ps, window);
    }

    os << "time_ps";
    if (want_controlled) os << ",counts_controlled";
    if (want_uncontrolled) os << ",counts_uncontrolled";
    os << '\n';
    const Histogram& shape = want_controlled ? controlled : uncontrolled;
    for (std::size_t i = 0; i < shape.counts.size(); ++i) {
      os << num(shape.bin_center_ps(i));
      if (want_controlled) os << ',' << controlled.counts[i];
      if (want_uncontrolled) os << ',' << uncontrolled.counts[i];
      os << '\n';
    }
  });
}

}  // namespace qkd
