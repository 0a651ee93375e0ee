#include "qkd/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "qkd/constants.hpp"

namespace qkd {

namespace {

// Fixed batching quantum: slot [b*kBlockSlots, (b+1)*kBlockSlots) is always
// processed by the RNG substream (seed, b), whatever the worker count.
constexpr std::uint64_t kBlockSlots = 65536;

// Per-run constants hoisted out of the slot loop.
struct Derived {
  double mu_eff = 0.0;      // Poisson mean of *detected* signal photons per slot
  double p_dark = 0.0;      // noise probability per detector per gate
  double sigma_ps = 0.0;    // pulse (+) dispersion (+) jitter, as a Gaussian sigma
  double half_gate_ps = 0.0;
  int n_detectors = 2;      // physical detectors behind the receiver
};

Derived derive(const SimConfig& cfg) {
  Derived d;
  d.mu_eff = cfg.source.mu * transmission(cfg.channel) *
             overall_efficiency(cfg.detector);
  d.p_dark = dark_prob_per_gate(cfg.detector);
  const double fwhm = quadrature_width_ps(
      effective_pulse_width_ps(cfg.source, cfg.channel), cfg.detector.jitter_fwhm_ps);
  d.sigma_ps = fwhm / kFwhmPerSigma;
  d.half_gate_ps = 0.5 * cfg.detector.gate_width_ps;
  d.n_detectors = cfg.receiver == Receiver::FourDetector ? 4 : 2;
  return d;
}

// Physical detector layout: two-detector receivers reuse detectors 0/1 for
// whichever basis the switch selects; four-detector receivers dedicate 0/1 to
// Z and 2/3 to X.
Basis detector_basis(const SimConfig& cfg, int index, Basis slot_basis) {
  if (cfg.receiver == Receiver::FourDetector)
    return index < 2 ? Basis::Z : Basis::X;
  return slot_basis;
}

DetectorId detector_port(int index) {
  return index % 2 == 0 ? DetectorId::D1 : DetectorId::D2;
}

int detector_index(const SimConfig& cfg, Basis b, DetectorId port) {
  const int p = port == DetectorId::D1 ? 0 : 1;
  if (cfg.receiver == Receiver::FourDetector)
    return (b == Basis::Z ? 0 : 2) + p;
  return p;
}

void simulate_block(const SimConfig& cfg, const Derived& d, std::uint64_t block,
                    SimResult& out) {
  CounterRng rng(cfg.seed, block);
  const std::uint64_t begin = block * kBlockSlots;
  const std::uint64_t end = std::min(begin + kBlockSlots, cfg.n_pulses);

  // Afterpulses armed by the previous slot, per physical detector.  Block
  // boundaries drop a pending afterpulse (~afterpulse_prob * p_click / 65536
  // per slot) -- the price of schedule-independent results.
  std::array<bool, 4> pending{};
  std::vector<Click> clicks;        // all clicks of the current slot
  std::vector<Click> gated_clicks;  // the ones inside the gate

  for (std::uint64_t slot = begin; slot < end; ++slot) {
    Preparation prep;
    if (cfg.fixed_state)
      prep.state = *cfg.fixed_state;
    else
      prep = prepare(cfg.protocol, rng);

    // Bob's side: an active switch picks one basis per slot; a passive
    // splitter (four detectors) picks one per photon further down.  Fixed
    // runs hold the measurement basis on the prepared one.
    Basis slot_basis = prep.state.basis;
    if (!cfg.fixed_state && cfg.receiver == Receiver::TwoDetector)
      slot_basis = rng.bernoulli(0.5) ? Basis::X : Basis::Z;

    clicks.clear();

    const int n_signal = rng.poisson(d.mu_eff);
    for (int i = 0; i < n_signal; ++i) {
      // Path pair through the two interferometers: short-long interferes and
      // arrives centered; short-short / long-long miss interference and
      // arrive one delay early / late.  Polarization control steers every
      // photon onto the interfering combination.
      double offset_ps = 0.0;
      bool interferes = true;
      if (!cfg.polarization_controlled) {
        const double u = rng.uniform();
        if (u < 0.25) {
          offset_ps = -cfg.interferometer_delay_ps;
          interferes = false;
        } else if (u >= 0.75) {
          offset_ps = cfg.interferometer_delay_ps;
          interferes = false;
        }
      }

      Basis basis = slot_basis;
      if (cfg.receiver == Receiver::FourDetector && !cfg.fixed_state)
        basis = rng.bernoulli(0.5) ? Basis::X : Basis::Z;

      DetectorId port;
      if (interferes) {
        const auto [p1, p2] =
            click_probabilities(prep.state, basis, cfg.visibility);
        port = rng.bernoulli(p1) ? DetectorId::D1 : DetectorId::D2;
      } else {
        port = rng.bernoulli(0.5) ? DetectorId::D1 : DetectorId::D2;
      }

      const double time_ps = offset_ps + d.sigma_ps * rng.gaussian();
      clicks.push_back({basis, port, ClickOrigin::Signal, time_ps});
    }

    // Armed afterpulses fire and noise counts land anywhere in the gate.
    for (int det = 0; det < d.n_detectors; ++det) {
      const Basis b = detector_basis(cfg, det, slot_basis);
      const DetectorId port = detector_port(det);
      if (pending[det]) {
        pending[det] = false;
        const double t = cfg.detector.gate_width_ps * (rng.uniform() - 0.5);
        clicks.push_back({b, port, ClickOrigin::Afterpulse, t});
      }
      if (rng.bernoulli(d.p_dark)) {
        const double t = cfg.detector.gate_width_ps * (rng.uniform() - 0.5);
        clicks.push_back({b, port, ClickOrigin::Dark, t});
      }
    }

    // Any avalanche can arm its detector for a spurious count one gate later.
    for (const Click& c : clicks)
      if (rng.bernoulli(cfg.detector.afterpulse_prob))
        pending[detector_index(cfg, c.basis, c.detector)] = true;

    if (clicks.empty()) continue;

    gated_clicks.clear();
    for (const Click& c : clicks) {
      const bool in_gate = std::abs(c.time_ps) <= d.half_gate_ps;
      out.events.push_back({slot, c, in_gate});
      ++out.origin_counts[static_cast<int>(c.origin)];
      if (in_gate) gated_clicks.push_back(c);
    }

    const auto winner = resolve_slot(gated_clicks, rng);
    if (!winner) continue;
    const Click& c = gated_clicks[*winner];
    ++out.resolved;

    if (c.basis == prep.state.basis) {
      const DetectorId expected =
          prep.state.bit == 0 ? DetectorId::D1 : DetectorId::D2;
      ++out.bit_counts[prep.state.bit][c.detector == expected ? 0 : 1];
    }

    const auto pair = cfg.protocol == Protocol::BB84
                          ? sift_bb84(prep, c.basis, c.detector)
                          : sift_sarg(prep, c.basis, c.detector);
    if (pair) {
      out.sifted.push_back({slot, static_cast<std::uint8_t>(pair->first),
                            static_cast<std::uint8_t>(pair->second)});
      if (pair->first != pair->second) ++out.errors;
    }
  }
}

void merge(SimResult& into, SimResult&& part) {
  into.events.insert(into.events.end(), part.events.begin(), part.events.end());
  into.sifted.insert(into.sifted.end(), part.sifted.begin(), part.sifted.end());
  into.resolved += part.resolved;
  for (std::size_t i = 0; i < into.origin_counts.size(); ++i)
    into.origin_counts[i] += part.origin_counts[i];
  for (int b = 0; b < 2; ++b)
    for (int c = 0; c < 2; ++c) into.bit_counts[b][c] += part.bit_counts[b][c];
  into.errors += part.errors;
}

}  // namespace

void SimConfig::validate() const {
  source.validate();
  channel.validate();
  detector.validate();
  if (visibility < 0.0 || visibility > 1.0)
    throw std::invalid_argument("link.visibility must be in [0, 1]");
  if (interferometer_delay_ps <= 0.0)
    throw std::invalid_argument("link.delay must be positive");
  if (n_pulses == 0)
    throw std::invalid_argument("run.pulses must be positive");
  if (fixed_state && (fixed_state->bit < 0 || fixed_state->bit > 1))
    throw std::invalid_argument("fixed state bit must be 0 or 1");
}

std::vector<std::string> SimConfig::warnings() const {
  std::vector<std::string> notes;
  if (interferometer_delay_ps <= effective_pulse_width_ps(source, channel))
    notes.push_back(
        "time-bin separation is not larger than the effective pulse width: "
        "bins overlap and interference contrast will degrade");
  if (detector.gate_width_ps >= source.period_ps())
    notes.push_back("detection gate spans more than one clock period");
  return notes;
}

double SimResult::empirical_qber() const {
  if (sifted.empty()) throw std::domain_error("no sifted bits");
  return static_cast<double>(errors) / static_cast<double>(sifted.size());
}

double SimResult::sift_fraction() const {
  if (resolved == 0) throw std::domain_error("no resolved detections");
  return static_cast<double>(sifted.size()) / static_cast<double>(resolved);
}

SimResult run(const SimConfig& cfg, unsigned workers) {
  cfg.validate();
  const Derived d = derive(cfg);
  const std::uint64_t n_blocks = (cfg.n_pulses + kBlockSlots - 1) / kBlockSlots;
  if (workers == 0) workers = 1;

  std::vector<SimResult> parts(n_blocks);
  if (workers == 1 || n_blocks == 1) {
    for (std::uint64_t b = 0; b < n_blocks; ++b)
      simulate_block(cfg, d, b, parts[b]);
  } else {
    std::atomic<std::uint64_t> next{0};
    const auto n_threads =
        static_cast<unsigned>(std::min<std::uint64_t>(workers, n_blocks));
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (unsigned i = 0; i < n_threads; ++i)
      pool.emplace_back([&] {
        for (std::uint64_t b = next.fetch_add(1); b < n_blocks;
             b = next.fetch_add(1))
          simulate_block(cfg, d, b, parts[b]);
      });
    for (auto& t : pool) t.join();
  }

  SimResult result;
  result.n_pulses = cfg.n_pulses;
  for (auto& p : parts) merge(result, std::move(p));
  return result;
}

RateParams rate_params_from(const SimConfig& cfg) {
  RateParams p;
  p.protocol = cfg.protocol;
  p.receiver = cfg.receiver;
  p.mu = cfg.source.mu;
  p.t = transmission(cfg.channel);
  p.eta = overall_efficiency(cfg.detector);
  p.p_dark = dark_prob_per_gate(cfg.detector);
  p.q_opt = 0.5 * (1.0 - cfg.visibility);
  p.rep_rate_hz = cfg.source.rep_rate_hz;
  return p;
}

std::uint64_t Histogram::total() const {
  return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
}

double Histogram::bin_center_ps(std::size_t i) const {
  return -0.5 * window_ps + (static_cast<double>(i) + 0.5) * bin_width_ps;
}

Histogram build_histogram(const std::vector<Event>& events, double bin_width_ps,
                          double window_ps) {
  if (bin_width_ps <= 0.0)
    throw std::invalid_argument("bin width must be positive");
  if (window_ps <= 0.0) throw std::invalid_argument("window must be positive");
  Histogram h;
  h.bin_width_ps = bin_width_ps;
  h.window_ps = window_ps;
  const auto n_bins =
      static_cast<std::size_t>(std::ceil(window_ps / bin_width_ps));
  h.counts.assign(n_bins, 0);
  for (const Event& e : events) {
    // Fold into [-window/2, +window/2): a long-path tail that spills past the
    // slot edge belongs to the neighbouring slot's picture.
    double t = std::fmod(e.click.time_ps + 0.5 * window_ps, window_ps);
    if (t < 0.0) t += window_ps;
    auto idx = static_cast<std::size_t>(t / bin_width_ps);
    if (idx >= n_bins) idx = n_bins - 1;
    ++h.counts[idx];
  }
  return h;
}

std::uint64_t count_in_window(const Histogram& h, double lo_ps, double hi_ps) {
  std::uint64_t sum = 0;
  for (std::size_t i = 0; i < h.counts.size(); ++i) {
    const double c = h.bin_center_ps(i);
    if (c >= lo_ps && c < hi_ps) sum += h.counts[i];
  }
  return sum;
}

double estimate_fwhm_ps(const Histogram& h, double center_ps,
                        double search_halfwidth_ps) {
  const auto n = h.counts.size();
  std::size_t peak = n;  // sentinel
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(h.bin_center_ps(i) - center_ps) > search_halfwidth_ps) continue;
    if (peak == n || h.counts[i] > h.counts[peak]) peak = i;
  }
  if (peak == n || h.counts[peak] == 0)
    throw std::domain_error("no peak in the search window");
  const double half_max = 0.5 * static_cast<double>(h.counts[peak]);

  // Linear interpolation of the two half-maximum crossings.
  double left = 0.0, right = 0.0;
  bool found_left = false, found_right = false;
  for (std::size_t i = peak; i-- > 0;) {
    const auto lo = static_cast<double>(h.counts[i]);
    const auto hi = static_cast<double>(h.counts[i + 1]);
    if (lo < half_max) {
      left = h.bin_center_ps(i) +
             (half_max - lo) / (hi - lo) * h.bin_width_ps;
      found_left = true;
      break;
    }
  }
  for (std::size_t i = peak + 1; i < n; ++i) {
    const auto lo = static_cast<double>(h.counts[i]);
    const auto hi = static_cast<double>(h.counts[i - 1]);
    if (lo < half_max) {
      right = h.bin_center_ps(i) -
              (half_max - lo) / (hi - lo) * h.bin_width_ps;
      found_right = true;
      break;
    }
  }
  if (!found_left || !found_right)
    throw std::domain_error("peak has no half-maximum crossing in range");
  return right - left;
}

FixedPhaseCounts fixed_phase_counts(const SimResult& result, const SimConfig& cfg,
                           double duration_s) {
  if (result.n_pulses == 0) throw std::invalid_argument("empty result");
  if (duration_s <= 0.0)
    throw std::invalid_argument("duration must be positive");
  const double scale = duration_s * cfg.source.rep_rate_hz /
                       static_cast<double>(result.n_pulses);
  FixedPhaseCounts t;
  for (int bit = 0; bit < 2; ++bit) {
    t.expected[bit] = scale * static_cast<double>(result.bit_counts[bit][0]);
    t.wrong[bit] = scale * static_cast<double>(result.bit_counts[bit][1]);
  }
  return t;
}

}  // namespace qkd
