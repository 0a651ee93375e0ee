#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qkd/keyrate.hpp"
#include "qkd/photonics.hpp"
#include "qkd/protocol.hpp"
#include "qkd/updetector.hpp"

namespace qkd {

// One Monte Carlo run: Alice's clocked source, the fibre, Bob's
// interferometer(s) and the gated up-conversion detectors.
struct SimConfig {
  SourceConfig source;
  FiberChannel channel;
  UpconversionDetector detector;
  Protocol protocol = Protocol::BB84;
  Receiver receiver = Receiver::TwoDetector;
  double visibility = 0.99;             // interference contrast V
  double interferometer_delay_ps = 300.0;  // short/long path difference
  // With the input polarization tracked, every photon interferes (single
  // arrival peak); without it, half the photons take the non-interfering
  // short-short / long-long paths and show up +-delay away.
  bool polarization_controlled = true;
  std::uint64_t n_pulses = 0;
  std::uint64_t seed = 1;
  // Fixed-phase run: Alice repeats this state and Bob's switch stays on the
  // matching basis -- the raw detector-statistics measurement mode.
  std::optional<QubitState> fixed_state;

  void validate() const;  // throws std::invalid_argument
  // Non-fatal conditions, e.g. time bins closer than the pulse is wide.
  std::vector<std::string> warnings() const;
};

// A click as recorded, whether or not it survived the gate.
struct Event {
  std::uint64_t slot = 0;
  Click click;
  bool gated = false;
  auto operator<=>(const Event&) const = default;
};

struct SiftedPair {
  std::uint64_t slot = 0;
  std::uint8_t alice_bit = 0;
  std::uint8_t bob_bit = 0;
  auto operator<=>(const SiftedPair&) const = default;
};

struct SimResult {
  std::uint64_t n_pulses = 0;
  std::vector<Event> events;    // every click, in slot order
  std::vector<SiftedPair> sifted;
  std::uint64_t resolved = 0;   // slots whose gated clicks squashed to an outcome
  // Events by origin (Signal / Dark / Afterpulse); sums to events.size().
  std::array<std::uint64_t, 3> origin_counts{};
  // Resolved outcomes measured in the prepared basis, classified against the
  // prepared bit: bit_counts[bit][0] landed on the expected detector (T),
  // bit_counts[bit][1] on the wrong one (F).
  std::array<std::array<std::uint64_t, 2>, 2> bit_counts{};
  std::uint64_t errors = 0;     // sifted pairs with alice_bit != bob_bit

  double empirical_qber() const;  // errors / sifted; throws if no sifted bits
  double sift_fraction() const;   // sifted / resolved; throws if none resolved
  bool operator==(const SimResult&) const = default;
};

// Run the simulation.  Slots are processed in fixed 65536-slot blocks, each
// with its own counter-based RNG substream keyed by (seed, block index), and
// block results are merged in index order -- so the outcome is bit-identical
// for any worker count.
SimResult run(const SimConfig& cfg, unsigned workers = 1);

// The analytic-model parameters this configuration realizes (transmittance
// from the channel, efficiency and dark probability from the detector, ...).
RateParams rate_params_from(const SimConfig& cfg);

// Arrival times folded into one clock period.
struct Histogram {
  double bin_width_ps = 5.0;
  double window_ps = 787.4;  // domain [-window/2, +window/2)
  std::vector<std::uint64_t> counts;

  std::uint64_t total() const;
  double bin_center_ps(std::size_t i) const;
};

// Bin every recorded click (gated or not) by arrival time modulo the window.
Histogram build_histogram(const std::vector<Event>& events, double bin_width_ps,
                          double window_ps);

// Sum of bins whose centers fall in [lo_ps, hi_ps).
std::uint64_t count_in_window(const Histogram& h, double lo_ps, double hi_ps);

// FWHM of the peak nearest `center_ps`, by linear interpolation of the
// half-maximum crossings; searches within +-search_halfwidth_ps.
double estimate_fwhm_ps(const Histogram& h, double center_ps,
                        double search_halfwidth_ps);

// Fixed-phase detector tally in counts (not rates): T/F per prepared bit,
// scaled to the given duration at the source clock rate.
struct FixedPhaseCounts {
  std::array<double, 2> expected{};  // T column, per prepared bit
  std::array<double, 2> wrong{};     // F column
};
FixedPhaseCounts fixed_phase_counts(const SimResult& result, const SimConfig& cfg,
                           double duration_s);

}  // namespace qkd
