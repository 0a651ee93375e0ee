#pragma once

#include "qkd/rng.hpp"

namespace qkd {

// Hybrid up-conversion single-photon detector: a PPLN waveguide converts the
// 1550 nm photon to the visible under a strong pump, and a silicon APD counts
// the converted photon.  Efficiency and noise both follow the pump power, so
// the operating point is a trade-off rather than a fixed property.
struct UpconversionDetector {
  // sin^2 conversion: eta_sfg = sin^2(sqrt(eta_norm * P_pump) * L).
  double eta_norm_per_w_cm2 = 1.5;   // normalized conversion efficiency
  double waveguide_length_cm = 4.0;
  double pump_power_w = 0.0157839696577077;  // ~2 % overall efficiency

  double fixed_loss = 0.30;          // coupling, propagation and filter losses
  double spad_efficiency = 0.20;     // silicon APD at the up-converted wavelength

  double jitter_fwhm_ps = 40.0;      // detection-time spread (FWHM)
  double gate_width_ps = 300.0;      // acceptance window per clock slot

  // Noise model: intrinsic APD darks plus pump-induced counts with linear and
  // quadratic terms (the quadratic one dominates near the operating point).
  double intrinsic_dark_rate_hz = 150.0;
  double noise_lin_hz_per_w = 1.5e5;
  double noise_quad_hz_per_w2 = 6.6e7;

  double afterpulse_prob = 0.01;     // spurious count one gate after a click

  void validate() const;  // throws std::invalid_argument

  // Pump power at which the sin^2 argument reaches pi/2 (conversion peak).
  double peak_pump_power_w() const;
};

// Conversion efficiency of the waveguide alone, at the configured pump.
double sfg_efficiency(const UpconversionDetector& det);
double sfg_efficiency_at(const UpconversionDetector& det, double pump_w);

// End-to-end photon detection probability: sfg * fixed_loss * spad.
double overall_efficiency(const UpconversionDetector& det);
double overall_efficiency_at(const UpconversionDetector& det, double pump_w);

// Total noise count rate at the configured pump: dark + lin*P + quad*P^2.
double noise_rate_hz(const UpconversionDetector& det);
double noise_rate_hz_at(const UpconversionDetector& det, double pump_w);

// Probability of a noise count inside one gate: rate * gate width.  Rejects
// products >= 0.1 where the linearized form stops being a probability.
double dark_prob_per_gate(const UpconversionDetector& det);

// Detection timestamp: the true arrival smeared by Gaussian jitter.
double sample_detection_time_ps(const UpconversionDetector& det,
                                double true_time_ps, CounterRng& rng);

// Pump power giving the requested overall efficiency, on the rising side of
// the conversion curve.  Throws if the target exceeds the peak efficiency.
double operating_pump_power_w(const UpconversionDetector& det, double target_eta);

}  // namespace qkd
