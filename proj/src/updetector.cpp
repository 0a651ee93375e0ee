#include "qkd/updetector.hpp"

#include <cmath>
#include <stdexcept>

#include "qkd/constants.hpp"

namespace qkd {

void UpconversionDetector::validate() const {
  if (eta_norm_per_w_cm2 <= 0.0)
    throw std::invalid_argument("detector.eta_norm must be positive");
  if (waveguide_length_cm <= 0.0)
    throw std::invalid_argument("detector.waveguide_length must be positive");
  if (pump_power_w < 0.0)
    throw std::invalid_argument("detector.pump_power must be >= 0");
  if (fixed_loss < 0.0 || fixed_loss > 1.0)
    throw std::invalid_argument("detector.fixed_loss must be in [0, 1]");
  if (spad_efficiency < 0.0 || spad_efficiency > 1.0)
    throw std::invalid_argument("detector.spad_efficiency must be in [0, 1]");
  if (jitter_fwhm_ps < 0.0)
    throw std::invalid_argument("detector.jitter must be >= 0");
  if (gate_width_ps <= 0.0)
    throw std::invalid_argument("detector.gate_width must be positive");
  if (intrinsic_dark_rate_hz < 0.0)
    throw std::invalid_argument("detector.dark_rate must be >= 0");
  if (noise_lin_hz_per_w < 0.0)
    throw std::invalid_argument("detector.noise_lin must be >= 0");
  if (noise_quad_hz_per_w2 < 0.0)
    throw std::invalid_argument("detector.noise_quad must be >= 0");
  if (afterpulse_prob < 0.0 || afterpulse_prob > 1.0)
    throw std::invalid_argument("detector.afterpulse must be in [0, 1]");
}

double UpconversionDetector::peak_pump_power_w() const {
  const double x = kPi / (2.0 * waveguide_length_cm);
  return x * x / eta_norm_per_w_cm2;
}

double sfg_efficiency_at(const UpconversionDetector& det, double pump_w) {
  if (pump_w < 0.0) throw std::invalid_argument("pump power must be >= 0");
  const double s =
      std::sin(std::sqrt(det.eta_norm_per_w_cm2 * pump_w) * det.waveguide_length_cm);
  return s * s;
}

double sfg_efficiency(const UpconversionDetector& det) {
  return sfg_efficiency_at(det, det.pump_power_w);
}

double overall_efficiency_at(const UpconversionDetector& det, double pump_w) {
  return sfg_efficiency_at(det, pump_w) * det.fixed_loss * det.spad_efficiency;
}

double overall_efficiency(const UpconversionDetector& det) {
  return overall_efficiency_at(det, det.pump_power_w);
}

double noise_rate_hz_at(const UpconversionDetector& det, double pump_w) {
  return det.intrinsic_dark_rate_hz + det.noise_lin_hz_per_w * pump_w +
         det.noise_quad_hz_per_w2 * pump_w * pump_w;
}

double noise_rate_hz(const UpconversionDetector& det) {
  return noise_rate_hz_at(det, det.pump_power_w);
}

double dark_prob_per_gate(const UpconversionDetector& det) {
  const double p = noise_rate_hz(det) * det.gate_width_ps * 1e-12;
  if (p >= 0.1)
    throw std::domain_error(
        "noise rate * gate width >= 0.1: not a valid per-gate probability");
  return p;
}

double sample_detection_time_ps(const UpconversionDetector& det,
                                double true_time_ps, CounterRng& rng) {
  if (det.jitter_fwhm_ps == 0.0) return true_time_ps;
  const double sigma = det.jitter_fwhm_ps / kFwhmPerSigma;
  return true_time_ps + sigma * rng.gaussian();
}

double operating_pump_power_w(const UpconversionDetector& det, double target_eta) {
  if (target_eta < 0.0)
    throw std::invalid_argument("target efficiency must be >= 0");
  const double peak_pump = det.peak_pump_power_w();
  const double peak_eta = overall_efficiency_at(det, peak_pump);
  if (target_eta > peak_eta)
    throw std::domain_error("target efficiency above the conversion peak");
  if (target_eta == 0.0) return 0.0;
  // Efficiency rises monotonically from 0 at P=0 to the peak: bisect.
  double lo = 0.0, hi = peak_pump;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (overall_efficiency_at(det, mid) < target_eta)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace qkd
