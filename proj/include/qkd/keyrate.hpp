#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qkd/protocol.hpp"

namespace qkd {

// Inputs to the analytic error/rate model of one link.
struct RateParams {
  Protocol protocol = Protocol::BB84;
  Receiver receiver = Receiver::TwoDetector;
  double mu = 0.286;       // mean photon number per pulse
  double t = 0.286;        // channel transmittance
  double eta = 0.008;      // receiver photon detection efficiency
  double p_dark = 7e-6;    // noise probability per detector per gate
  double q_opt = 0.005;    // interferometric optical error, (1 - V)/2
  double q_disp = 0.0;     // extra optical error from dispersive bin overlap
  double rep_rate_hz = 1.27e9;
  double i1 = 0.4;         // Eve's information on a single-photon SARG bit

  void validate() const;  // throws std::invalid_argument
};

// Probability that a pulse produces a signal detection: mu * t * eta.
double p_phot(const RateParams& p);

// Noise-to-signal error term P_dark / P_phot; with four gated detectors twice
// as many noise counts compete against the same signal, so it doubles.
double q_det(const RateParams& p);

// Expected QBER: optical + detector terms, doubled for SARG because only
// half the conclusive events constrain the bit the noise flipped.  Saturates
// at 0.5 when noise dominates.  Throws if p_phot is zero.
double qber_theory(const RateParams& p);

// QBER from raw gated counts in the expected (T) and wrong (F) detector for
// each prepared bit, as measured with fixed settings before sifting; the
// SARG factor 2 maps the raw error rate to the post-sifting one.
double qber_empirical(double t0, double f0, double t1, double f1,
                      Protocol protocol);

// Binary Shannon entropy, bits.
double shannon_entropy(double q);

// Eve's information fraction per sifted bit for PNS-style attacks:
// BB84: mu / (2 t); SARG: I1 + (1 - I1) * mu^2 / (12 t).  Clamped to [0, 1].
double i_eve(const RateParams& p);

// Sifting ratio: 1/2 for BB84; (1/4)(1 + Q_opt + 2 Q_det) for SARG, where
// noise and misaligned optical outcomes stay conclusive more often than the
// ideal quarter.
double p_sift(const RateParams& p);

// Mean photon number maximizing mu * (1 - i_eve(mu)): t for BB84, 2 sqrt(t)
// for SARG.
double optimal_mu(Protocol protocol, double t);

// Secure rate S = max(0, R (1 - H(Q) - I_Eve) P_sift), with R the raw
// detection rate in bit/s.
double secure_rate_bps(double raw_rate_bps, double qber, double eve_info,
                       double sift_ratio);

// Modelled raw detection rate: clock * (P_phot + noise from every active
// detector).
double modeled_raw_rate_bps(const RateParams& p);

struct LinkReport {
  double raw_rate_bps = 0.0;
  double qber = 0.0;       // the value used for the rate (measured if given)
  double qber_th = 0.0;
  double eve_info = 0.0;
  double sift_ratio = 0.0;
  double secure_rate_bps = 0.0;
  bool qber_measured = false;
};

// Full link budget.  Measured raw rate / QBER override the modelled values
// when provided.
LinkReport analyze(const RateParams& p, std::optional<double> measured_r_bps,
                   std::optional<double> measured_qber);

// Conditions under which the linearized error model drifts: returned strings
// are human-readable notes, empty when the model is comfortably valid.
std::vector<std::string> approximation_warnings(const RateParams& p);

}  // namespace qkd
