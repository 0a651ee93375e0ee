#include "qkd/keyrate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qkd {

namespace {

int active_detectors(Receiver r) { return r == Receiver::FourDetector ? 4 : 2; }

// Combined optical error: interferometer visibility plus dispersive overlap.
double q_optical(const RateParams& p) { return p.q_opt + p.q_disp; }

}  // namespace

void RateParams::validate() const {
  if (mu < 0.0) throw std::invalid_argument("mu must be >= 0");
  if (t <= 0.0 || t > 1.0)
    throw std::invalid_argument("transmittance must be in (0, 1]");
  if (eta <= 0.0 || eta > 1.0)
    throw std::invalid_argument("efficiency must be in (0, 1]");
  if (p_dark < 0.0 || p_dark >= 1.0)
    throw std::invalid_argument("p_dark must be in [0, 1)");
  if (q_opt < 0.0 || q_opt > 0.5)
    throw std::invalid_argument("q_opt must be in [0, 0.5]");
  if (q_disp < 0.0 || q_disp > 0.5)
    throw std::invalid_argument("q_disp must be in [0, 0.5]");
  if (rep_rate_hz <= 0.0)
    throw std::invalid_argument("rep rate must be positive");
  if (i1 < 0.0 || i1 > 1.0) throw std::invalid_argument("i1 must be in [0, 1]");
}

double p_phot(const RateParams& p) { return p.mu * p.t * p.eta; }

double q_det(const RateParams& p) {
  const double signal = p_phot(p);
  if (signal <= 0.0)
    throw std::domain_error("q_det undefined without signal (p_phot = 0)");
  const double factor = p.receiver == Receiver::FourDetector ? 2.0 : 1.0;
  return factor * p.p_dark / signal;
}

double qber_theory(const RateParams& p) {
  const double q = q_optical(p) + q_det(p);
  // When darks swamp the signal the linearized sum exceeds the physical
  // ceiling; a fully random key saturates at 0.5.
  return std::min(0.5, p.protocol == Protocol::SARG ? 2.0 * q : q);
}

double qber_empirical(double t0, double f0, double t1, double f1,
                      Protocol protocol) {
  const double total = t0 + f0 + t1 + f1;
  if (total <= 0.0) throw std::invalid_argument("no counts");
  if (t0 < 0.0 || f0 < 0.0 || t1 < 0.0 || f1 < 0.0)
    throw std::invalid_argument("counts must be >= 0");
  const double q = (f0 + f1) / total;
  return protocol == Protocol::SARG ? 2.0 * q : q;
}

double shannon_entropy(double q) {
  if (q < 0.0 || q > 1.0)
    throw std::invalid_argument("entropy argument must be in [0, 1]");
  if (q == 0.0 || q == 1.0) return 0.0;
  return -q * std::log2(q) - (1.0 - q) * std::log2(1.0 - q);
}

double i_eve(const RateParams& p) {
  double info;
  if (p.protocol == Protocol::BB84) {
    info = p.mu / (2.0 * p.t);
  } else {
    info = p.i1 + (1.0 - p.i1) * p.mu * p.mu / (12.0 * p.t);
  }
  return std::clamp(info, 0.0, 1.0);
}

double p_sift(const RateParams& p) {
  if (p.protocol == Protocol::BB84) return 0.5;
  return 0.25 * (1.0 + q_optical(p) + 2.0 * q_det(p));
}

double optimal_mu(Protocol protocol, double t) {
  if (t <= 0.0 || t > 1.0)
    throw std::invalid_argument("transmittance must be in (0, 1]");
  return protocol == Protocol::BB84 ? t : 2.0 * std::sqrt(t);
}

double secure_rate_bps(double raw_rate_bps, double qber, double eve_info,
                       double sift_ratio) {
  if (raw_rate_bps < 0.0) throw std::invalid_argument("rate must be >= 0");
  const double fraction = 1.0 - shannon_entropy(qber) - eve_info;
  return std::max(0.0, raw_rate_bps * fraction * sift_ratio);
}

double modeled_raw_rate_bps(const RateParams& p) {
  return p.rep_rate_hz *
         (p_phot(p) + active_detectors(p.receiver) * p.p_dark);
}

LinkReport analyze(const RateParams& p, std::optional<double> measured_r_bps,
                   std::optional<double> measured_qber) {
  p.validate();
  LinkReport rep;
  rep.qber_th = qber_theory(p);
  rep.qber_measured = measured_qber.has_value();
  rep.qber = measured_qber.value_or(rep.qber_th);
  rep.raw_rate_bps = measured_r_bps.value_or(modeled_raw_rate_bps(p));
  rep.eve_info = i_eve(p);
  rep.sift_ratio = p_sift(p);
  rep.secure_rate_bps =
      secure_rate_bps(rep.raw_rate_bps, rep.qber, rep.eve_info, rep.sift_ratio);
  return rep;
}

std::vector<std::string> approximation_warnings(const RateParams& p) {
  std::vector<std::string> notes;
  if (p.p_dark > p_phot(p))
    notes.push_back(
        "noise exceeds signal (p_dark > p_phot): error model dominated by darks");
  if (qber_theory(p) > 0.25)
    notes.push_back("QBER above 25 %: linearized error terms are unreliable");
  if (p.mu * p.t * p.eta > 0.1)
    notes.push_back(
        "detection probability above 0.1: multi-click effects neglected by the model");
  return notes;
}

}  // namespace qkd
