#include "qkd/photonics.hpp"

#include <cmath>
#include <stdexcept>

#include "qkd/constants.hpp"

namespace qkd {

void SourceConfig::validate() const {
  if (rep_rate_hz <= 0.0)
    throw std::invalid_argument("source.rep_rate must be positive");
  if (mu < 0.0) throw std::invalid_argument("source.mu must be >= 0");
  if (wavelength_nm <= 0.0)
    throw std::invalid_argument("source.wavelength must be positive");
  if (spectral_width_pm <= 0.0)
    throw std::invalid_argument("source.spectral_width must be positive");
  if (pulse_width_ps <= 0.0)
    throw std::invalid_argument("source.pulse_width must be positive");
  if (tbp_constant <= 0.0)
    throw std::invalid_argument("source.tbp_constant must be positive");
}

void FiberChannel::validate() const {
  if (length_km < 0.0)
    throw std::invalid_argument("channel.length must be >= 0");
  if (attenuation_db_per_km < 0.0)
    throw std::invalid_argument("channel.attenuation must be >= 0");
  if (dispersion_ps_per_nm_km < 0.0)
    throw std::invalid_argument("channel.dispersion must be >= 0");
  if (excess_loss_db < 0.0)
    throw std::invalid_argument("channel.excess_loss must be >= 0");
}

double transmission(const FiberChannel& ch) {
  const double loss_db = ch.attenuation_db_per_km * ch.length_km + ch.excess_loss_db;
  return std::pow(10.0, -loss_db / 10.0);
}

double transform_limited_width_ps(double spectral_width_pm, double wavelength_nm,
                                  double tbp_constant) {
  if (spectral_width_pm <= 0.0)
    throw std::invalid_argument("spectral width must be positive");
  const double lambda_m = wavelength_nm * 1e-9;
  const double dlambda_m = spectral_width_pm * 1e-12;
  const double dt_s = tbp_constant * lambda_m * lambda_m / (kSpeedOfLight * dlambda_m);
  return dt_s * 1e12;
}

double dispersion_broadening_ps(const FiberChannel& ch, double spectral_width_pm) {
  // D [ps/(nm km)] * dlambda [nm] * L [km]
  return ch.dispersion_ps_per_nm_km * (spectral_width_pm * 1e-3) * ch.length_km;
}

double quadrature_width_ps(double a_ps, double b_ps) {
  return std::sqrt(a_ps * a_ps + b_ps * b_ps);
}

double effective_pulse_width_ps(const SourceConfig& src, const FiberChannel& ch) {
  return quadrature_width_ps(src.pulse_width_ps,
                             dispersion_broadening_ps(ch, src.spectral_width_pm));
}

int sample_photon_count(double mu, CounterRng& rng) { return rng.poisson(mu); }

double p_nonzero(double mu) { return -std::expm1(-mu); }

double attenuation_for_transmission(double t, double length_km,
                                    double excess_loss_db) {
  if (t <= 0.0 || t > 1.0)
    throw std::invalid_argument("transmittance must be in (0, 1]");
  if (length_km <= 0.0)
    throw std::invalid_argument("length must be positive");
  return (-10.0 * std::log10(t) - excess_loss_db) / length_km;
}

}  // namespace qkd
