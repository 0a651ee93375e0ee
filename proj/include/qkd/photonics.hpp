#pragma once

#include "qkd/rng.hpp"

namespace qkd {

// Pulsed weak-coherent source.  All temporal/spectral widths are FWHM.
struct SourceConfig {
  double rep_rate_hz = 1.27e9;       // clock rate
  double mu = 0.286;                 // mean photon number per pulse
  double wavelength_nm = 1550.0;
  double spectral_width_pm = 100.0;  // FWHM
  double pulse_width_ps = 80.0;      // FWHM
  double tbp_constant = 1.0;         // time-bandwidth product of the pulse shape

  double period_ps() const { return 1e12 / rep_rate_hz; }
  void validate() const;  // throws std::invalid_argument
};

// Standard telecom fibre link.
struct FiberChannel {
  double length_km = 25.0;
  double attenuation_db_per_km = 0.2;
  double dispersion_ps_per_nm_km = 17.0;  // chromatic dispersion coefficient
  double excess_loss_db = 0.0;            // connectors, splices, receiver optics

  void validate() const;
};

// Power transmittance t = 10^-(alpha*L + excess)/10.
double transmission(const FiberChannel& ch);

// Transform-limited duration of a pulse with the given spectral width:
// dt = K * lambda^2 / (c * dlambda).
double transform_limited_width_ps(double spectral_width_pm, double wavelength_nm,
                                  double tbp_constant = 1.0);

// Temporal spread accumulated by chromatic dispersion: D * dlambda * L.
double dispersion_broadening_ps(const FiberChannel& ch, double spectral_width_pm);

// Width of the convolution of two Gaussian profiles.
double quadrature_width_ps(double a_ps, double b_ps);

// Pulse width after the fibre: source width and dispersion spread combined in
// quadrature.
double effective_pulse_width_ps(const SourceConfig& src, const FiberChannel& ch);

// Photon number of one weak coherent pulse ~ Poisson(mu).
int sample_photon_count(double mu, CounterRng& rng);

// Probability that a pulse carries at least one photon: 1 - e^-mu.
double p_nonzero(double mu);

// Attenuation coefficient (dB/km) that reproduces a target transmittance over
// the given span; used to pin a scenario to a measured channel loss.
double attenuation_for_transmission(double t, double length_km,
                                    double excess_loss_db = 0.0);

}  // namespace qkd
