#pragma once

namespace qkd {

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s
inline constexpr double kPi = 3.14159265358979323846;

// Gaussian FWHM = 2*sqrt(2*ln 2) * sigma ~= 2.355 * sigma.  Widths are quoted
// as FWHM throughout; convert with this factor whenever a sigma is needed.
inline constexpr double kFwhmPerSigma = 2.355;

}  // namespace qkd
