#pragma once

#include <cmath>
#include <complex>
#include <numbers>

namespace hopjam::sigsynth::detail {

/// exp(2 pi i * cycles), reducing the argument to [0, 1) cycles first so
/// large time-bandwidth products keep full phase precision.
inline std::complex<double> phasor(double cycles) {
  const double frac = cycles - std::floor(cycles);
  return std::polar(1.0, 2.0 * std::numbers::pi * frac);
}

}  // namespace hopjam::sigsynth::detail
