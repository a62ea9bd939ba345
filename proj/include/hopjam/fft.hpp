#pragma once

#include <complex>
#include <span>
#include <vector>

namespace hopjam::fft {

using cd = std::complex<double>;

/// In-place forward DFT, X[k] = sum_n x[n] exp(-2 pi i k n / N), any N >= 1.
/// Mixed radix (2, 3, 4, 5, generic) with Bluestein fallback for lengths that
/// contain a prime factor above 64.
void forward(std::span<cd> data);

/// In-place inverse DFT including the 1/N factor.
void inverse(std::span<cd> data);

std::vector<cd> forward_copy(std::span<const cd> data);

/// Discrete analytic signal of a real sequence: real part unchanged,
/// negative-frequency bins zeroed, positive bins doubled.
std::vector<cd> analytic_from_real(std::span<const double> x);

}  // namespace hopjam::fft
