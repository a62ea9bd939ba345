#include <algorithm>

#include "common.hpp"

namespace hopjam::tfa {

// B(n, f) = 2 dt sum_m h(m) K(n, m) e^{-i 2 pi f 2 m dt}, where K(n, m) is the
// mean of x[n + p + m] conj(x[n + p - m]) over |p| <= floor(2 a |m|), samples
// outside the record counting as zero.  K(n, -m) = conj(K(n, m)), so only
// m >= 0 is evaluated and the result is real.
Spectrogram bjd(const ComplexSignal& x, const TfGridSpec& grid, Exec exec) {
  auto sp = detail::skeleton(TransformKind::BJD, x, grid, grid.freq_axis_hz());
  const auto idx = grid.time_indices(x.size());
  const std::size_t M = detail::lag_half_length(grid, x.size(), (x.size() - 1) / 2);
  const auto h = grid.lag_window(M);
  const double dt = x.grid().dt();
  const auto s = x.samples();
  const auto N = static_cast<std::ptrdiff_t>(s.size());
  const std::size_t F = sp.n_freq;

  std::vector<cd> twiddle(F * (M + 1));
  for (std::size_t k = 0; k < F; ++k) {
    for (std::size_t m = 0; m <= M; ++m) {
      twiddle[k * (M + 1) + m] = detail::cis_cycles(-2.0 * sp.freq_axis_hz[k] * static_cast<double>(m) * dt);
    }
  }
  std::vector<std::ptrdiff_t> half_width(M + 1);
  for (std::size_t m = 0; m <= M; ++m) {
    half_width[m] = static_cast<std::ptrdiff_t>(std::floor(2.0 * grid.bjd_a * static_cast<double>(m)));
  }

  for_each_index(exec, idx.size(), [&](std::size_t j) {
    const auto n = static_cast<std::ptrdiff_t>(idx[j]);
    std::vector<cd> K(M + 1);
    for (std::size_t mu = 0; mu <= M; ++mu) {
      const auto m = static_cast<std::ptrdiff_t>(mu);
      const std::ptrdiff_t W = half_width[mu];
      const std::ptrdiff_t lo = std::max(-W, m - n);
      const std::ptrdiff_t hi = std::min(W, N - 1 - n - m);
      cd acc{};
      for (std::ptrdiff_t p = lo; p <= hi; ++p) {
        acc += s[static_cast<std::size_t>(n + p + m)] * std::conj(s[static_cast<std::size_t>(n + p - m)]);
      }
      K[mu] = h[M + mu] * acc / static_cast<double>(2 * W + 1);
    }
    for (std::size_t k = 0; k < F; ++k) {
      const cd* w = twiddle.data() + k * (M + 1);
      double acc = 0.0;
      for (std::size_t m = 1; m <= M; ++m) acc += (K[m] * w[m]).real();
      sp.values[j * F + k] = (K[0].real() + 2.0 * acc) * 2.0 * dt;
    }
  });
  detail::flag_edges(sp, idx, x.size(), static_cast<double>(static_cast<std::ptrdiff_t>(M) + half_width[M]));
  return sp;
}

}  // namespace hopjam::tfa
