#include "common.hpp"

namespace hopjam::tfa {

namespace {

// Whole-record form: Re{ x[n] conj(X(f)) e^{-i 2 pi f n dt} } with X(f) the
// record spectrum sum_u x[u] e^{-i 2 pi f u dt} dt.
void mhd_unwindowed(const ComplexSignal& x, const std::vector<std::size_t>& idx, Spectrogram& sp, Exec exec) {
  const double dt = x.grid().dt();
  const auto s = x.samples();
  const std::size_t F = sp.n_freq;
  std::vector<cd> spectrum(F);
  for_each_index(exec, F, [&](std::size_t k) {
    const double f = sp.freq_axis_hz[k];
    cd acc{};
    for (std::size_t u = 0; u < s.size(); ++u) acc += s[u] * detail::cis_cycles(-f * static_cast<double>(u) * dt);
    spectrum[k] = acc * dt;
  });
  for_each_index(exec, idx.size(), [&](std::size_t j) {
    const std::size_t n = idx[j];
    for (std::size_t k = 0; k < F; ++k) {
      const cd rot = detail::cis_cycles(-sp.freq_axis_hz[k] * static_cast<double>(n) * dt);
      sp.values[j * F + k] = (s[n] * std::conj(spectrum[k]) * rot).real();
    }
  });
}

// Lag-windowed form: Re{ x[n] conj(sum_m h(m) x[n - m] e^{+i 2 pi f m dt}) } dt,
// i.e. the local short-time spectrum replaces X(f).
void mhd_windowed(const ComplexSignal& x, const TfGridSpec& grid, const std::vector<std::size_t>& idx,
                  std::size_t M, Spectrogram& sp, Exec exec) {
  const double dt = x.grid().dt();
  const auto s = x.samples();
  const auto N = static_cast<std::ptrdiff_t>(s.size());
  const std::size_t F = sp.n_freq;
  const std::size_t L = 2 * M + 1;
  const auto h = grid.lag_window(M);
  std::vector<cd> twiddle(F * L);
  for (std::size_t k = 0; k < F; ++k) {
    for (std::size_t i = 0; i < L; ++i) {
      const double m = static_cast<double>(i) - static_cast<double>(M);
      twiddle[k * L + i] = detail::cis_cycles(sp.freq_axis_hz[k] * m * dt);
    }
  }
  for_each_index(exec, idx.size(), [&](std::size_t j) {
    const auto n = static_cast<std::ptrdiff_t>(idx[j]);
    std::vector<cd> y(L);
    for (std::size_t i = 0; i < L; ++i) {
      const std::ptrdiff_t u = n - (static_cast<std::ptrdiff_t>(i) - static_cast<std::ptrdiff_t>(M));
      if (u >= 0 && u < N) y[i] = h[i] * s[static_cast<std::size_t>(u)];
    }
    const cd xn = s[static_cast<std::size_t>(n)];
    for (std::size_t k = 0; k < F; ++k) {
      const cd* w = twiddle.data() + k * L;
      cd acc{};
      for (std::size_t i = 0; i < L; ++i) acc += w[i] * y[i];
      sp.values[j * F + k] = (xn * std::conj(acc)).real() * dt;
    }
  });
}

}  // namespace

Spectrogram mhd(const ComplexSignal& x, const TfGridSpec& grid, Exec exec) {
  auto sp = detail::skeleton(TransformKind::MHD, x, grid, grid.freq_axis_hz());
  const auto idx = grid.time_indices(x.size());
  if (grid.window_length == 0) {
    mhd_unwindowed(x, idx, sp, exec);
  } else {
    const std::size_t M = detail::lag_half_length(grid, x.size(), 0);
    mhd_windowed(x, grid, idx, M, sp, exec);
    detail::flag_edges(sp, idx, x.size(), static_cast<double>(M));
  }
  return sp;
}

}  // namespace hopjam::tfa
