#include <algorithm>
#include <cmath>
#include <numbers>

#include "common.hpp"

namespace hopjam::tfa {

cd morlet(double t, double w0) {
  return std::pow(std::numbers::pi, -0.25) * std::exp(-0.5 * t * t) * std::polar(1.0, w0 * t);
}

namespace {

struct CwtPlan {
  std::vector<double> scales;   // ascending
  std::vector<double> freqs;    // ascending, freqs[k] belongs to scales[n - 1 - k]
  std::vector<std::size_t> idx;
};

CwtPlan plan_cwt(const ComplexSignal& x, const TfGridSpec& grid) {
  if (x.size() == 0) throw DimensionError("cwt: empty signal");
  grid.validate(x.grid().sample_rate_hz);
  CwtPlan p;
  p.scales = grid.wavelet_scales();
  if (p.scales.empty()) throw ConfigError("cwt: empty scale set");
  const double fs = x.grid().sample_rate_hz;
  for (double a : p.scales) {
    const double support = 2.0 * std::floor(3.0 * a * fs) + 1.0;
    if (support < 8.0) {
      throw ResolutionError("cwt: scale " + std::to_string(a) + " s spans fewer than 8 samples");
    }
  }
  if (grid.scale_set.empty()) {
    p.freqs = grid.freq_axis_hz();
  } else {
    for (auto it = p.scales.rbegin(); it != p.scales.rend(); ++it) {
      p.freqs.push_back(grid.morlet_w0 / (2.0 * std::numbers::pi * *it));
    }
  }
  p.idx = grid.time_indices(x.size());
  return p;
}

// Coefficients for one scale at every time bin, written to out[j * stride].
void cwt_scale(const ComplexSignal& x, const TfGridSpec& grid, double a, const std::vector<std::size_t>& idx,
               cd* out, std::size_t stride) {
  const double fs = x.grid().sample_rate_hz;
  const double dt = 1.0 / fs;
  const double a_samples = a * fs;
  const auto K = static_cast<std::ptrdiff_t>(std::ceil(grid.wavelet_support_sigmas * a_samples));
  const double gain = dt / std::sqrt(a);
  std::vector<cd> taps(static_cast<std::size_t>(2 * K + 1));
  for (std::ptrdiff_t k = -K; k <= K; ++k) {
    taps[static_cast<std::size_t>(k + K)] = std::conj(morlet(static_cast<double>(k) / a_samples, grid.morlet_w0)) * gain;
  }
  const auto N = static_cast<std::ptrdiff_t>(x.size());
  const auto s = x.samples();
  for (std::size_t j = 0; j < idx.size(); ++j) {
    const auto n = static_cast<std::ptrdiff_t>(idx[j]);
    const std::ptrdiff_t lo = std::max(-K, -n);
    const std::ptrdiff_t hi = std::min(K, N - 1 - n);
    cd acc{};
    for (std::ptrdiff_t k = lo; k <= hi; ++k) acc += s[static_cast<std::size_t>(n + k)] * taps[static_cast<std::size_t>(k + K)];
    out[j * stride] = acc;
  }
}

std::vector<cd> cwt_coefficients(const ComplexSignal& x, const TfGridSpec& grid, const CwtPlan& p, Exec exec) {
  const std::size_t F = p.scales.size();
  std::vector<cd> c(p.idx.size() * F);
  for_each_index(exec, F, [&](std::size_t s) {
    const std::size_t row = F - 1 - s;
    cwt_scale(x, grid, p.scales[s], p.idx, c.data() + row, F);
  });
  return c;
}

}  // namespace

std::vector<cd> cwt_complex(const ComplexSignal& x, const TfGridSpec& grid, Exec exec) {
  return cwt_coefficients(x, grid, plan_cwt(x, grid), exec);
}

Spectrogram cwt(const ComplexSignal& x, const TfGridSpec& grid, Exec exec) {
  const auto p = plan_cwt(x, grid);
  auto sp = detail::skeleton(TransformKind::Wavelet, x, grid, p.freqs);
  const auto c = cwt_coefficients(x, grid, p, exec);
  for (std::size_t i = 0; i < c.size(); ++i) sp.values[i] = std::abs(c[i]);
  detail::flag_edges(sp, p.idx, x.size(), 3.0 * p.scales.back() * x.grid().sample_rate_hz);
  return sp;
}

}  // namespace hopjam::tfa
