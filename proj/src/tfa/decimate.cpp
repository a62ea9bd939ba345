#include <algorithm>
#include <cmath>
#include <numbers>

#include "hopjam/error.hpp"
#include "hopjam/tfa.hpp"

namespace hopjam::tfa {

namespace {

std::vector<double> lowpass_taps(std::size_t n_taps, double cutoff_norm) {
  const auto K = static_cast<std::ptrdiff_t>(n_taps / 2);
  std::vector<double> h(n_taps);
  double sum = 0.0;
  for (std::ptrdiff_t k = -K; k <= K; ++k) {
    const double x = 2.0 * cutoff_norm * static_cast<double>(k);
    const double sinc = k == 0 ? 1.0 : std::sin(std::numbers::pi * x) / (std::numbers::pi * x);
    const double r = static_cast<double>(k) / static_cast<double>(K);
    const double blackman = 0.42 + 0.5 * std::cos(std::numbers::pi * r) + 0.08 * std::cos(2.0 * std::numbers::pi * r);
    h[static_cast<std::size_t>(k + K)] = 2.0 * cutoff_norm * sinc * blackman;
    sum += h[static_cast<std::size_t>(k + K)];
  }
  for (double& v : h) v /= sum;
  return h;
}

}  // namespace

ComplexSignal decimate(const ComplexSignal& x, std::size_t factor, double cutoff_hz, std::size_t n_taps, Exec exec) {
  const auto& g = x.grid();
  if (factor == 0) throw ConfigError("decimate: factor must be positive");
  if (factor == 1) return x;
  if (x.size() % factor != 0) throw DimensionError("decimate: signal length is not a multiple of the factor");
  if (n_taps < 3 || n_taps % 2 == 0) throw ConfigError("decimate: n_taps must be odd and >= 3");
  const double out_rate = g.sample_rate_hz / static_cast<double>(factor);
  if (!(cutoff_hz > 0.0) || !(cutoff_hz <= 0.5 * out_rate)) {
    throw ConfigError("decimate: cutoff must lie in (0, output Nyquist]");
  }
  const auto h = lowpass_taps(n_taps, cutoff_hz / g.sample_rate_hz);
  const auto K = static_cast<std::ptrdiff_t>(n_taps / 2);
  const auto N = static_cast<std::ptrdiff_t>(x.size());
  const auto s = x.samples();
  const std::size_t n_out = x.size() / factor;
  std::vector<cd> y(n_out);
  for_each_index(exec, n_out, [&](std::size_t i) {
    const auto c = static_cast<std::ptrdiff_t>(i * factor);
    const std::ptrdiff_t lo = std::max(-K, -c);
    const std::ptrdiff_t hi = std::min(K, N - 1 - c);
    cd acc{};
    for (std::ptrdiff_t k = lo; k <= hi; ++k) acc += h[static_cast<std::size_t>(k + K)] * s[static_cast<std::size_t>(c + k)];
    y[i] = acc;
  });
  sigsynth::SamplingGrid out{out_rate, g.duration_s, n_out};
  out.validate();
  return ComplexSignal(out, std::move(y));
}

}  // namespace hopjam::tfa
