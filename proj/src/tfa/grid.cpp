#include <algorithm>
#include <cmath>
#include <numbers>

#include "hopjam/error.hpp"
#include "hopjam/jsonutil.hpp"
#include "hopjam/tfa.hpp"

namespace hopjam::tfa {

using nlohmann::json;

const char* to_string(TransformKind kind) {
  switch (kind) {
    case TransformKind::Wavelet: return "wavelet";
    case TransformKind::MHD: return "mhd";
    case TransformKind::BJD: return "bjd";
  }
  return "?";
}

TransformKind transform_kind_from_string(const std::string& name) {
  if (name == "wavelet") return TransformKind::Wavelet;
  if (name == "mhd") return TransformKind::MHD;
  if (name == "bjd") return TransformKind::BJD;
  throw ConfigError("unknown transform '" + name + "' (expected wavelet, mhd or bjd)");
}

void TfGridSpec::validate(double sample_rate_hz) const {
  if (n_time_bins == 0 || n_freq_bins == 0) throw ConfigError("tf grid: bin counts must be positive");
  if (!(freq_low_hz >= 0.0) || !(freq_high_hz > freq_low_hz) || !(freq_high_hz <= 0.5 * sample_rate_hz)) {
    throw ConfigError("tf grid: frequency range must satisfy 0 <= low < high <= Nyquist");
  }
  if (window_length != 0 && window_length % 2 == 0) throw ConfigError("tf grid: window_length must be odd");
  for (std::size_t i = 0; i < scale_set.size(); ++i) {
    if (!(scale_set[i] > 0.0)) throw ConfigError("tf grid: scales must be positive");
    if (i > 0 && !(scale_set[i] > scale_set[i - 1])) throw ConfigError("tf grid: scale_set must be strictly increasing");
  }
  if (!(morlet_w0 > 0.0)) throw ConfigError("tf grid: morlet_w0 must be positive");
  if (!(bjd_a > 0.0)) throw ConfigError("tf grid: bjd_a must be positive");
  if (!(wavelet_support_sigmas >= 3.0)) throw ConfigError("tf grid: wavelet_support_sigmas must be >= 3");
}

std::vector<double> TfGridSpec::freq_axis_hz() const {
  std::vector<double> f(n_freq_bins);
  const double df = (freq_high_hz - freq_low_hz) / static_cast<double>(n_freq_bins);
  for (std::size_t k = 0; k < n_freq_bins; ++k) f[k] = freq_low_hz + (static_cast<double>(k) + 0.5) * df;
  return f;
}

std::vector<double> TfGridSpec::wavelet_scales() const {
  if (!scale_set.empty()) return scale_set;
  const auto f = freq_axis_hz();
  std::vector<double> a(f.size());
  for (std::size_t k = 0; k < f.size(); ++k) a[f.size() - 1 - k] = morlet_w0 / (2.0 * std::numbers::pi * f[k]);
  return a;
}

std::vector<std::size_t> TfGridSpec::time_indices(std::size_t n_samples) const {
  if (n_time_bins > n_samples) throw DimensionError("tf grid: more time bins than samples");
  std::vector<std::size_t> idx(n_time_bins);
  for (std::size_t j = 0; j < n_time_bins; ++j) idx[j] = ((2 * j + 1) * n_samples) / (2 * n_time_bins);
  return idx;
}

std::vector<double> TfGridSpec::lag_window(std::size_t half_length) const {
  std::vector<double> h(2 * half_length + 1, 1.0);
  if (window_length == 0 || window == LagWindow::Rectangular || half_length == 0) return h;
  const double M = static_cast<double>(half_length);
  for (std::size_t i = 0; i < h.size(); ++i) {
    const double m = static_cast<double>(i) - M;
    h[i] = 0.54 + 0.46 * std::cos(std::numbers::pi * m / M);
  }
  return h;
}

json TfGridSpec::to_json() const {
  return json{{"n_time_bins", n_time_bins},
              {"n_freq_bins", n_freq_bins},
              {"freq_range_hz", {freq_low_hz, freq_high_hz}},
              {"window_length", window_length},
              {"window", window == LagWindow::Hamming ? "hamming" : "rectangular"},
              {"scale_set", scale_set},
              {"morlet_w0", morlet_w0},
              {"bjd_a", bjd_a},
              {"wavelet_support_sigmas", wavelet_support_sigmas}};
}

TfGridSpec TfGridSpec::from_json(const json& j) {
  using jsonutil::get_or;
  const std::string where = "tfa";
  TfGridSpec g;
  g.n_time_bins = get_or<std::size_t>(j, "n_time_bins", g.n_time_bins, where);
  g.n_freq_bins = get_or<std::size_t>(j, "n_freq_bins", g.n_freq_bins, where);
  const auto range = get_or<std::vector<double>>(j, "freq_range_hz", {g.freq_low_hz, g.freq_high_hz}, where);
  if (range.size() != 2) throw ConfigError("tfa: freq_range_hz must have two entries");
  g.freq_low_hz = range[0];
  g.freq_high_hz = range[1];
  g.window_length = get_or<std::size_t>(j, "window_length", g.window_length, where);
  const auto win = get_or<std::string>(j, "window", "hamming", where);
  if (win == "hamming") {
    g.window = LagWindow::Hamming;
  } else if (win == "rectangular") {
    g.window = LagWindow::Rectangular;
  } else {
    throw ConfigError("tfa: window must be 'hamming' or 'rectangular'");
  }
  g.scale_set = get_or<std::vector<double>>(j, "scale_set", {}, where);
  g.morlet_w0 = get_or<double>(j, "morlet_w0", g.morlet_w0, where);
  g.bjd_a = get_or<double>(j, "bjd_a", g.bjd_a, where);
  g.wavelet_support_sigmas = get_or<double>(j, "wavelet_support_sigmas", g.wavelet_support_sigmas, where);
  return g;
}

void Spectrogram::validate() const {
  if (values.size() != n_time * n_freq) throw DimensionError("spectrogram: value count does not match dims");
  if (time_axis_s.size() != n_time || freq_axis_hz.size() != n_freq) {
    throw DimensionError("spectrogram: axis lengths do not match dims");
  }
  for (double v : values) {
    if (!std::isfinite(v)) throw NumericalError("spectrogram: non-finite value");
  }
  if (!std::is_sorted(time_axis_s.begin(), time_axis_s.end(), std::less_equal<>()) ||
      !std::is_sorted(freq_axis_hz.begin(), freq_axis_hz.end(), std::less_equal<>())) {
    throw DimensionError("spectrogram: axes must be strictly increasing");
  }
}

Spectrogram transform(TransformKind kind, const ComplexSignal& x, const TfGridSpec& grid, Exec exec) {
  switch (kind) {
    case TransformKind::Wavelet: return cwt(x, grid, exec);
    case TransformKind::MHD: return mhd(x, grid, exec);
    case TransformKind::BJD: return bjd(x, grid, exec);
  }
  throw ConfigError("unknown transform kind");
}

}  // namespace hopjam::tfa
