#pragma once

// Time-frequency analysis: Morlet continuous wavelet transform and the
// Margenau-Hill and Born-Jordan bilinear distributions, all evaluated on a
// shared, calibrated (seconds, Hz) grid.
//
// Every transform has a serial reference kernel and an OpenMP kernel selected
// with Exec; the two are bit-identical.

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "hopjam/exec.hpp"
#include "hopjam/image.hpp"
#include "hopjam/sigsynth.hpp"

namespace hopjam::tfa {

using cd = std::complex<double>;
using sigsynth::ComplexSignal;

enum class TransformKind { Wavelet, MHD, BJD };
const char* to_string(TransformKind kind);
TransformKind transform_kind_from_string(const std::string& name);

enum class LagWindow { Rectangular, Hamming };

struct TfGridSpec {
  std::size_t n_time_bins = 256;
  std::size_t n_freq_bins = 256;
  double freq_low_hz = 0.0;
  double freq_high_hz = 250e3;
  /// Odd number of lag taps of the bilinear distributions; 0 means
  /// unwindowed (every lag the record supports).
  std::size_t window_length = 257;
  LagWindow window = LagWindow::Hamming;
  /// Explicit wavelet scales in seconds, strictly increasing.  Empty: one
  /// scale per frequency bin through f = w0 / (2 pi a).
  std::vector<double> scale_set;
  double morlet_w0 = 6.0;
  /// Born-Jordan averaging constant: u ranges over [t - a|tau|, t + a|tau|].
  double bjd_a = 0.5;
  /// Morlet taps are kept out to this many envelope widths.
  double wavelet_support_sigmas = 7.0;

  void validate(double sample_rate_hz) const;

  /// Bin centres, low + (k + 1/2) (high - low) / n.
  std::vector<double> freq_axis_hz() const;
  /// Wavelet scales (seconds) in ascending order.
  std::vector<double> wavelet_scales() const;
  /// Sample index of each time bin: floor((j + 1/2) n_samples / n_time_bins).
  std::vector<std::size_t> time_indices(std::size_t n_samples) const;
  /// Lag window taps h(m), m = -M..M; unit weights when unwindowed.
  std::vector<double> lag_window(std::size_t half_length) const;

  nlohmann::json to_json() const;
  static TfGridSpec from_json(const nlohmann::json& j);
};

/// Real time x frequency matrix, values[t * n_freq + f].
struct Spectrogram {
  TransformKind kind = TransformKind::Wavelet;
  std::size_t n_time = 0;
  std::size_t n_freq = 0;
  std::vector<double> values;
  std::vector<double> time_axis_s;
  std::vector<double> freq_axis_hz;
  /// Per time bin: 1 when the analysis window reaches past the record ends.
  std::vector<std::uint8_t> edge_affected;
  nlohmann::json params;

  double at(std::size_t t, std::size_t f) const { return values[t * n_freq + f]; }
  double& at(std::size_t t, std::size_t f) { return values[t * n_freq + f]; }
  void validate() const;
};

/// Morlet mother wavelet pi^(-1/4) exp(i w0 t - t^2 / 2).
cd morlet(double t, double w0);

/// Complex coefficients CWT(a, b) = (1/sqrt a) sum_n x(t_n) conj(phi((t_n - b)/a)) dt,
/// laid out [time][freq] like Spectrogram::values.  Rows follow ascending
/// frequency, i.e. descending scale.
std::vector<cd> cwt_complex(const ComplexSignal& x, const TfGridSpec& grid, Exec exec = Exec::parallel);

/// Scalogram |CWT|.  Throws ResolutionError when a scale spans fewer than 8
/// samples of its +-3 sigma envelope.
Spectrogram cwt(const ComplexSignal& x, const TfGridSpec& grid, Exec exec = Exec::parallel);

/// Signed (pseudo) Margenau-Hill distribution,
/// Re{ x(t) e^{-i 2 pi f t} conj(STFT_h(t, f)) }; with window_length == 0 the
/// STFT becomes the record spectrum X(f).
Spectrogram mhd(const ComplexSignal& x, const TfGridSpec& grid, Exec exec = Exec::parallel);

/// Signed Born-Jordan distribution: local autocorrelation averaged uniformly
/// over the lag-proportional window, then Fourier transformed over lag.
Spectrogram bjd(const ComplexSignal& x, const TfGridSpec& grid, Exec exec = Exec::parallel);

Spectrogram transform(TransformKind kind, const ComplexSignal& x, const TfGridSpec& grid,
                      Exec exec = Exec::parallel);

/// Low-pass filters (windowed-sinc, Blackman) and keeps every `factor`-th
/// sample.  The filter is zero-phase; the output grid has rate fs / factor.
ComplexSignal decimate(const ComplexSignal& x, std::size_t factor, double cutoff_hz,
                       std::size_t n_taps = 513, Exec exec = Exec::parallel);

/// |values| mapped affinely onto [0, 255], per-image maximum -> 255;
/// transposed so that row 0 is the lowest frequency.  All-zero input gives an
/// all-zero image.
GrayImage to_gray(const Spectrogram& sp);

inline constexpr int kSpectrogramFormatVersion = 1;

/// <stem>.f32 (little-endian float32, [time][freq]) plus <stem>.json
/// {dims, axes, transform_kind, params, edge_affected, format_version}.
void write_spectrogram(const std::string& stem, const Spectrogram& sp);
Spectrogram read_spectrogram(const std::string& path);

}  // namespace hopjam::tfa
