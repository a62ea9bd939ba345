#pragma once

// Spectrogram image preparation: threshold normalization, iterative global
// binarization, frequency-band cropping, nearest-neighbour resizing and
// three-channel compositing.

#include <array>
#include <string>

#include <json.hpp>

#include "hopjam/image.hpp"

namespace hopjam::imgprep {

/// Piecewise map: <= a_min -> 0, >= a_max -> 1, linear in between.
/// Throws ConfigError unless a_min < a_max.
GrayImage normalize(const GrayImage& img, double a_min = 0.0, double a_max = 137.0);

struct BinarizeResult {
  BinaryImage image;
  double threshold = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

/// Iterative global threshold: T0 = (max + min) / 2, then T <- (mu1 + mu2) / 2
/// with mu1 the mean of pixels > T and mu2 the mean of the rest, until
/// |dT| <= tol.  An empty upper class stops the iteration at the current T; an
/// empty lower class counts as mean 0.  Output is 1 where pixel >= T.
BinarizeResult binarize_detailed(const GrayImage& img, double tol = 1e-3, std::size_t max_iterations = 100);
BinaryImage binarize(const GrayImage& img);
/// Binary input viewed as a {0, 1} gray image.
BinaryImage binarize(const BinaryImage& img);

GrayImage as_gray(const BinaryImage& img);

/// Keeps the rows whose frequency lies in [low (1 - margin), high (1 + margin)];
/// all columns are kept.  Throws CropError when no row qualifies.
GrayImage crop_band(const GrayImage& img, double low_hz, double high_hz, double margin_frac = 0.05);
BinaryImage crop_band(const BinaryImage& img, double low_hz, double high_hz, double margin_frac = 0.05);

/// Source row of output row i: round-half-down(i * H / side), clamped to H - 1;
/// likewise for columns.  The frequency axis follows the sampled rows.
GrayImage resize_nn(const GrayImage& img, std::size_t side);
BinaryImage resize_nn(const BinaryImage& img, std::size_t side);
/// The index map shared by both overloads.
std::size_t nn_source_index(std::size_t i, std::size_t in_size, std::size_t out_size);

enum Channel : std::size_t { kWaveletChannel = 0, kMhdChannel = 1, kBjdChannel = 2 };

/// Three binary channels of equal size: R = wavelet, G = MHD, B = BJD.
struct CompositeImage {
  std::array<BinaryImage, 3> channels;

  std::size_t height() const { return channels[0].height; }
  std::size_t width() const { return channels[0].width; }
  /// Network input: CHW, values in {0, 1}.
  std::vector<double> to_tensor() const;

  bool operator==(const CompositeImage&) const = default;
};

/// Throws DimensionError when the channel sizes differ.
CompositeImage compose(const BinaryImage& r, const BinaryImage& g, const BinaryImage& b);
std::array<BinaryImage, 3> decompose(const CompositeImage& img);

struct PrepParams {
  double a_min = 0.0;
  double a_max = 137.0;
  double binarize_tol = 1e-3;
  std::size_t binarize_max_iterations = 100;
  double crop_low_hz = 0.0;
  double crop_high_hz = 220e3;
  double crop_margin = 0.05;
  std::size_t side = 105;

  void validate() const;
  nlohmann::json to_json() const;
  static PrepParams from_json(const nlohmann::json& j);
};

struct ChannelResult {
  BinaryImage image;
  BinarizeResult binarization;  // iterations = 0 for a zero-energy channel
  bool zero_energy = false;
};

/// to_gray output -> normalize -> binarize -> crop -> resize.  A channel whose
/// gray image is identically zero carries no information and is rendered
/// all-black instead of passing through the constant-image rule.
ChannelResult prepare_channel(const GrayImage& gray, const PrepParams& params);

// ---- files --------------------------------------------------------------------

inline constexpr int kCompositeFormatVersion = 1;

/// Binary PGM (P5).  Gray pixels are scaled from [0, range_max] to 0..255;
/// binary pixels map to 0 / 255.  The top row of the file is the highest
/// frequency so that viewers show the usual spectrogram orientation.
void write_pgm(const std::string& path, const GrayImage& img);
void write_pgm(const std::string& path, const BinaryImage& img);
/// Inverse of write_pgm for gray images (range 255, row 0 = lowest frequency).
GrayImage read_pgm(const std::string& path);

/// <stem>.ppm (P6, one byte per channel, 0 or 255, same row order as PGM)
/// plus <stem>.json {format_version, channels, freq_axis_hz, meta}.
void write_composite(const std::string& stem, const CompositeImage& img, const nlohmann::json& meta = {});
CompositeImage read_composite(const std::string& path);

}  // namespace hopjam::imgprep
