#pragma once

#include <cstdint>
#include <vector>

namespace hopjam {

/// Real-valued image, row-major.  Row 0 is the lowest frequency, column 0 the
/// earliest time.  `range_max` is 255 for gray spectrograms and 1 after
/// normalization.
struct GrayImage {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<double> pixels;
  std::vector<double> freq_axis_hz;  // one entry per row, may be empty
  double range_max = 255.0;

  GrayImage() = default;
  GrayImage(std::size_t h, std::size_t w, double fill = 0.0, double range = 255.0)
      : height(h), width(w), pixels(h * w, fill), range_max(range) {}

  double& at(std::size_t r, std::size_t c) { return pixels[r * width + c]; }
  double at(std::size_t r, std::size_t c) const { return pixels[r * width + c]; }

  bool operator==(const GrayImage&) const = default;
};

/// Two-valued image with entries in {0, 1}.
struct BinaryImage {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<std::uint8_t> pixels;
  std::vector<double> freq_axis_hz;

  BinaryImage() = default;
  BinaryImage(std::size_t h, std::size_t w, std::uint8_t fill = 0) : height(h), width(w), pixels(h * w, fill) {}

  std::uint8_t& at(std::size_t r, std::size_t c) { return pixels[r * width + c]; }
  std::uint8_t at(std::size_t r, std::size_t c) const { return pixels[r * width + c]; }

  bool operator==(const BinaryImage&) const = default;
};

}  // namespace hopjam
