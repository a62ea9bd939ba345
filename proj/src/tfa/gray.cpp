#include <algorithm>
#include <cmath>

#include "hopjam/error.hpp"
#include "hopjam/tfa.hpp"

namespace hopjam::tfa {

GrayImage to_gray(const Spectrogram& sp) {
  sp.validate();
  double peak = 0.0;
  for (double v : sp.values) peak = std::max(peak, std::abs(v));
  GrayImage img(sp.n_freq, sp.n_time, 0.0, 255.0);
  img.freq_axis_hz = sp.freq_axis_hz;
  if (peak == 0.0) return img;
  const double gain = 255.0 / peak;
  for (std::size_t t = 0; t < sp.n_time; ++t) {
    for (std::size_t f = 0; f < sp.n_freq; ++f) img.at(f, t) = std::min(255.0, std::abs(sp.at(t, f)) * gain);
  }
  return img;
}

}  // namespace hopjam::tfa
