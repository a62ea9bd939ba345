#include <algorithm>
#include <cmath>

#include "hopjam/error.hpp"
#include "hopjam/imgprep.hpp"
#include "hopjam/jsonutil.hpp"

namespace hopjam::imgprep {

GrayImage normalize(const GrayImage& img, double a_min, double a_max) {
  if (!(a_min < a_max)) throw ConfigError("normalize: a_min must be below a_max");
  GrayImage out = img;
  out.range_max = 1.0;
  const double span = a_max - a_min;
  for (double& v : out.pixels) {
    if (!std::isfinite(v)) throw NumericalError("normalize: non-finite pixel");
    v = v <= a_min ? 0.0 : v >= a_max ? 1.0 : (v - a_min) / span;
  }
  return out;
}

BinarizeResult binarize_detailed(const GrayImage& img, double tol, std::size_t max_iterations) {
  BinarizeResult r;
  r.image = BinaryImage(img.height, img.width);
  r.image.freq_axis_hz = img.freq_axis_hz;
  if (img.pixels.empty()) {
    r.converged = true;
    return r;
  }
  const auto [lo, hi] = std::minmax_element(img.pixels.begin(), img.pixels.end());
  double T = 0.5 * (*lo + *hi);
  while (r.iterations < max_iterations) {
    ++r.iterations;
    double s1 = 0.0, s2 = 0.0;
    std::size_t n1 = 0, n2 = 0;
    for (double v : img.pixels) {
      if (v > T) {
        s1 += v;
        ++n1;
      } else {
        s2 += v;
        ++n2;
      }
    }
    if (n1 == 0) {
      r.converged = true;
      break;
    }
    const double mu1 = s1 / static_cast<double>(n1);
    const double mu2 = n2 == 0 ? 0.0 : s2 / static_cast<double>(n2);
    const double next = 0.5 * (mu1 + mu2);
    const double delta = std::abs(next - T);
    T = next;
    if (delta <= tol) {
      r.converged = true;
      break;
    }
  }
  r.threshold = T;
  for (std::size_t i = 0; i < img.pixels.size(); ++i) r.image.pixels[i] = img.pixels[i] >= T ? 1 : 0;
  return r;
}

BinaryImage binarize(const GrayImage& img) { return binarize_detailed(img).image; }

GrayImage as_gray(const BinaryImage& img) {
  GrayImage g(img.height, img.width, 0.0, 1.0);
  g.freq_axis_hz = img.freq_axis_hz;
  for (std::size_t i = 0; i < img.pixels.size(); ++i) g.pixels[i] = img.pixels[i];
  return g;
}

BinaryImage binarize(const BinaryImage& img) { return binarize(as_gray(img)); }

namespace {

std::pair<std::size_t, std::size_t> crop_rows(const std::vector<double>& axis, std::size_t height, double low_hz,
                                              double high_hz, double margin) {
  if (axis.size() != height) throw CropError("crop: image has no frequency axis");
  if (!(low_hz <= high_hz) || !(margin >= 0.0)) throw ConfigError("crop: invalid band");
  const double lo = low_hz * (1.0 - margin);
  const double hi = high_hz * (1.0 + margin);
  std::size_t first = height, last = 0;
  for (std::size_t r = 0; r < height; ++r) {
    if (axis[r] >= lo && axis[r] <= hi) {
      first = std::min(first, r);
      last = r;
    }
  }
  if (first == height) throw CropError("crop: band does not intersect the frequency axis");
  return {first, last + 1};
}

template <class Image>
Image crop_impl(const Image& img, double low_hz, double high_hz, double margin) {
  const auto [r0, r1] = crop_rows(img.freq_axis_hz, img.height, low_hz, high_hz, margin);
  Image out = img;
  out.height = r1 - r0;
  out.pixels.assign(img.pixels.begin() + static_cast<std::ptrdiff_t>(r0 * img.width),
                    img.pixels.begin() + static_cast<std::ptrdiff_t>(r1 * img.width));
  out.freq_axis_hz.assign(img.freq_axis_hz.begin() + static_cast<std::ptrdiff_t>(r0),
                          img.freq_axis_hz.begin() + static_cast<std::ptrdiff_t>(r1));
  return out;
}

template <class Image>
Image resize_impl(const Image& img, std::size_t side) {
  if (side == 0) throw ConfigError("resize: side must be at least 1");
  if (img.height == 0 || img.width == 0) throw DimensionError("resize: empty image");
  Image out = img;
  out.height = side;
  out.width = side;
  out.pixels.resize(side * side);
  std::vector<std::size_t> cols(side);
  for (std::size_t j = 0; j < side; ++j) cols[j] = nn_source_index(j, img.width, side);
  for (std::size_t i = 0; i < side; ++i) {
    const std::size_t r = nn_source_index(i, img.height, side);
    for (std::size_t j = 0; j < side; ++j) out.pixels[i * side + j] = img.pixels[r * img.width + cols[j]];
  }
  if (img.freq_axis_hz.size() == img.height) {
    out.freq_axis_hz.resize(side);
    for (std::size_t i = 0; i < side; ++i) out.freq_axis_hz[i] = img.freq_axis_hz[nn_source_index(i, img.height, side)];
  } else {
    out.freq_axis_hz.clear();
  }
  return out;
}

}  // namespace

GrayImage crop_band(const GrayImage& img, double low_hz, double high_hz, double margin_frac) {
  return crop_impl(img, low_hz, high_hz, margin_frac);
}

BinaryImage crop_band(const BinaryImage& img, double low_hz, double high_hz, double margin_frac) {
  return crop_impl(img, low_hz, high_hz, margin_frac);
}

std::size_t nn_source_index(std::size_t i, std::size_t in_size, std::size_t out_size) {
  // round-half-down(i * in / out) = ceil(i * in / out - 1/2), in integers.
  const std::size_t q = i * in_size;
  const std::size_t idx = (2 * q + out_size - 1) / (2 * out_size);
  return std::min(idx, in_size - 1);
}

GrayImage resize_nn(const GrayImage& img, std::size_t side) { return resize_impl(img, side); }
BinaryImage resize_nn(const BinaryImage& img, std::size_t side) { return resize_impl(img, side); }

std::vector<double> CompositeImage::to_tensor() const {
  std::vector<double> t;
  t.reserve(3 * height() * width());
  for (const auto& c : channels) {
    for (auto v : c.pixels) t.push_back(static_cast<double>(v));
  }
  return t;
}

CompositeImage compose(const BinaryImage& r, const BinaryImage& g, const BinaryImage& b) {
  for (const auto* c : {&g, &b}) {
    if (c->height != r.height || c->width != r.width) throw DimensionError("compose: channel sizes differ");
  }
  return CompositeImage{{r, g, b}};
}

std::array<BinaryImage, 3> decompose(const CompositeImage& img) { return img.channels; }

void PrepParams::validate() const {
  if (!(a_min < a_max)) throw ConfigError("imgprep: a_min must be below a_max");
  if (!(binarize_tol > 0.0) || binarize_max_iterations == 0) throw ConfigError("imgprep: invalid binarization limits");
  if (!(crop_low_hz <= crop_high_hz) || !(crop_margin >= 0.0)) throw ConfigError("imgprep: invalid crop band");
  if (side == 0) throw ConfigError("imgprep: side must be at least 1");
}

nlohmann::json PrepParams::to_json() const {
  return {{"a_min", a_min},
          {"a_max", a_max},
          {"binarize_tol", binarize_tol},
          {"binarize_max_iterations", binarize_max_iterations},
          {"crop_band_hz", {crop_low_hz, crop_high_hz}},
          {"crop_margin", crop_margin},
          {"side", side}};
}

PrepParams PrepParams::from_json(const nlohmann::json& j) {
  using jsonutil::get_or;
  const std::string where = "imgprep";
  PrepParams p;
  p.a_min = get_or(j, "a_min", p.a_min, where);
  p.a_max = get_or(j, "a_max", p.a_max, where);
  p.binarize_tol = get_or(j, "binarize_tol", p.binarize_tol, where);
  p.binarize_max_iterations = get_or(j, "binarize_max_iterations", p.binarize_max_iterations, where);
  const auto band = get_or<std::vector<double>>(j, "crop_band_hz", {p.crop_low_hz, p.crop_high_hz}, where);
  if (band.size() != 2) throw ConfigError("imgprep: crop_band_hz must have two entries");
  p.crop_low_hz = band[0];
  p.crop_high_hz = band[1];
  p.crop_margin = get_or(j, "crop_margin", p.crop_margin, where);
  p.side = get_or(j, "side", p.side, where);
  return p;
}

ChannelResult prepare_channel(const GrayImage& gray, const PrepParams& params) {
  params.validate();
  ChannelResult out;
  out.zero_energy = std::all_of(gray.pixels.begin(), gray.pixels.end(), [](double v) { return v == 0.0; });
  BinaryImage bin;
  if (out.zero_energy) {
    bin = BinaryImage(gray.height, gray.width, 0);
    bin.freq_axis_hz = gray.freq_axis_hz;
    out.binarization.image = bin;
    out.binarization.converged = true;
  } else {
    out.binarization =
        binarize_detailed(normalize(gray, params.a_min, params.a_max), params.binarize_tol, params.binarize_max_iterations);
    bin = out.binarization.image;
  }
  out.image = resize_nn(crop_band(bin, params.crop_low_hz, params.crop_high_hz, params.crop_margin), params.side);
  return out;
}

}  // namespace hopjam::imgprep
