#include <algorithm>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <sstream>

#include "hopjam/error.hpp"
#include "hopjam/imgprep.hpp"
#include "hopjam/io.hpp"

namespace hopjam::imgprep {

using nlohmann::json;

namespace {

std::vector<std::uint8_t> pnm_header(const char* magic, std::size_t width, std::size_t height) {
  const std::string h = std::string(magic) + "\n" + std::to_string(width) + " " + std::to_string(height) + "\n255\n";
  return {h.begin(), h.end()};
}

struct Pnm {
  std::string magic;
  std::size_t width = 0, height = 0;
  std::vector<std::uint8_t> data;
};

Pnm parse_pnm(const std::vector<std::uint8_t>& bytes, const std::string& path) {
  std::size_t pos = 0;
  auto token = [&]() {
    while (pos < bytes.size()) {
      if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(bytes[pos])) {
        ++pos;
      } else {
        break;
      }
    }
    std::string t;
    while (pos < bytes.size() && !std::isspace(bytes[pos])) t.push_back(static_cast<char>(bytes[pos++]));
    return t;
  };
  Pnm p;
  try {
    p.magic = token();
    p.width = std::stoul(token());
    p.height = std::stoul(token());
    if (std::stoul(token()) != 255) throw IoError("only 8-bit PNM files are supported: " + path);
  } catch (const std::logic_error&) {
    throw IoError("malformed PNM header: " + path);
  }
  ++pos;  // single whitespace after maxval
  const std::size_t channels = p.magic == "P6" ? 3 : 1;
  if ((p.magic != "P5" && p.magic != "P6") || bytes.size() < pos + channels * p.width * p.height) {
    throw IoError("malformed or truncated PNM file: " + path);
  }
  p.data.assign(bytes.begin() + static_cast<std::ptrdiff_t>(pos), bytes.end());
  return p;
}

std::string stem_of(const std::string& path) {
  for (const std::string e : {".ppm", ".json"}) {
    if (path.size() > e.size() && path.compare(path.size() - e.size(), e.size(), e) == 0) {
      return path.substr(0, path.size() - e.size());
    }
  }
  return path;
}

}  // namespace

void write_pgm(const std::string& path, const GrayImage& img) {
  auto out = pnm_header("P5", img.width, img.height);
  const double gain = img.range_max > 0.0 ? 255.0 / img.range_max : 0.0;
  for (std::size_t r = img.height; r-- > 0;) {
    for (std::size_t c = 0; c < img.width; ++c) {
      const double v = std::clamp(std::round(img.at(r, c) * gain), 0.0, 255.0);
      out.push_back(static_cast<std::uint8_t>(v));
    }
  }
  io::write_file_atomic(path, out);
}

void write_pgm(const std::string& path, const BinaryImage& img) {
  auto out = pnm_header("P5", img.width, img.height);
  for (std::size_t r = img.height; r-- > 0;) {
    for (std::size_t c = 0; c < img.width; ++c) out.push_back(img.at(r, c) ? 255 : 0);
  }
  io::write_file_atomic(path, out);
}

GrayImage read_pgm(const std::string& path) {
  if (!std::filesystem::exists(path)) throw IoError("image not found: " + path);
  const auto p = parse_pnm(io::read_file(path), path);
  if (p.magic != "P5") throw IoError("expected a P5 image: " + path);
  GrayImage img(p.height, p.width, 0.0, 255.0);
  for (std::size_t r = 0; r < p.height; ++r) {
    for (std::size_t c = 0; c < p.width; ++c) img.at(p.height - 1 - r, c) = p.data[r * p.width + c];
  }
  return img;
}

void write_composite(const std::string& stem, const CompositeImage& img, const json& meta) {
  const std::size_t H = img.height(), W = img.width();
  for (const auto& c : img.channels) {
    if (c.height != H || c.width != W) throw DimensionError("composite: channel sizes differ");
  }
  auto out = pnm_header("P6", W, H);
  for (std::size_t r = H; r-- > 0;) {
    for (std::size_t c = 0; c < W; ++c) {
      for (const auto& ch : img.channels) out.push_back(ch.at(r, c) ? 255 : 0);
    }
  }
  json side{{"format_version", kCompositeFormatVersion},
            {"channels", {"wavelet", "mhd", "bjd"}},
            {"orientation", "file row 0 = highest frequency"},
            {"height", H},
            {"width", W},
            {"freq_axis_hz", img.channels[0].freq_axis_hz},
            {"meta", meta.is_null() ? json::object() : meta}};
  io::write_file_atomic(stem + ".ppm", out);
  io::write_text_atomic(stem + ".json", side.dump(2) + "\n");
}

CompositeImage read_composite(const std::string& path) {
  const std::string stem = stem_of(path);
  if (!std::filesystem::exists(stem + ".ppm")) throw IoError("composite image not found: " + stem + ".ppm");
  const auto p = parse_pnm(io::read_file(stem + ".ppm"), stem + ".ppm");
  if (p.magic != "P6") throw IoError("expected a P6 image: " + stem + ".ppm");
  std::vector<double> axis;
  if (std::filesystem::exists(stem + ".json")) {
    try {
      const auto side = json::parse(io::read_text(stem + ".json"));
      if (side.value("format_version", 0) != kCompositeFormatVersion) {
        throw IoError("unsupported composite format_version in " + stem + ".json");
      }
      axis = side.value("freq_axis_hz", std::vector<double>{});
    } catch (const json::exception& e) {
      throw IoError("malformed composite sidecar " + stem + ".json: " + e.what());
    }
  }
  CompositeImage img;
  for (std::size_t ch = 0; ch < 3; ++ch) {
    auto& c = img.channels[ch];
    c = BinaryImage(p.height, p.width);
    c.freq_axis_hz = axis;
    for (std::size_t r = 0; r < p.height; ++r) {
      for (std::size_t col = 0; col < p.width; ++col) {
        const std::uint8_t v = p.data[3 * (r * p.width + col) + ch];
        if (v != 0 && v != 255) throw IoError("composite pixel is neither 0 nor 255: " + stem + ".ppm");
        c.at(p.height - 1 - r, col) = v ? 1 : 0;
      }
    }
  }
  return img;
}

}  // namespace hopjam::imgprep
