#include <filesystem>

#include "hopjam/error.hpp"
#include "hopjam/io.hpp"
#include "hopjam/tfa.hpp"

namespace hopjam::tfa {

using nlohmann::json;

namespace {

std::string stem_of(const std::string& path) {
  for (const char* ext : {".f32", ".json"}) {
    const std::string e(ext);
    if (path.size() > e.size() && path.compare(path.size() - e.size(), e.size(), e) == 0) {
      return path.substr(0, path.size() - e.size());
    }
  }
  return path;
}

}  // namespace

void write_spectrogram(const std::string& stem, const Spectrogram& sp) {
  sp.validate();
  std::vector<std::uint8_t> bytes;
  bytes.reserve(sp.values.size() * 4);
  for (double v : sp.values) io::append_f32_le(bytes, static_cast<float>(v));
  json side{{"format_version", kSpectrogramFormatVersion},
            {"dims", {sp.n_time, sp.n_freq}},
            {"layout", "row-major [time][freq], float32 little-endian"},
            {"axes", {{"time_s", sp.time_axis_s}, {"freq_hz", sp.freq_axis_hz}}},
            {"transform_kind", to_string(sp.kind)},
            {"edge_affected", sp.edge_affected},
            {"params", sp.params}};
  io::write_file_atomic(stem + ".f32", bytes);
  io::write_text_atomic(stem + ".json", side.dump(2) + "\n");
}

Spectrogram read_spectrogram(const std::string& path) {
  const std::string stem = stem_of(path);
  if (!std::filesystem::exists(stem + ".json") || !std::filesystem::exists(stem + ".f32")) {
    throw IoError("spectrogram not found: " + stem + ".{f32,json}");
  }
  Spectrogram sp;
  try {
    const json side = json::parse(io::read_text(stem + ".json"));
    if (side.value("format_version", 0) != kSpectrogramFormatVersion) {
      throw IoError("unsupported spectrogram format_version in " + stem + ".json");
    }
    sp.n_time = side.at("dims").at(0).get<std::size_t>();
    sp.n_freq = side.at("dims").at(1).get<std::size_t>();
    sp.time_axis_s = side.at("axes").at("time_s").get<std::vector<double>>();
    sp.freq_axis_hz = side.at("axes").at("freq_hz").get<std::vector<double>>();
    sp.kind = transform_kind_from_string(side.at("transform_kind").get<std::string>());
    sp.edge_affected = side.value("edge_affected", std::vector<std::uint8_t>(sp.n_time, 0));
    sp.params = side.value("params", json::object());
  } catch (const json::exception& e) {
    throw IoError("malformed spectrogram sidecar " + stem + ".json: " + e.what());
  }
  const auto bytes = io::read_file(stem + ".f32");
  if (bytes.size() != sp.n_time * sp.n_freq * 4) throw IoError("spectrogram payload size mismatch in " + stem + ".f32");
  sp.values.resize(sp.n_time * sp.n_freq);
  for (std::size_t i = 0; i < sp.values.size(); ++i) sp.values[i] = io::read_f32_le(&bytes[4 * i]);
  sp.validate();
  return sp;
}

}  // namespace hopjam::tfa
