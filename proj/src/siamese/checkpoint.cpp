#include <cstring>

#include "hopjam/error.hpp"
#include "hopjam/io.hpp"
#include "hopjam/siamese.hpp"

namespace hopjam::siamese {
namespace {

constexpr char kMagic[8] = {'H', 'J', 'S', 'I', 'A', 'M', 'C', 'K'};

}  // namespace

void save_checkpoint(const std::string& path, const ModelParameters& params, std::uint64_t step,
                     const nlohmann::json& extra) {
  nlohmann::json groups = nlohmann::json::array();
  for (const auto& g : params.groups) groups.push_back({{"name", g.name}, {"shape", g.shape}});
  nlohmann::json header = {{"format_version", kCheckpointFormatVersion},
                           {"architecture", params.arch.to_json()},
                           {"step", step},
                           {"groups", groups}};
  if (!extra.is_null()) header["extra"] = extra;
  const std::string text = header.dump();

  std::vector<std::uint8_t> bytes(kMagic, kMagic + sizeof kMagic);
  io::append_u64_le(bytes, text.size());
  bytes.insert(bytes.end(), text.begin(), text.end());
  bytes.reserve(bytes.size() + 8 * params.count());
  for (const auto& g : params.groups) {
    for (double v : g.values) io::append_f64_le(bytes, v);
  }
  io::write_file_atomic(path, bytes);
}

Checkpoint load_checkpoint(const std::string& path) {
  const auto bytes = io::read_file(path);
  if (bytes.size() < 16 || std::memcmp(bytes.data(), kMagic, sizeof kMagic) != 0) {
    throw IoError(path + ": not a checkpoint file");
  }
  const std::uint64_t header_len = io::read_u64_le(bytes.data() + 8);
  if (header_len > bytes.size() - 16) throw IoError(path + ": truncated checkpoint header");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(bytes.begin() + 16, bytes.begin() + 16 + static_cast<std::ptrdiff_t>(header_len));
  } catch (const nlohmann::json::exception& e) {
    throw IoError(path + ": unreadable checkpoint header: " + e.what());
  }
  if (header.value("format_version", 0) != kCheckpointFormatVersion) {
    throw IoError(path + ": unsupported checkpoint format version");
  }
  Checkpoint ck;
  ck.params = ModelParameters::zeros(Architecture::from_json(header.at("architecture")));
  ck.step = header.value("step", std::uint64_t{0});
  if (header.contains("extra")) ck.extra = header["extra"];
  const auto& groups = header.at("groups");
  if (groups.size() != ck.params.groups.size()) throw IoError(path + ": parameter group count mismatch");
  std::size_t offset = 16 + header_len;
  if (bytes.size() - offset != 8 * ck.params.count()) throw IoError(path + ": parameter payload size mismatch");
  for (std::size_t gi = 0; gi < groups.size(); ++gi) {
    auto& g = ck.params.groups[gi];
    if (groups[gi].at("name").get<std::string>() != g.name ||
        groups[gi].at("shape").get<std::vector<std::size_t>>() != g.shape) {
      throw IoError(path + ": parameter group '" + g.name + "' does not match the architecture");
    }
    for (auto& v : g.values) {
      v = io::read_f64_le(bytes.data() + offset);
      offset += 8;
    }
  }
  return ck;
}

}  // namespace hopjam::siamese
