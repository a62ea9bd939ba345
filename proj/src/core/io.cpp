#include "hopjam/io.hpp"

#include <atomic>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <unistd.h>

#include "hopjam/error.hpp"

namespace hopjam::io {
namespace {

std::atomic<unsigned> g_tmp_counter{0};

fs::path temp_sibling(const fs::path& path) {
  auto name = path.filename().string();
  name = "." + name + ".tmp." + std::to_string(::getpid()) + "." +
         std::to_string(g_tmp_counter.fetch_add(1));
  return path.parent_path() / name;
}

static_assert(std::endian::native == std::endian::little,
              "binary formats assume a little-endian host");

}  // namespace

void write_file_atomic(const fs::path& path, std::span<const std::uint8_t> bytes) {
  if (!path.parent_path().empty()) fs::create_directories(path.parent_path());
  const fs::path tmp = temp_sibling(path);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + tmp.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw IoError("write failed: " + tmp.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("rename failed: " + path.string());
  }
}

void write_text_atomic(const fs::path& path, const std::string& text) {
  write_file_atomic(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

std::vector<std::uint8_t> read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void append_f32_le(std::vector<std::uint8_t>& out, float v) {
  append_u32_le(out, std::bit_cast<std::uint32_t>(v));
}
void append_f64_le(std::vector<std::uint8_t>& out, double v) {
  append_u64_le(out, std::bit_cast<std::uint64_t>(v));
}
void append_u32_le(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}
void append_u64_le(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t read_u32_le(const std::uint8_t* p) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(p[i]) << (8 * i);
  return v;
}
std::uint64_t read_u64_le(const std::uint8_t* p) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
  return v;
}
float read_f32_le(const std::uint8_t* p) { return std::bit_cast<float>(read_u32_le(p)); }
double read_f64_le(const std::uint8_t* p) { return std::bit_cast<double>(read_u64_le(p)); }

}  // namespace hopjam::io
