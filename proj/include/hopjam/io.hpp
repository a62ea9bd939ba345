#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace hopjam::io {

namespace fs = std::filesystem;

/// Writes `bytes` to `path` through a temporary sibling file and an atomic
/// rename, so readers never observe a partial file.
void write_file_atomic(const fs::path& path, std::span<const std::uint8_t> bytes);
void write_text_atomic(const fs::path& path, const std::string& text);

std::vector<std::uint8_t> read_file(const fs::path& path);
std::string read_text(const fs::path& path);

void append_f32_le(std::vector<std::uint8_t>& out, float v);
void append_f64_le(std::vector<std::uint8_t>& out, double v);
void append_u32_le(std::vector<std::uint8_t>& out, std::uint32_t v);
void append_u64_le(std::vector<std::uint8_t>& out, std::uint64_t v);

float read_f32_le(const std::uint8_t* p);
double read_f64_le(const std::uint8_t* p);
std::uint32_t read_u32_le(const std::uint8_t* p);
std::uint64_t read_u64_le(const std::uint8_t* p);

}  // namespace hopjam::io
