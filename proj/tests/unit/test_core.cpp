#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>
#include <set>

#include "hopjam/error.hpp"
#include "hopjam/exec.hpp"
#include "hopjam/fft.hpp"
#include "hopjam/io.hpp"
#include "hopjam/rng.hpp"

using namespace hopjam;
using fft::cd;

namespace {

std::vector<cd> naive_dft(const std::vector<cd>& x) {
  const std::size_t n = x.size();
  std::vector<cd> y(n);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t t = 0; t < n; ++t) {
      y[k] += x[t] * std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>((k * t) % n) / static_cast<double>(n));
    }
  }
  return y;
}

std::vector<cd> random_vec(std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::vector<cd> v(n);
  for (auto& x : v) x = {g(rng), g(rng)};
  return v;
}

}  // namespace

TEST_CASE("fft matches the naive DFT for every radix path") {
  for (std::size_t n : {1, 2, 3, 4, 5, 7, 8, 12, 16, 25, 60, 97, 100, 131, 250, 640, 1000}) {
    const auto x = random_vec(n, static_cast<unsigned>(n));
    const auto ref = naive_dft(x);
    const auto got = fft::forward_copy(x);
    double err = 0.0, mag = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      err = std::max(err, std::abs(got[k] - ref[k]));
      mag = std::max(mag, std::abs(ref[k]));
    }
    CHECK_MESSAGE(err <= 1e-11 * mag, "n = " << n);
    auto back = got;
    fft::inverse(back);
    for (std::size_t k = 0; k < n; ++k) CHECK(std::abs(back[k] - x[k]) < 1e-11);
  }
}

TEST_CASE("analytic signal of a cosine is the complex exponential") {
  const std::size_t n = 200;
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = std::cos(2.0 * std::numbers::pi * 13.0 * static_cast<double>(i) / n);
  const auto z = fft::analytic_from_real(x);
  for (std::size_t i = 0; i < n; ++i) {
    CHECK(z[i].real() == x[i]);
    CHECK(std::abs(z[i] - std::polar(1.0, 2.0 * std::numbers::pi * 13.0 * static_cast<double>(i) / n)) < 1e-12);
  }
}

TEST_CASE("seed derivation is deterministic and separates streams") {
  CHECK(derive_seed(1, std::uint64_t{5}) == derive_seed(1, std::uint64_t{5}));
  std::set<std::uint64_t> seen;
  for (std::uint64_t s = 0; s < 50; ++s) {
    for (std::uint64_t c = 0; c < 50; ++c) seen.insert(derive_seed(s, c));
  }
  CHECK(seen.size() == 2500);
  CHECK(derive_seed(3, "fh") != derive_seed(3, "noise"));
  auto a = make_rng(9), b = make_rng(9);
  CHECK(a() == b());
}

TEST_CASE("atomic writes and little-endian helpers") {
  const auto dir = std::filesystem::temp_directory_path() / "hopjam_core_test";
  std::filesystem::remove_all(dir);
  std::vector<std::uint8_t> bytes;
  io::append_f64_le(bytes, -1.25);
  io::append_u32_le(bytes, 0xA1B2C3D4u);
  io::append_f32_le(bytes, 3.5f);
  io::append_u64_le(bytes, 0x0102030405060708ull);
  CHECK(bytes[8] == 0xD4);
  io::write_file_atomic(dir / "sub" / "b.bin", bytes);
  const auto back = io::read_file(dir / "sub" / "b.bin");
  CHECK(back == bytes);
  CHECK(io::read_f64_le(&back[0]) == -1.25);
  CHECK(io::read_u32_le(&back[8]) == 0xA1B2C3D4u);
  CHECK(io::read_f32_le(&back[12]) == 3.5f);
  CHECK(io::read_u64_le(&back[16]) == 0x0102030405060708ull);
  std::size_t files = 0;
  for (const auto& e : std::filesystem::directory_iterator(dir / "sub")) files += e.is_regular_file() ? 1 : 0;
  CHECK(files == 1);  // no temporary left behind
  CHECK_THROWS_AS(io::read_file(dir / "missing"), IoError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("for_each_index visits every index once in both modes") {
  for (auto exec : {Exec::serial, Exec::parallel}) {
    std::vector<int> hits(1000, 0);
    for_each_index(exec, hits.size(), [&](std::size_t i) { hits[i] += 1; });
    CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
  }
}
