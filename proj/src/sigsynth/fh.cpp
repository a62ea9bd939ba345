#include <cmath>
#include <numbers>

#include "detail.hpp"
#include "hopjam/error.hpp"
#include "hopjam/rng.hpp"
#include "hopjam/sigsynth.hpp"

namespace hopjam::sigsynth {

FhParams FhParams::standard(std::size_t n_hop_freqs, double band_low_hz, double band_high_hz,
                            double hop_rate) {
  FhParams fh;
  fh.n_hop_freqs = n_hop_freqs;
  fh.band_low_hz = band_low_hz;
  fh.band_high_hz = band_high_hz;
  fh.hop_rate_hops_per_s = hop_rate;
  fh.symbol_rate_hz = 10.0 * hop_rate;
  fh.freq_set_hz.resize(n_hop_freqs);
  for (std::size_t i = 0; i < n_hop_freqs; ++i) {
    const double frac = n_hop_freqs > 1 ? static_cast<double>(i) / static_cast<double>(n_hop_freqs - 1) : 0.0;
    fh.freq_set_hz[i] = band_low_hz + frac * (band_high_hz - band_low_hz);
  }
  return fh;
}

void FhParams::validate() const {
  if (freq_set_hz.empty()) throw ConfigError("fh: empty frequency set");
  if (n_hop_freqs != freq_set_hz.size()) {
    throw ConfigError("fh: n_hop_freqs does not match freq_set_hz length");
  }
  if (!(band_low_hz >= 0.0) || !(band_high_hz > band_low_hz)) throw ConfigError("fh: invalid band");
  for (std::size_t i = 0; i < freq_set_hz.size(); ++i) {
    const double f = freq_set_hz[i];
    if (!(f >= band_low_hz && f <= band_high_hz)) {
      throw ConfigError("fh: frequency " + std::to_string(f) + " Hz outside the declared band");
    }
    if (i > 0 && !(f > freq_set_hz[i - 1])) throw ConfigError("fh: freq_set_hz must be increasing");
  }
  if (!(hop_rate_hops_per_s > 0.0)) throw ConfigError("fh: hop rate must be positive");
  if (!(symbol_rate_hz > 0.0)) throw ConfigError("fh: symbol rate must be positive");
  if (!(amplitude > 0.0)) throw ConfigError("fh: amplitude must be positive");
}

namespace {

std::size_t hop_count(const FhParams& fh, const SamplingGrid& grid) {
  const double last_t = grid.time_of(grid.n_samples - 1);
  return static_cast<std::size_t>(std::floor(last_t * fh.hop_rate_hops_per_s)) + 1;
}

}  // namespace

std::vector<std::size_t> hop_schedule(const FhParams& fh, const SamplingGrid& grid) {
  fh.validate();
  grid.validate();
  const std::size_t n_hops = hop_count(fh, grid);
  const std::size_t k = fh.freq_set_hz.size();
  Rng rng = make_rng(fh.hop_sequence_seed);
  std::vector<std::size_t> seq;
  seq.reserve(n_hops);
  for (std::size_t h = 0; h < n_hops; ++h) {
    if (h == 0 || k == 1) {
      seq.push_back(std::uniform_int_distribution<std::size_t>(0, k - 1)(rng));
    } else {
      // Uniform over the k - 1 frequencies other than the previous one.
      std::size_t pick = std::uniform_int_distribution<std::size_t>(0, k - 2)(rng);
      if (pick >= seq.back()) ++pick;
      seq.push_back(pick);
    }
  }
  return seq;
}

ComplexSignal gen_fh_signal(const FhParams& fh, const SamplingGrid& grid, std::uint64_t seed) {
  fh.validate();
  grid.validate();
  if (fh.freq_set_hz.back() >= grid.nyquist_hz()) {
    throw ConfigError("fh: highest hop frequency violates Nyquist for the sampling grid");
  }
  const auto hops = hop_schedule(fh, grid);

  Rng rng = make_rng(derive_seed(seed, "fh-data"));
  std::uniform_real_distribution<double> uphase(0.0, 1.0);
  std::vector<double> hop_phase_cycles(hops.size());
  for (auto& p : hop_phase_cycles) p = uphase(rng);

  const double last_t = grid.time_of(grid.n_samples - 1);
  const std::size_t n_symbols = static_cast<std::size_t>(std::floor(last_t * fh.symbol_rate_hz)) + 1;
  std::vector<double> bit_cycles(n_symbols);  // 0 or 1/2 cycle
  std::bernoulli_distribution coin(0.5);
  for (auto& b : bit_cycles) b = coin(rng) ? 0.5 : 0.0;

  std::vector<cd> out(grid.n_samples);
  for (std::size_t n = 0; n < grid.n_samples; ++n) {
    const double t = grid.time_of(n);
    const auto h = std::min(static_cast<std::size_t>(std::floor(t * fh.hop_rate_hops_per_s)), hops.size() - 1);
    const auto s = std::min(static_cast<std::size_t>(std::floor(t * fh.symbol_rate_hz)), n_symbols - 1);
    const double f = fh.freq_set_hz[hops[h]];
    out[n] = fh.amplitude * detail::phasor(f * t + hop_phase_cycles[h] + bit_cycles[s]);
  }
  return ComplexSignal(grid, std::move(out));
}

}  // namespace hopjam::sigsynth
