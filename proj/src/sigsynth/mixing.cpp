#include <cmath>

#include "hopjam/error.hpp"
#include "hopjam/rng.hpp"
#include "hopjam/sigsynth.hpp"

namespace hopjam::sigsynth {
namespace {

constexpr double kLattice = 68719476736.0;  // 2^36
// Summands below 2^14 in magnitude: up to 8 of them sum below 2^17, so every
// partial sum is an integer multiple of 2^-36 that fits in 53 bits.
constexpr double kLatticeLimit = 16384.0;

cd snap(cd v) {
  if (std::abs(v.real()) >= kLatticeLimit || std::abs(v.imag()) >= kLatticeLimit) {
    throw NumericalError("mix: sample magnitude exceeds the exact-summation range");
  }
  return {std::nearbyint(v.real() * kLattice) / kLattice, std::nearbyint(v.imag() * kLattice) / kLattice};
}

}  // namespace

ComplexSignal gen_noise(const SamplingGrid& grid, double power, std::uint64_t seed) {
  grid.validate();
  if (!(power >= 0.0)) throw ConfigError("noise power must be non-negative");
  Rng rng = make_rng(seed);
  std::normal_distribution<double> nd(0.0, std::sqrt(0.5 * power));
  std::vector<cd> out(grid.n_samples);
  for (auto& v : out) {
    const double re = nd(rng);
    const double im = nd(rng);
    v = {re, im};
  }
  return ComplexSignal(grid, std::move(out));
}

double measure_jsr_db(const ComplexSignal& jam, const ComplexSignal& sig, AmplitudeMeasure measure) {
  const double vs = average_amplitude(sig, measure);
  const double vj = average_amplitude(jam, measure);
  if (!(vs > 0.0)) throw DegenerateInputError("JSR: reference signal has zero average amplitude");
  if (!(vj > 0.0)) throw DegenerateInputError("JSR: jamming signal has zero average amplitude");
  return 20.0 * std::log10(vj / vs);
}

ComplexSignal scale_to_jsr(const ComplexSignal& jam, const ComplexSignal& sig, double jsr_db,
                           AmplitudeMeasure measure) {
  if (!(jam.grid() == sig.grid())) throw DimensionError("scale_to_jsr: grids differ");
  const double vs = average_amplitude(sig, measure);
  const double vj = average_amplitude(jam, measure);
  if (!(vs > 0.0)) throw DegenerateInputError("scale_to_jsr: signal is all zero");
  if (!(vj > 0.0)) throw DegenerateInputError("scale_to_jsr: jamming signal is all zero");
  const double target = vs * std::pow(10.0, jsr_db / 20.0);
  return jam.scaled(target / vj);
}

ComplexSignal mix(const ComplexSignal& sig, std::span<const ComplexSignal> jams, const NoiseSpec& noise) {
  for (const auto& j : jams) {
    if (!(j.grid() == sig.grid())) throw DimensionError("mix: interference grid differs from signal grid");
  }
  if (jams.empty() && !noise.snr_db) return sig;

  std::vector<cd> acc(sig.size());
  for (std::size_t n = 0; n < sig.size(); ++n) acc[n] = snap(sig[n]);
  for (const auto& j : jams) {
    for (std::size_t n = 0; n < sig.size(); ++n) acc[n] += snap(j[n]);
  }
  if (noise.snr_db) {
    const double p = mean_power(sig) / std::pow(10.0, *noise.snr_db / 10.0);
    const auto nz = gen_noise(sig.grid(), p, noise.seed);
    for (std::size_t n = 0; n < sig.size(); ++n) acc[n] += snap(nz[n]);
  }
  return ComplexSignal(sig.grid(), std::move(acc));
}

}  // namespace hopjam::sigsynth
