#include <cmath>
#include <numbers>

#include "detail.hpp"
#include "hopjam/error.hpp"
#include "hopjam/fft.hpp"
#include "hopjam/sigsynth.hpp"

namespace hopjam::sigsynth {

const char* to_string(InterferenceKind kind) {
  switch (kind) {
    case InterferenceKind::FixedTone: return "FixedTone";
    case InterferenceKind::LinearSweep: return "LinearSweep";
    case InterferenceKind::PeriodicPulse: return "PeriodicPulse";
    case InterferenceKind::CombSpectrum: return "CombSpectrum";
  }
  return "?";
}

InterferenceKind interference_kind_from_string(const std::string& name) {
  for (std::size_t k = 0; k < kInterferenceKindCount; ++k) {
    const auto kind = static_cast<InterferenceKind>(k);
    if (name == to_string(kind)) return kind;
  }
  throw ConfigError("unknown interference kind '" + name + "'");
}

InterferenceKind kind_of(const InterferenceSpec& spec) {
  return static_cast<InterferenceKind>(spec.index());
}

namespace {

void check_tone_set(const char* what, const std::vector<double>& amps, const std::vector<double>& freqs,
                    const std::vector<double>& phases, const SamplingGrid& grid) {
  if (amps.size() != freqs.size() || phases.size() != freqs.size()) {
    throw ConfigError(std::string(what) + ": amplitudes, freqs_hz and phases_rad must have equal length");
  }
  for (double f : freqs) {
    if (!(f >= 0.0) || !(f < grid.nyquist_hz())) {
      throw ConfigError(std::string(what) + ": frequency " + std::to_string(f) + " Hz outside [0, Nyquist)");
    }
  }
  for (double a : amps) {
    if (!std::isfinite(a)) throw ConfigError(std::string(what) + ": non-finite amplitude");
  }
}

}  // namespace

ComplexSignal gen_fixed_tone(const FixedTone& spec, const SamplingGrid& grid) {
  grid.validate();
  if (spec.freqs_hz.empty()) throw ConfigError("fixed tone: N must be at least 1");
  check_tone_set("fixed tone", spec.amplitudes, spec.freqs_hz, spec.phases_rad, grid);
  std::vector<cd> out(grid.n_samples);
  const double inv2pi = 0.5 / std::numbers::pi;
  for (std::size_t n = 0; n < grid.n_samples; ++n) {
    const double t = grid.time_of(n);
    cd acc{};
    for (std::size_t i = 0; i < spec.freqs_hz.size(); ++i) {
      acc += spec.amplitudes[i] * detail::phasor(spec.freqs_hz[i] * t + spec.phases_rad[i] * inv2pi);
    }
    out[n] = acc;
  }
  return ComplexSignal(grid, std::move(out));
}

ComplexSignal gen_linear_sweep(const LinearSweep& spec, const SamplingGrid& grid) {
  grid.validate();
  if (!(spec.period_s > 0.0)) throw ConfigError("linear sweep: sweep period must be positive");
  if (!(spec.start_hz >= 0.0)) throw ConfigError("linear sweep: start frequency must be >= 0");
  const double end_hz = spec.start_hz + spec.slope_hz_per_s * spec.period_s;
  if (!(spec.start_hz < grid.nyquist_hz()) || !(end_hz < grid.nyquist_hz()) || !(end_hz >= 0.0)) {
    throw ConfigError("linear sweep: instantaneous frequency leaves [0, Nyquist) within a period");
  }
  std::vector<cd> out(grid.n_samples);
  const double phase0 = spec.phase_rad * 0.5 / std::numbers::pi;
  for (std::size_t n = 0; n < grid.n_samples; ++n) {
    const double t = grid.time_of(n);
    const double tp = t - std::floor(t / spec.period_s) * spec.period_s;
    out[n] = spec.amplitude *
             detail::phasor(spec.start_hz * tp + 0.5 * spec.slope_hz_per_s * tp * tp + phase0);
  }
  return ComplexSignal(grid, std::move(out));
}

ComplexSignal gen_periodic_pulse(const PeriodicPulse& spec, const SamplingGrid& grid) {
  grid.validate();
  if (!(spec.period_s > 0.0)) throw ConfigError("periodic pulse: period must be positive");
  if (!(spec.width_s > 0.0) || !(spec.width_s < spec.period_s)) {
    throw ConfigError("periodic pulse: width must satisfy 0 < tau < T");
  }
  std::vector<double> re(grid.n_samples);
  for (std::size_t n = 0; n < grid.n_samples; ++n) {
    const double t = grid.time_of(n);
    // Position within the period in units of periods; the tolerance keeps
    // samples that fall exactly on a pulse edge on the intended side.
    const double c = t / spec.period_s;
    const double frac = c - std::floor(c + 1e-9);
    re[n] = frac < spec.duty() - 1e-9 ? spec.amplitude : 0.0;
  }
  return ComplexSignal(grid, fft::analytic_from_real(re));
}

ComplexSignal gen_comb_spectrum(const CombSpectrum& spec, const SamplingGrid& grid) {
  grid.validate();
  if (spec.freqs_hz.size() < 2) {
    throw ConfigError("comb spectrum: needs N >= 2 teeth (use a fixed tone for N = 1)");
  }
  check_tone_set("comb spectrum", spec.amplitudes, spec.freqs_hz, spec.phases_rad, grid);
  for (std::size_t i = 1; i < spec.freqs_hz.size(); ++i) {
    if (!(spec.freqs_hz[i] > spec.freqs_hz[i - 1])) {
      throw ConfigError("comb spectrum: comb frequencies must be strictly increasing and distinct");
    }
  }
  if (!(spec.envelope_depth >= 0.0 && spec.envelope_depth <= 1.0)) {
    throw ConfigError("comb spectrum: envelope depth must lie in [0, 1]");
  }
  const double inv2pi = 0.5 / std::numbers::pi;
  const bool modulated_env = spec.envelope_depth != 0.0;
  const bool modulated_phase = spec.phase_deviation_rad != 0.0;
  std::vector<cd> out(grid.n_samples);
  for (std::size_t n = 0; n < grid.n_samples; ++n) {
    const double t = grid.time_of(n);
    const double env =
        modulated_env ? 1.0 + spec.envelope_depth * std::sin(2.0 * std::numbers::pi * spec.envelope_rate_hz * t) : 1.0;
    const double dphi =
        modulated_phase ? spec.phase_deviation_rad * std::sin(2.0 * std::numbers::pi * spec.phase_rate_hz * t) : 0.0;
    cd acc{};
    for (std::size_t i = 0; i < spec.freqs_hz.size(); ++i) {
      acc += spec.amplitudes[i] * env *
             detail::phasor(spec.freqs_hz[i] * t + (spec.phases_rad[i] + dphi) * inv2pi);
    }
    out[n] = acc;
  }
  return ComplexSignal(grid, std::move(out));
}

ComplexSignal gen_interference(const InterferenceSpec& spec, const SamplingGrid& grid) {
  return std::visit(
      [&](const auto& s) -> ComplexSignal {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, FixedTone>) return gen_fixed_tone(s, grid);
        if constexpr (std::is_same_v<T, LinearSweep>) return gen_linear_sweep(s, grid);
        if constexpr (std::is_same_v<T, PeriodicPulse>) return gen_periodic_pulse(s, grid);
        if constexpr (std::is_same_v<T, CombSpectrum>) return gen_comb_spectrum(s, grid);
      },
      spec);
}

}  // namespace hopjam::sigsynth
