#pragma once

// Frequency-hopping signal and interference synthesis.
//
// Every generator returns the analytic (complex) form of its waveform: the real
// part is the textbook real waveform, the imaginary part its Hilbert transform.
// Bilinear time-frequency distributions computed downstream therefore see no
// negative-frequency images.

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace hopjam::sigsynth {

using cd = std::complex<double>;

struct SamplingGrid {
  double sample_rate_hz = 16e6;
  double duration_s = 0.04;
  std::size_t n_samples = 640000;

  /// n_samples = round(sample_rate_hz * duration_s).
  static SamplingGrid make(double sample_rate_hz, double duration_s);

  double dt() const { return 1.0 / sample_rate_hz; }
  double nyquist_hz() const { return 0.5 * sample_rate_hz; }
  double time_of(std::size_t n) const { return static_cast<double>(n) / sample_rate_hz; }
  void validate() const;

  bool operator==(const SamplingGrid&) const = default;
};

class ComplexSignal {
 public:
  /// Zero signal on `grid`.
  explicit ComplexSignal(SamplingGrid grid);
  /// Throws DimensionError if the length disagrees with the grid and
  /// NumericalError if any sample is NaN or infinite.
  ComplexSignal(SamplingGrid grid, std::vector<cd> samples);

  const SamplingGrid& grid() const { return grid_; }
  std::span<const cd> samples() const { return samples_; }
  std::size_t size() const { return samples_.size(); }
  const cd& operator[](std::size_t i) const { return samples_[i]; }

  std::vector<double> real_part() const;
  /// Sum of |x[n]|^2 (no dt factor).
  double energy() const;
  ComplexSignal scaled(double factor) const;

  bool operator==(const ComplexSignal&) const = default;

 private:
  SamplingGrid grid_;
  std::vector<cd> samples_;
};

enum class Modulation { BPSK };

struct FhParams {
  std::size_t n_hop_freqs = 16;
  std::vector<double> freq_set_hz;  // ordered, inside [band_low_hz, band_high_hz]
  double band_low_hz = 100e3;
  double band_high_hz = 220e3;
  double hop_rate_hops_per_s = 100.0;
  Modulation modulation = Modulation::BPSK;
  double symbol_rate_hz = 1000.0;  // 10 symbols per hop
  double amplitude = 1.0;
  std::uint64_t hop_sequence_seed = 1;

  /// Evenly spaced hop set across the band, endpoints included.
  static FhParams standard(std::size_t n_hop_freqs = 16, double band_low_hz = 100e3,
                           double band_high_hz = 220e3, double hop_rate = 100.0);
  void validate() const;
};

enum class InterferenceKind { FixedTone = 0, LinearSweep = 1, PeriodicPulse = 2, CombSpectrum = 3 };

inline constexpr std::size_t kInterferenceKindCount = 4;

const char* to_string(InterferenceKind kind);
InterferenceKind interference_kind_from_string(const std::string& name);

/// J(t) = sum_i A_i cos(2 pi f_i t + phi_i)
struct FixedTone {
  std::vector<double> amplitudes;
  std::vector<double> freqs_hz;
  std::vector<double> phases_rad;
};

/// Within each sweep period: J(t') = A cos(2 pi f0 t' + pi mu0 t'^2 + phi0),
/// t' = t mod period.
struct LinearSweep {
  double amplitude = 1.0;
  double start_hz = 0.0;
  double slope_hz_per_s = 0.0;
  double phase_rad = 0.0;
  double period_s = 1e-3;
};

/// J(t) = sum_i A g_tau(t - i T), g_tau the unit rectangle on [0, tau).
struct PeriodicPulse {
  double amplitude = 1.0;
  double period_s = 5e-5;
  double width_s = 1.5e-5;

  double duty() const { return width_s / period_s; }
};

/// J(t) = sum_i A_i(t) cos(2 pi f_i t + phi_i(t)) with
/// A_i(t) = A_i (1 + depth sin(2 pi rate t)) and
/// phi_i(t) = phi_i + deviation sin(2 pi phase_rate t).
/// The defaults (depth = deviation = 0) give constant envelopes and phases.
struct CombSpectrum {
  std::vector<double> amplitudes;
  std::vector<double> freqs_hz;  // strictly increasing
  std::vector<double> phases_rad;
  double envelope_depth = 0.0;
  double envelope_rate_hz = 0.0;
  double phase_deviation_rad = 0.0;
  double phase_rate_hz = 0.0;
};

using InterferenceSpec = std::variant<FixedTone, LinearSweep, PeriodicPulse, CombSpectrum>;

InterferenceKind kind_of(const InterferenceSpec& spec);

/// How "average amplitude" is measured for the jamming-to-signal ratio.
enum class AmplitudeMeasure { MeanAbs, Rms };

struct NoiseSpec {
  std::optional<double> snr_db;  // nullopt: no noise
  std::uint64_t seed = 0;
};

struct ScenarioSpec {
  SamplingGrid grid;
  FhParams fh = FhParams::standard();
  std::vector<InterferenceSpec> interferences;  // 1 or 2 entries
  double jsr_db = 0.0;
  std::optional<double> noise_snr_db;
  AmplitudeMeasure jsr_measure = AmplitudeMeasure::MeanAbs;
  std::uint64_t rng_seed = 0;

  void validate() const;
};

// ---- generators -------------------------------------------------------------

/// Hop-frequency index for each hop segment overlapping the grid; segment k
/// covers [k / hop_rate, (k + 1) / hop_rate).  Seeded by fh.hop_sequence_seed,
/// uniform over the set without immediate repetition.
std::vector<std::size_t> hop_schedule(const FhParams& fh, const SamplingGrid& grid);

/// Constant-envelope BPSK frequency-hopping signal.  `seed` drives the data
/// bits and the per-hop carrier phases.
ComplexSignal gen_fh_signal(const FhParams& fh, const SamplingGrid& grid, std::uint64_t seed);

ComplexSignal gen_fixed_tone(const FixedTone& spec, const SamplingGrid& grid);
ComplexSignal gen_linear_sweep(const LinearSweep& spec, const SamplingGrid& grid);
ComplexSignal gen_periodic_pulse(const PeriodicPulse& spec, const SamplingGrid& grid);
ComplexSignal gen_comb_spectrum(const CombSpectrum& spec, const SamplingGrid& grid);
ComplexSignal gen_interference(const InterferenceSpec& spec, const SamplingGrid& grid);

/// Circular complex white Gaussian noise with E|n|^2 = power.
ComplexSignal gen_noise(const SamplingGrid& grid, double power, std::uint64_t seed);

// ---- mixing -----------------------------------------------------------------

double average_amplitude(const ComplexSignal& x, AmplitudeMeasure measure);
double mean_power(const ComplexSignal& x);

/// 20 log10(V_jam / V_sig).
double measure_jsr_db(const ComplexSignal& jam, const ComplexSignal& sig,
                      AmplitudeMeasure measure = AmplitudeMeasure::MeanAbs);

/// Rescales `jam` so that measure_jsr_db(result, sig) == jsr_db.
ComplexSignal scale_to_jsr(const ComplexSignal& jam, const ComplexSignal& sig, double jsr_db,
                           AmplitudeMeasure measure = AmplitudeMeasure::MeanAbs);

/// r = s + sum_j J_j + n.  Summands are snapped to a 2^-36 lattice before
/// adding, which makes every partial sum exact: the result does not depend on
/// the order of `jams`, and mix(mix(s, {a}), {b}) == mix(s, {a, b}) bit for bit.
/// Noise power is relative to the mean power of `sig`.
ComplexSignal mix(const ComplexSignal& sig, std::span<const ComplexSignal> jams,
                  const NoiseSpec& noise = {});

struct Synthesis {
  ComplexSignal received;
  ComplexSignal desired;
  ComplexSignal jamming;  // sum of interferences after JSR scaling
  double measured_jsr_db;
};

/// Full received-signal model for one scenario.  The interferences are
/// summed with their own amplitudes first, then the sum is scaled to the
/// scenario JSR.
Synthesis synthesize(const ScenarioSpec& scenario);

// ---- serialization ----------------------------------------------------------

inline constexpr int kScenarioFormatVersion = 1;

nlohmann::json to_json(const ScenarioSpec& spec);
/// Throws ConfigError with a field path on schema violations.
ScenarioSpec scenario_from_json(const nlohmann::json& j);

nlohmann::json to_json(const InterferenceSpec& spec);
InterferenceSpec interference_from_json(const nlohmann::json& j);

inline constexpr int kSignalFormatVersion = 1;

/// Writes <stem>.cf32 (little-endian float32 interleaved re, im) and
/// <stem>.json {sample_rate_hz, n_samples, scenario_spec, seed, format_version}.
void write_signal(const std::string& stem, const ComplexSignal& x,
                  const std::optional<ScenarioSpec>& scenario, std::uint64_t seed);

struct SignalFile {
  ComplexSignal signal;
  std::optional<ScenarioSpec> scenario;
  std::uint64_t seed = 0;
};

/// Accepts either the stem or the path of the .cf32 / .json file.
SignalFile read_signal(const std::string& path);

}  // namespace hopjam::sigsynth
