#pragma once

// Interference classes, labelled corpus generation over the JSR grid,
// manifests, train/test splits and matching-pair sampling.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hopjam/exec.hpp"
#include "hopjam/imgprep.hpp"
#include "hopjam/rng.hpp"
#include "hopjam/sigsynth.hpp"
#include "hopjam/tfa.hpp"

namespace hopjam::dataset {

using sigsynth::InterferenceKind;

inline constexpr std::size_t kNumClasses = 10;

struct ClassLabel {
  int id = 0;
  std::vector<InterferenceKind> members;  // 1 or 2 kinds, ascending

  std::string name() const;  // e.g. "fixed_tone+linear_sweep"
};

/// The four single kinds in enum order, then the six unordered pairs in
/// lexicographic order.
const std::vector<ClassLabel>& enumerate_classes();
int class_id_of(std::vector<InterferenceKind> kinds);

/// Parameter distributions for random interference draws.
struct InterferenceDistributions {
  std::vector<double> fixed_freq_set_hz{80e3, 160e3, 200e3};
  std::size_t fixed_n_min = 1;
  std::size_t fixed_n_max = 3;
  std::array<double, 2> sweep_bandwidth_hz{50e3, 100e3};
  std::array<double, 2> sweep_start_hz{0.0, 100e3};
  std::array<double, 2> sweep_period_s{1e-3, 5e-3};
  std::array<double, 2> pulse_period_s{3e-5, 8e-5};
  std::array<double, 2> pulse_duty{0.2, 0.5};
  std::size_t comb_n_min = 4;
  std::size_t comb_n_max = 8;
  std::array<double, 2> comb_band_hz{90e3, 210e3};
  std::array<double, 2> amplitude{0.5, 1.5};

  /// Sweep periods as printed in the source table, U[1e-6, 5e-6] s.
  static std::array<double, 2> literal_sweep_period_s() { return {1e-6, 5e-6}; }

  void validate() const;
  nlohmann::json to_json() const;
  static InterferenceDistributions from_json(const nlohmann::json& j);
};

sigsynth::InterferenceSpec draw_interference(InterferenceKind kind, const InterferenceDistributions& d, Rng& rng);

/// Signal-to-image settings shared by corpus generation and the tfa command.
struct RenderConfig {
  std::size_t decimation = 16;        // 16 MHz -> 1 MHz analysis rate
  double decimation_cutoff_hz = 330e3;
  std::size_t decimation_taps = 513;
  tfa::TfGridSpec grid;
  imgprep::PrepParams prep;

  void validate(double sample_rate_hz) const;
  nlohmann::json to_json() const;
  static RenderConfig from_json(const nlohmann::json& j);
};

struct ChannelDiagnostics {
  double threshold = 0.0;
  std::size_t iterations = 0;
  bool converged = true;
  bool zero_energy = false;
};

struct RenderedImage {
  imgprep::CompositeImage composite;
  std::array<ChannelDiagnostics, 3> diagnostics;
};

/// Signal already at the analysis rate -> three spectrograms (wavelet, MHD, BJD).
std::array<tfa::Spectrogram, 3> render_spectrograms(const sigsynth::ComplexSignal& analysis_signal,
                                                    const RenderConfig& cfg, Exec exec = Exec::parallel);

/// Received signal (acquisition rate) -> decimate -> transforms -> gray ->
/// normalize -> binarize -> crop -> resize -> compose.
RenderedImage render(const sigsynth::ComplexSignal& received, const RenderConfig& cfg, Exec exec = Exec::parallel);

struct CorpusConfig {
  std::vector<double> jsr_values_db{-10, -5, 0, 5, 10, 15, 20};
  std::size_t per_cell = 100;
  std::vector<int> class_ids{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  double sample_rate_hz = 16e6;
  double duration_s = 0.04;
  std::optional<double> noise_snr_db = 10.0;
  sigsynth::AmplitudeMeasure jsr_measure = sigsynth::AmplitudeMeasure::MeanAbs;
  InterferenceDistributions distributions;
  RenderConfig render;
  double test_fraction = 0.2;

  void validate() const;
  nlohmann::json to_json() const;
  static CorpusConfig from_json(const nlohmann::json& j);
};

enum class Split { Train, Test };
const char* to_string(Split s);

struct SampleRecord {
  std::size_t id = 0;
  int class_id = 0;
  double jsr_db = 0.0;
  std::uint64_t seed = 0;
  Split split = Split::Train;
  sigsynth::ScenarioSpec scenario;
  std::string image_path;  // relative to the corpus directory; empty until rendered
  std::array<ChannelDiagnostics, 3> diagnostics{};

  nlohmann::json to_json() const;
  static SampleRecord from_json(const nlohmann::json& j);
};

struct Manifest {
  std::vector<SampleRecord> records;

  std::vector<std::size_t> indices(Split s) const;
  /// One JSON object per line.
  std::string serialize() const;
  static Manifest parse(const std::string& text);
};

/// Draws every scenario and the split without rendering.  Records are ordered
/// by JSR, then class, then draw index; record i takes seed derive_seed(seed, i).
Manifest plan_corpus(const CorpusConfig& cfg, std::uint64_t seed);

/// Synthesizes and renders one planned record.
RenderedImage render_record(const SampleRecord& rec, const CorpusConfig& cfg, Exec exec = Exec::serial);

inline constexpr int kCorpusFormatVersion = 1;

/// Plans, renders every sample into <dir>/samples/, and writes
/// <dir>/manifest.jsonl and <dir>/corpus.json.  Samples are rendered in
/// parallel when exec == parallel; the manifest is written once at the end.
/// A failing scenario aborts with its id and seed in the message.
Manifest generate_corpus(const CorpusConfig& cfg, std::uint64_t seed, const std::string& dir,
                         Exec exec = Exec::parallel);

Manifest load_manifest(const std::string& dir);

struct MatchingPair {
  std::size_t a = 0;  // record indices
  std::size_t b = 0;
  bool same = false;
};

/// Random pairs from the train split; each pair is same-class with
/// probability `balance`.  Throws SamplingError if a same-class pair is
/// possible but some train class has fewer than two samples, or if fewer
/// than two classes are present for a different-class pair.
std::vector<MatchingPair> sample_pairs(const Manifest& m, std::size_t n_pairs, std::uint64_t seed,
                                       double balance = 0.5);

}  // namespace hopjam::dataset
