#pragma once

// Run configuration and the pipeline commands behind the hopjam CLI.
//
// Seed scheme: every randomized stage takes derive_seed(master, <stage>),
// with stages "corpus", "train" and "eval"; the synth command seeds the
// scenario with derive_seed(master, "synth") and its hop sequence with
// derive_seed(master, "hops").

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "hopjam/dataset.hpp"
#include "hopjam/siamese.hpp"

namespace hopjam::app {

struct RunConfig {
  std::string preset = "desk";
  std::uint64_t seed = 0;
  dataset::CorpusConfig corpus;
  siamese::Architecture arch;
  siamese::TrainConfig train;  // train.seed is derived from `seed`
  siamese::EvalConfig eval;    // eval.seed is derived from `seed`
  std::size_t smoothing_window = 20;

  /// "desk": JSR {0, 10} dB, 20 samples per cell, 48-pixel images, 200
  /// iterations x 60 pairs.  "paper": 7 JSR values, 100 per cell, 105-pixel
  /// images, 2000 iterations x 180 pairs.
  static RunConfig preset_named(const std::string& name);

  std::uint64_t corpus_seed() const;
  void validate() const;
  nlohmann::json to_json() const;
  /// Full or partial document; missing fields keep the values of `base`.
  static RunConfig from_json(const nlohmann::json& j, const RunConfig& base);
};

/// Preset, then the JSON config file (if any) merged over it, then the seed.
RunConfig load_run_config(const std::string& preset, const std::optional<std::string>& config_path,
                          std::optional<std::uint64_t> seed);

// ---- commands -----------------------------------------------------------------

struct SynthOutput {
  std::string stem;
  double measured_jsr_db = 0.0;
};

/// Reads a scenario JSON, synthesizes the received signal and writes
/// <out_dir>/<name>.cf32 + .json.  With a seed, the scenario's own seeds are
/// replaced by ones derived from it.
SynthOutput cmd_synth(const std::string& spec_path, std::optional<std::uint64_t> seed, const std::string& out_dir);

/// Writes <kind>.f32/.json spectrograms and <kind>.pgm gray images into
/// out_dir; transform "all" also writes composite.ppm.  Returns the paths written.
std::vector<std::string> cmd_tfa(const std::string& signal_path, const std::string& transform,
                                 const dataset::RenderConfig& render, const std::string& out_dir);

dataset::Manifest cmd_dataset(const RunConfig& cfg, const std::string& out_dir);

struct TrainSummary {
  std::size_t iterations = 0;
  std::size_t pairs = 0;
  double initial_smoothed_loss = 0.0;
  double final_smoothed_loss = 0.0;
  double seconds = 0.0;
};

/// Writes checkpoint.bin, loss.csv and train.json into out_dir.
TrainSummary cmd_train(const RunConfig& cfg, const std::string& corpus_dir, const std::string& out_dir,
                       bool verbose = false);

/// Writes eval.json, accuracy_by_jsr.csv and confusion.csv into out_dir.
/// Throws SamplingError when the test split is empty.
siamese::EvalReport cmd_eval(const RunConfig& cfg, const std::string& corpus_dir, const std::string& checkpoint,
                             const std::string& out_dir);

/// Reads loss.csv and eval.json from run_dir and writes plots (PGM) and
/// plot data (CSV) into out_dir.
std::vector<std::string> cmd_report(const std::string& run_dir, const std::string& out_dir);

/// Process exit code for an exception escaping a command: 2 usage or
/// configuration, 3 missing input, 4 numerical failure.
int exit_code_for(const std::exception& e);

}  // namespace hopjam::app
