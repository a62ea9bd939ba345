#include <fstream>

#include "hopjam/app.hpp"
#include "hopjam/error.hpp"
#include "hopjam/io.hpp"
#include "hopjam/jsonutil.hpp"
#include "hopjam/rng.hpp"

namespace hopjam::app {

using nlohmann::json;

RunConfig RunConfig::preset_named(const std::string& name) {
  RunConfig c;
  c.preset = name;
  if (name == "desk") {
    c.corpus.jsr_values_db = {0, 10};
    c.corpus.per_cell = 20;
    c.corpus.render.prep.side = 48;
    c.arch = siamese::Architecture::desk();
    c.train.iterations = 200;
    c.train.pairs_per_iteration = 60;
    // 6e-5 moves the weights too little in 200 iterations (smoothed loss
    // ratio 0.885 in a measured run); 1e-3 converges within the budget.
    c.train.adam.lr0 = 1e-3;
  } else if (name == "paper") {
    c.corpus.render.prep.side = 105;
    c.arch = siamese::Architecture::paper();
    c.train.iterations = 2000;
    c.train.pairs_per_iteration = 180;
  } else {
    throw ConfigError("unknown preset '" + name + "' (expected desk or paper)");
  }
  c.train.seed = derive_seed(c.seed, "train");
  c.eval.seed = derive_seed(c.seed, "eval");
  return c;
}

std::uint64_t RunConfig::corpus_seed() const { return derive_seed(seed, "corpus"); }

void RunConfig::validate() const {
  corpus.validate();
  arch.validate();
  train.validate();
  if (arch.input_side != corpus.render.prep.side) {
    throw ConfigError("architecture.input_side (" + std::to_string(arch.input_side) +
                      ") must equal dataset.render.prep.side (" + std::to_string(corpus.render.prep.side) + ")");
  }
  if (eval.support_per_class == 0 || eval.support_draws == 0) throw ConfigError("eval: support sizes must be positive");
  if (smoothing_window == 0) throw ConfigError("smoothing_window must be positive");
}

json RunConfig::to_json() const {
  json t = train.to_json();
  t.erase("seed");
  return {{"preset", preset},
          {"seed", seed},
          {"dataset", corpus.to_json()},
          {"architecture", arch.to_json()},
          {"train", t},
          {"eval", {{"support_per_class", eval.support_per_class}, {"support_draws", eval.support_draws}}},
          {"smoothing_window", smoothing_window}};
}

RunConfig RunConfig::from_json(const json& j, const RunConfig& base) {
  if (!j.is_object()) throw ConfigError("run config: expected a JSON object");
  json merged = base.to_json();
  merged.merge_patch(j);
  const std::string w = "run config";
  RunConfig c;
  c.preset = jsonutil::get_or<std::string>(merged, "preset", base.preset, w);
  c.seed = jsonutil::get_or<std::uint64_t>(merged, "seed", base.seed, w);
  c.corpus = dataset::CorpusConfig::from_json(merged.at("dataset"));
  c.arch = siamese::Architecture::from_json(merged.at("architecture"));
  c.train = siamese::TrainConfig::from_json(merged.at("train"));
  const auto& e = merged.at("eval");
  c.eval.support_per_class = jsonutil::get_or<std::size_t>(e, "support_per_class", base.eval.support_per_class, "eval");
  c.eval.support_draws = jsonutil::get_or<std::size_t>(e, "support_draws", base.eval.support_draws, "eval");
  c.smoothing_window = jsonutil::get_or<std::size_t>(merged, "smoothing_window", base.smoothing_window, w);
  c.train.seed = derive_seed(c.seed, "train");
  c.eval.seed = derive_seed(c.seed, "eval");
  c.validate();
  return c;
}

RunConfig load_run_config(const std::string& preset, const std::optional<std::string>& config_path,
                          std::optional<std::uint64_t> seed) {
  RunConfig c = RunConfig::preset_named(preset);
  json overlay = json::object();
  if (config_path) {
    const std::string text = io::read_text(*config_path);
    try {
      overlay = json::parse(text);
    } catch (const json::exception& e) {
      throw ConfigError(*config_path + ": " + e.what());
    }
  }
  if (seed) overlay["seed"] = *seed;
  return RunConfig::from_json(overlay, c);
}

}  // namespace hopjam::app
