// hopjam: interference synthesis, time-frequency rendering, corpus
// generation, siamese training and evaluation from the command line.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "hopjam/app.hpp"
#include "hopjam/error.hpp"
#include "hopjam/exec.hpp"

namespace {

struct Globals {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> config;
  std::string out = "hopjam_out";
  int threads = 0;
  std::string preset = "desk";
};

void add_globals(CLI::App& cmd, Globals& g) {
  cmd.add_option("--seed", g.seed, "Master seed; every stage derives its own seed from it");
  cmd.add_option("--config", g.config, "JSON run configuration merged over the preset");
  cmd.add_option("--out", g.out, "Output directory")->capture_default_str();
  cmd.add_option("--threads", g.threads, "Worker threads (HOPJAM_THREADS overrides)");
  cmd.add_option("--preset", g.preset, "Configuration preset")->check(CLI::IsMember({"desk", "paper"}))->capture_default_str();
}

void apply_threads(const Globals& g) {
  int n = g.threads;
  if (const char* env = std::getenv("HOPJAM_THREADS")) {
    try {
      n = std::stoi(env);
    } catch (const std::exception&) {
      throw hopjam::ConfigError(std::string("HOPJAM_THREADS is not an integer: ") + env);
    }
  }
  if (n > 0) hopjam::set_thread_count(n);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Frequency-hopping interference recognition toolkit"};
  app.require_subcommand(1);
  Globals g;

  std::string spec;
  auto* synth = app.add_subcommand("synth", "Synthesize a received signal from a scenario JSON file");
  synth->add_option("--spec", spec, "Scenario JSON file")->required();

  std::string signal, transform = "all";
  auto* tfa = app.add_subcommand("tfa", "Render spectrograms and images of a signal file");
  tfa->add_option("--signal", signal, "Signal file (.cf32, .json or stem)")->required();
  tfa->add_option("--transform", transform, "wavelet, mhd, bjd or all")
      ->check(CLI::IsMember({"wavelet", "mhd", "bjd", "all"}))
      ->capture_default_str();

  auto* dataset = app.add_subcommand("dataset", "Generate a labeled corpus");

  std::string corpus;
  std::optional<std::size_t> iterations, pairs;
  bool verbose = false;
  auto* train = app.add_subcommand("train", "Train the siamese network on a corpus");
  train->add_option("--corpus", corpus, "Corpus directory")->required();
  train->add_option("--iterations", iterations, "Training iterations (overrides the preset)");
  train->add_option("--pairs", pairs, "Matching pairs per iteration (overrides the preset)");
  train->add_flag("--verbose", verbose, "Print the loss every 10 iterations");

  std::string checkpoint;
  auto* eval = app.add_subcommand("eval", "Evaluate a checkpoint on the corpus test split");
  eval->add_option("--corpus", corpus, "Corpus directory")->required();
  eval->add_option("--checkpoint", checkpoint, "Checkpoint file")->required();

  std::string run_dir;
  auto* report = app.add_subcommand("report", "Plot the loss curve and accuracy of a run");
  report->add_option("--run", run_dir, "Directory holding loss.csv and eval.json")->required();

  for (auto* cmd : {synth, tfa, dataset, train, eval, report}) add_globals(*cmd, g);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    apply_threads(g);
    if (synth->parsed()) {
      const auto r = hopjam::app::cmd_synth(spec, g.seed, g.out);
      // Rounding residue below the printed precision would otherwise show as "-0.00".
      const double jsr = std::abs(r.measured_jsr_db) < 0.005 ? 0.0 : r.measured_jsr_db;
      std::printf("wrote %s.cf32\nmeasured JSR %.2f dB\n", r.stem.c_str(), jsr);
    } else if (tfa->parsed()) {
      const auto cfg = hopjam::app::load_run_config(g.preset, g.config, g.seed);
      for (const auto& p : hopjam::app::cmd_tfa(signal, transform, cfg.corpus.render, g.out)) {
        std::printf("wrote %s\n", p.c_str());
      }
    } else if (dataset->parsed()) {
      const auto cfg = hopjam::app::load_run_config(g.preset, g.config, g.seed);
      const auto m = hopjam::app::cmd_dataset(cfg, g.out);
      std::printf("wrote %zu records to %s\n", m.records.size(), g.out.c_str());
    } else if (train->parsed()) {
      auto cfg = hopjam::app::load_run_config(g.preset, g.config, g.seed);
      if (iterations) cfg.train.iterations = *iterations;
      if (pairs) cfg.train.pairs_per_iteration = *pairs;
      const auto s = hopjam::app::cmd_train(cfg, corpus, g.out, verbose);
      std::printf("trained %zu iterations, %zu pairs; smoothed loss %.4f -> %.4f (%.1f s)\n", s.iterations, s.pairs,
                  s.initial_smoothed_loss, s.final_smoothed_loss, s.seconds);
    } else if (eval->parsed()) {
      const auto cfg = hopjam::app::load_run_config(g.preset, g.config, g.seed);
      const auto r = hopjam::app::cmd_eval(cfg, corpus, checkpoint, g.out);
      std::printf("accuracy %.4f over %zu queries\n", r.accuracy, r.n_queries);
      for (const auto& [jsr, a] : r.accuracy_by_jsr) std::printf("  JSR %+5.1f dB: %.4f\n", jsr, a);
    } else if (report->parsed()) {
      for (const auto& p : hopjam::app::cmd_report(run_dir, g.out)) std::printf("wrote %s\n", p.c_str());
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return hopjam::app::exit_code_for(e);
  }
  return 0;
}
