#include <doctest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>

#include "hopjam/app.hpp"
#include "hopjam/imgprep.hpp"
#include "hopjam/sigsynth.hpp"

namespace fs = std::filesystem;
using namespace hopjam;

namespace {

const fs::path kRoot = fs::temp_directory_path() / "hopjam_cli_test";

struct Run {
  int code = -1;
  std::string output;
};

// Runs the CLI with stdout and stderr captured.
Run run(const std::string& args, const std::string& env = "") {
  const auto log = kRoot / "last_output.txt";
  const std::string cmd = env + " " + HOPJAM_CLI + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  std::ifstream in(log);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, {std::istreambuf_iterator<char>(in), {}}};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

void write_text(const fs::path& p, const std::string& s) { std::ofstream(p) << s; }

std::string scenario_path(const std::string& name) { return std::string(HOPJAM_DATA_DIR) + "/scenarios/" + name; }

bool empty_dir(const fs::path& p) { return !fs::exists(p) || fs::is_empty(p); }

// Small corpus and network so the train/eval/report chain runs in seconds.
fs::path small_config(const std::string& name, double test_fraction) {
  auto c = app::RunConfig::preset_named("desk");
  c.corpus.jsr_values_db = {0.0};
  c.corpus.per_cell = 5;
  c.corpus.duration_s = 0.01;
  c.corpus.test_fraction = test_fraction;
  c.corpus.render.grid.n_time_bins = 64;
  c.corpus.render.grid.n_freq_bins = 64;
  c.corpus.render.grid.window_length = 65;
  c.corpus.render.prep.side = 24;
  c.arch.input_side = 24;
  c.arch.convs = {{16, 3, true}, {16, 2, true}, {16, 2, false}, {16, 2, false}};
  c.arch.embedding = 16;
  c.train.iterations = 3;
  c.train.pairs_per_iteration = 4;
  const auto p = kRoot / name;
  write_text(p, c.to_json().dump(2));
  return p;
}

struct Fixture {
  Fixture() {
    fs::remove_all(kRoot);
    fs::create_directories(kRoot);
  }
};

}  // namespace

TEST_CASE_FIXTURE(Fixture, "help output lists every flag of every subcommand") {
  const std::vector<std::string> globals{"--seed", "--config", "--out", "--threads", "--preset"};
  const std::vector<std::pair<std::string, std::vector<std::string>>> commands{
      {"synth", {"--spec"}},
      {"tfa", {"--signal", "--transform"}},
      {"dataset", {}},
      {"train", {"--corpus", "--iterations", "--pairs", "--verbose"}},
      {"eval", {"--corpus", "--checkpoint"}},
      {"report", {"--run"}},
  };
  const auto top = run("--help");
  CHECK(top.code == 0);
  for (const auto& [name, flags] : commands) {
    CHECK(top.output.find(name) != std::string::npos);
    const auto h = run(name + " --help");
    CHECK(h.code == 0);
    for (const auto& f : globals) CHECK_MESSAGE(h.output.find(f) != std::string::npos, name << " " << f);
    for (const auto& f : flags) CHECK_MESSAGE(h.output.find(f) != std::string::npos, name << " " << f);
  }
  CHECK(run("").code == 2);
  CHECK(run("synth --bogus 1").code == 2);
}

TEST_CASE_FIXTURE(Fixture, "synth is reproducible for a fixed seed") {
  const auto a = kRoot / "a", b = kRoot / "b", c = kRoot / "c";
  const auto spec = scenario_path("tone_sweep.json");
  REQUIRE(run("synth --spec " + spec + " --seed 3 --out " + a.string()).code == 0);
  REQUIRE(run("synth --spec " + spec + " --seed 3 --out " + b.string()).code == 0);
  REQUIRE(run("synth --spec " + spec + " --seed 4 --out " + c.string()).code == 0);
  CHECK(slurp(a / "tone_sweep.cf32") == slurp(b / "tone_sweep.cf32"));
  CHECK(slurp(a / "tone_sweep.json") == slurp(b / "tone_sweep.json"));
  CHECK(slurp(a / "tone_sweep.cf32") != slurp(c / "tone_sweep.cf32"));

  const auto r = run("synth --spec " + scenario_path("fixed80.json") + " --out " + a.string());
  CHECK(r.code == 0);
  CHECK(r.output.find("measured JSR 0.00 dB") != std::string::npos);
}

TEST_CASE_FIXTURE(Fixture, "synth input errors") {
  const auto bad = kRoot / "bad.json";
  write_text(bad, "{\"interferences\": [");
  const auto out = kRoot / "out_bad";
  CHECK(run("synth --spec " + bad.string() + " --out " + out.string()).code == 2);
  CHECK(empty_dir(out));
  CHECK(run("synth --spec " + (kRoot / "missing.json").string() + " --out " + out.string()).code == 3);
  CHECK(empty_dir(out));
  CHECK(run("synth --spec " + scenario_path("pulse.json") + " --out " + out.string(), "HOPJAM_THREADS=x").code == 2);
}

TEST_CASE_FIXTURE(Fixture, "tfa writes three spectrograms and one composite") {
  const auto sig = kRoot / "sig";
  REQUIRE(run("synth --spec " + scenario_path("pulse.json") + " --out " + sig.string()).code == 0);
  const auto out = kRoot / "tfa";
  CHECK(run("tfa --signal " + (sig / "pulse.cf32").string() + " --transform stft --out " + out.string()).code == 2);
  CHECK(empty_dir(out));
  REQUIRE(run("tfa --signal " + (sig / "pulse.cf32").string() + " --transform all --out " + out.string()).code == 0);
  std::size_t f32 = 0, ppm = 0;
  for (const auto& e : fs::directory_iterator(out)) {
    f32 += e.path().extension() == ".f32";
    ppm += e.path().extension() == ".ppm";
  }
  CHECK(f32 == 3);
  CHECK(ppm == 1);
  for (auto kind : {"wavelet", "mhd", "bjd"}) CHECK(fs::exists(out / (std::string(kind) + ".pgm")));
  CHECK(run("tfa --signal " + (kRoot / "none.cf32").string() + " --out " + out.string()).code == 3);
}

TEST_CASE_FIXTURE(Fixture, "tfa of an all-zero signal gives black images") {
  const sigsynth::SamplingGrid g{16e6, 0.01, 160000};
  sigsynth::write_signal((kRoot / "zero").string(), sigsynth::ComplexSignal(g), std::nullopt, 0);
  const auto out = kRoot / "zero_tfa";
  REQUIRE(run("tfa --signal " + (kRoot / "zero.cf32").string() + " --out " + out.string()).code == 0);
  const auto img = imgprep::read_composite((out / "composite.ppm").string());
  for (const auto& ch : img.channels) {
    CHECK(std::all_of(ch.pixels.begin(), ch.pixels.end(), [](auto v) { return v == 0; }));
  }
}

TEST_CASE_FIXTURE(Fixture, "dataset, train, eval and report chain") {
  const auto cfg = small_config("small.json", 0.2);
  const auto corpus = kRoot / "corpus", run_dir = kRoot / "run", rep = kRoot / "report";
  REQUIRE(run("dataset --config " + cfg.string() + " --seed 2 --out " + corpus.string()).code == 0);
  CHECK(fs::exists(corpus / "manifest.jsonl"));
  CHECK(fs::exists(corpus / "run_config.json"));
  REQUIRE(run("train --config " + cfg.string() + " --seed 2 --corpus " + corpus.string() + " --out " +
              run_dir.string()).code == 0);
  const auto first = slurp(run_dir / "checkpoint.bin");
  REQUIRE(run("train --config " + cfg.string() + " --seed 2 --corpus " + corpus.string() + " --out " +
              run_dir.string()).code == 0);
  CHECK(slurp(run_dir / "checkpoint.bin") == first);
  for (auto f : {"loss.csv", "train.json"}) CHECK(fs::exists(run_dir / f));

  const auto e = run("eval --config " + cfg.string() + " --seed 2 --corpus " + corpus.string() + " --checkpoint " +
                     (run_dir / "checkpoint.bin").string() + " --out " + run_dir.string());
  REQUIRE(e.code == 0);
  CHECK(e.output.find("accuracy") != std::string::npos);
  for (auto f : {"eval.json", "accuracy_by_jsr.csv", "confusion.csv"}) CHECK(fs::exists(run_dir / f));

  REQUIRE(run("report --run " + run_dir.string() + " --out " + rep.string()).code == 0);
  for (auto f : {"loss_curve.pgm", "accuracy_by_jsr.pgm", "confusion.pgm", "summary.json"}) {
    CHECK(fs::exists(rep / f));
  }
  CHECK(run("report --run " + (kRoot / "nothing").string() + " --out " + rep.string()).code == 3);
  CHECK(run("eval --config " + cfg.string() + " --corpus " + corpus.string() + " --checkpoint " +
            (kRoot / "none.bin").string() + " --out " + run_dir.string()).code == 3);
}

TEST_CASE_FIXTURE(Fixture, "eval on an empty test split exits 3") {
  const auto cfg = small_config("no_test.json", 0.0);
  const auto corpus = kRoot / "corpus0", run_dir = kRoot / "run0";
  REQUIRE(run("dataset --config " + cfg.string() + " --out " + corpus.string()).code == 0);
  REQUIRE(run("train --config " + cfg.string() + " --corpus " + corpus.string() + " --out " + run_dir.string()).code ==
          0);
  CHECK(run("eval --config " + cfg.string() + " --corpus " + corpus.string() + " --checkpoint " +
            (run_dir / "checkpoint.bin").string() + " --out " + run_dir.string()).code == 3);
}

TEST_CASE_FIXTURE(Fixture, "config errors exit 2") {
  const auto bad = kRoot / "bad_config.json";
  write_text(bad, R"({"train": {"iterations": "many"}})");
  CHECK(run("dataset --config " + bad.string() + " --out " + (kRoot / "x").string()).code == 2);
  write_text(bad, R"({"architecture": {"input_side": 30}})");
  CHECK(run("dataset --config " + bad.string() + " --out " + (kRoot / "x").string()).code == 2);
  CHECK(empty_dir(kRoot / "x"));
  CHECK(run("dataset --preset huge").code == 2);
}
