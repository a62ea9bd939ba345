#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <set>
#include <sstream>

#include "hopjam/dataset.hpp"
#include "hopjam/error.hpp"
#include "hopjam/io.hpp"
#include "hopjam/jsonutil.hpp"

namespace hopjam::dataset {

using nlohmann::json;
using jsonutil::get_field;
using jsonutil::get_or;

// ---- config -------------------------------------------------------------------

void CorpusConfig::validate() const {
  if (jsr_values_db.empty()) throw ConfigError("corpus: jsr_values_db is empty");
  for (double j : jsr_values_db) {
    const double k = (j + 10.0) / 5.0;
    if (!(j >= -10.0 && j <= 20.0) || k != std::round(k)) {
      throw ConfigError("corpus: JSR values must come from {-10, -5, 0, 5, 10, 15, 20} dB");
    }
  }
  if (per_cell == 0) throw ConfigError("corpus: per_cell must be at least 1");
  if (class_ids.empty()) throw ConfigError("corpus: class_ids is empty");
  std::set<int> seen;
  for (int c : class_ids) {
    if (c < 0 || c >= static_cast<int>(kNumClasses) || !seen.insert(c).second) {
      throw ConfigError("corpus: class ids must be distinct values in 0..9");
    }
  }
  if (!(test_fraction >= 0.0 && test_fraction < 1.0)) throw ConfigError("corpus: test_fraction must lie in [0, 1)");
  sigsynth::SamplingGrid::make(sample_rate_hz, duration_s).validate();
  distributions.validate();
  render.validate(sample_rate_hz);
}

json CorpusConfig::to_json() const {
  return {{"jsr_values_db", jsr_values_db},
          {"per_cell", per_cell},
          {"class_ids", class_ids},
          {"sample_rate_hz", sample_rate_hz},
          {"duration_s", duration_s},
          {"noise_snr_db", noise_snr_db ? json(*noise_snr_db) : json("none")},
          {"jsr_measure", jsr_measure == sigsynth::AmplitudeMeasure::Rms ? "rms" : "mean_abs"},
          {"distributions", distributions.to_json()},
          {"render", render.to_json()},
          {"test_fraction", test_fraction}};
}

CorpusConfig CorpusConfig::from_json(const json& j) {
  const std::string w = "dataset";
  if (!j.is_object()) throw ConfigError("dataset: expected an object");
  CorpusConfig c;
  c.jsr_values_db = get_or(j, "jsr_values_db", c.jsr_values_db, w);
  c.per_cell = get_or(j, "per_cell", c.per_cell, w);
  c.class_ids = get_or(j, "class_ids", c.class_ids, w);
  c.sample_rate_hz = get_or(j, "sample_rate_hz", c.sample_rate_hz, w);
  c.duration_s = get_or(j, "duration_s", c.duration_s, w);
  if (j.contains("noise_snr_db")) {
    const auto& n = j.at("noise_snr_db");
    if (n.is_number()) {
      c.noise_snr_db = n.get<double>();
    } else if (n.is_string() && n.get<std::string>() == "none") {
      c.noise_snr_db.reset();
    } else {
      throw ConfigError("dataset.noise_snr_db: expected a number or \"none\"");
    }
  }
  const auto m = get_or<std::string>(j, "jsr_measure", "mean_abs", w);
  if (m != "mean_abs" && m != "rms") throw ConfigError("dataset.jsr_measure: expected 'mean_abs' or 'rms'");
  c.jsr_measure = m == "rms" ? sigsynth::AmplitudeMeasure::Rms : sigsynth::AmplitudeMeasure::MeanAbs;
  if (j.contains("distributions")) c.distributions = InterferenceDistributions::from_json(j.at("distributions"));
  if (j.contains("render")) c.render = RenderConfig::from_json(j.at("render"));
  c.test_fraction = get_or(j, "test_fraction", c.test_fraction, w);
  return c;
}

// ---- records ------------------------------------------------------------------

const char* to_string(Split s) { return s == Split::Train ? "train" : "test"; }

json SampleRecord::to_json() const {
  json diag = json::array();
  for (const auto& d : diagnostics) {
    diag.push_back({{"threshold", d.threshold},
                    {"iterations", d.iterations},
                    {"converged", d.converged},
                    {"zero_energy", d.zero_energy}});
  }
  return {{"id", id},
          {"class_id", class_id},
          {"class_name", enumerate_classes().at(static_cast<std::size_t>(class_id)).name()},
          {"jsr_db", jsr_db},
          {"seed", seed},
          {"split", to_string(split)},
          {"scenario_spec", sigsynth::to_json(scenario)},
          {"files", {{"composite", image_path}}},
          {"binarize", diag}};
}

SampleRecord SampleRecord::from_json(const json& j) {
  const std::string w = "manifest record";
  SampleRecord r;
  r.id = get_field<std::size_t>(j, "id", w);
  r.class_id = get_field<int>(j, "class_id", w);
  if (r.class_id < 0 || r.class_id >= static_cast<int>(kNumClasses)) throw ConfigError(w + ": class_id out of range");
  r.jsr_db = get_field<double>(j, "jsr_db", w);
  r.seed = get_field<std::uint64_t>(j, "seed", w);
  const auto split = get_field<std::string>(j, "split", w);
  if (split != "train" && split != "test") throw ConfigError(w + ": split must be 'train' or 'test'");
  r.split = split == "train" ? Split::Train : Split::Test;
  r.scenario = sigsynth::scenario_from_json(get_field<json>(j, "scenario_spec", w));
  if (j.contains("files")) r.image_path = get_or<std::string>(j.at("files"), "composite", "", w);
  if (j.contains("binarize")) {
    const auto& d = j.at("binarize");
    if (!d.is_array() || d.size() != 3) throw ConfigError(w + ": binarize must list three channels");
    for (std::size_t c = 0; c < 3; ++c) {
      r.diagnostics[c].threshold = get_field<double>(d[c], "threshold", w);
      r.diagnostics[c].iterations = get_field<std::size_t>(d[c], "iterations", w);
      r.diagnostics[c].converged = get_field<bool>(d[c], "converged", w);
      r.diagnostics[c].zero_energy = get_field<bool>(d[c], "zero_energy", w);
    }
  }
  return r;
}

std::vector<std::size_t> Manifest::indices(Split s) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (records[i].split == s) out.push_back(i);
  }
  return out;
}

std::string Manifest::serialize() const {
  std::string out;
  for (const auto& r : records) out += r.to_json().dump() + "\n";
  return out;
}

Manifest Manifest::parse(const std::string& text) {
  Manifest m;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      m.records.push_back(SampleRecord::from_json(json::parse(line)));
    } catch (const json::exception& e) {
      throw ConfigError("manifest line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return m;
}

// ---- planning and rendering -----------------------------------------------------

Manifest plan_corpus(const CorpusConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  const auto grid = sigsynth::SamplingGrid::make(cfg.sample_rate_hz, cfg.duration_s);
  const auto& classes = enumerate_classes();
  Manifest m;
  std::size_t id = 0;
  for (double jsr : cfg.jsr_values_db) {
    for (int cls : cfg.class_ids) {
      for (std::size_t i = 0; i < cfg.per_cell; ++i, ++id) {
        SampleRecord r;
        r.id = id;
        r.class_id = cls;
        r.jsr_db = jsr;
        r.seed = derive_seed(seed, static_cast<std::uint64_t>(id));
        Rng rng = make_rng(derive_seed(r.seed, "scenario"));
        auto& sc = r.scenario;
        sc.grid = grid;
        sc.fh = sigsynth::FhParams::standard();
        sc.fh.hop_sequence_seed = derive_seed(r.seed, "hops");
        for (auto kind : classes[static_cast<std::size_t>(cls)].members) {
          sc.interferences.push_back(draw_interference(kind, cfg.distributions, rng));
        }
        sc.jsr_db = jsr;
        sc.noise_snr_db = cfg.noise_snr_db;
        sc.jsr_measure = cfg.jsr_measure;
        sc.rng_seed = derive_seed(r.seed, "synth");
        m.records.push_back(std::move(r));
      }
    }
  }

  // Stratified split: each (JSR, class) cell is shuffled on its own stream.
  const auto n_test = static_cast<std::size_t>(std::llround(cfg.test_fraction * static_cast<double>(cfg.per_cell)));
  const std::uint64_t split_seed = derive_seed(seed, "split");
  for (std::size_t cell = 0; cell * cfg.per_cell < m.records.size(); ++cell) {
    std::vector<std::size_t> members(cfg.per_cell);
    for (std::size_t i = 0; i < cfg.per_cell; ++i) members[i] = cell * cfg.per_cell + i;
    Rng rng = make_rng(derive_seed(split_seed, static_cast<std::uint64_t>(cell)));
    std::shuffle(members.begin(), members.end(), rng);
    for (std::size_t i = 0; i < members.size(); ++i) m.records[members[i]].split = i < n_test ? Split::Test : Split::Train;
  }
  return m;
}

RenderedImage render_record(const SampleRecord& rec, const CorpusConfig& cfg, Exec exec) {
  const auto syn = sigsynth::synthesize(rec.scenario);
  return render(syn.received, cfg.render, exec);
}

namespace {

std::string sample_name(std::size_t id) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "samples/%06zu", id);
  return buf;
}

}  // namespace

Manifest generate_corpus(const CorpusConfig& cfg, std::uint64_t seed, const std::string& dir, Exec exec) {
  auto m = plan_corpus(cfg, seed);
  const std::filesystem::path root(dir);
  std::filesystem::create_directories(root / "samples");
  std::vector<std::exception_ptr> failures(m.records.size());
  for_each_index(exec, m.records.size(), [&](std::size_t i) {
    auto& r = m.records[i];
    try {
      const auto img = render_record(r, cfg, Exec::serial);
      r.image_path = sample_name(r.id) + ".ppm";
      r.diagnostics = img.diagnostics;
      const json meta{{"id", r.id}, {"class_id", r.class_id}, {"jsr_db", r.jsr_db}, {"seed", r.seed}};
      imgprep::write_composite((root / sample_name(r.id)).string(), img.composite, meta);
    } catch (...) {
      failures[i] = std::current_exception();
    }
  });
  for (std::size_t i = 0; i < failures.size(); ++i) {
    if (failures[i]) {
      rethrow_with_context(failures[i], "corpus sample " + std::to_string(m.records[i].id) + " (seed " +
                                            std::to_string(m.records[i].seed) + ")");
    }
  }
  const json info{{"format_version", kCorpusFormatVersion},
                  {"seed", seed},
                  {"n_records", m.records.size()},
                  {"layout", {{"manifest", "manifest.jsonl"}, {"samples", "samples/<id>.ppm + samples/<id>.json"}}},
                  {"config", cfg.to_json()}};
  io::write_text_atomic(root / "manifest.jsonl", m.serialize());
  io::write_text_atomic(root / "corpus.json", info.dump(2) + "\n");
  return m;
}

Manifest load_manifest(const std::string& dir) {
  std::filesystem::path p(dir);
  if (std::filesystem::is_directory(p)) p /= "manifest.jsonl";
  if (!std::filesystem::exists(p)) throw IoError("manifest not found: " + p.string());
  return Manifest::parse(io::read_text(p));
}

}  // namespace hopjam::dataset
