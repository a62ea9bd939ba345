#include <doctest.h>

#include <filesystem>
#include <map>
#include <set>

#include "hopjam/dataset.hpp"
#include "hopjam/error.hpp"
#include "hopjam/io.hpp"

using namespace hopjam;
using namespace hopjam::dataset;
using sigsynth::InterferenceKind;

namespace {

// Small, fast corpus: 10 ms records, 64 x 64 grid, 24-pixel images.
CorpusConfig tiny_config() {
  CorpusConfig c;
  c.jsr_values_db = {0, 10};
  c.per_cell = 5;
  c.duration_s = 0.01;
  c.render.grid.n_time_bins = 64;
  c.render.grid.n_freq_bins = 64;
  c.render.grid.window_length = 65;
  c.render.prep.side = 24;
  return c;
}

}  // namespace

TEST_CASE("class enumeration") {
  const auto& cls = enumerate_classes();
  REQUIRE(cls.size() == 10);
  CHECK(cls[0].members == std::vector<InterferenceKind>{InterferenceKind::FixedTone});
  CHECK(cls[3].members == std::vector<InterferenceKind>{InterferenceKind::CombSpectrum});
  CHECK(cls[4].members == std::vector<InterferenceKind>{InterferenceKind::FixedTone, InterferenceKind::LinearSweep});
  CHECK(cls[9].members == std::vector<InterferenceKind>{InterferenceKind::PeriodicPulse, InterferenceKind::CombSpectrum});
  std::set<std::vector<InterferenceKind>> distinct;
  for (std::size_t i = 0; i < cls.size(); ++i) {
    CHECK(cls[i].id == static_cast<int>(i));
    if (i >= 4) {
      CHECK(cls[i].members.size() == 2);
      CHECK(cls[i].members[0] != cls[i].members[1]);
    }
    distinct.insert(cls[i].members);
    CHECK(class_id_of(cls[i].members) == cls[i].id);
  }
  CHECK(distinct.size() == 10);
  CHECK(class_id_of({InterferenceKind::CombSpectrum, InterferenceKind::FixedTone}) == 6);
}

TEST_CASE("interference draws stay inside their distributions") {
  const InterferenceDistributions d;
  Rng rng = make_rng(1);
  std::set<std::size_t> fixed_counts, comb_counts;
  for (int i = 0; i < 300; ++i) {
    const auto t = std::get<sigsynth::FixedTone>(draw_interference(InterferenceKind::FixedTone, d, rng));
    fixed_counts.insert(t.freqs_hz.size());
    std::set<double> fs(t.freqs_hz.begin(), t.freqs_hz.end());
    CHECK(fs.size() == t.freqs_hz.size());
    for (double f : t.freqs_hz) CHECK((f == 80e3 || f == 160e3 || f == 200e3));
    for (double a : t.amplitudes) CHECK((a >= 0.5 && a <= 1.5));

    const auto s = std::get<sigsynth::LinearSweep>(draw_interference(InterferenceKind::LinearSweep, d, rng));
    CHECK((s.start_hz >= 0 && s.start_hz <= 100e3));
    CHECK((s.period_s >= 1e-3 && s.period_s <= 5e-3));
    const double bw = s.slope_hz_per_s * s.period_s;
    CHECK((bw >= 50e3 - 1e-6 && bw <= 100e3 + 1e-6));

    const auto p = std::get<sigsynth::PeriodicPulse>(draw_interference(InterferenceKind::PeriodicPulse, d, rng));
    CHECK((p.period_s >= 3e-5 && p.period_s <= 8e-5));
    CHECK((p.duty() >= 0.2 - 1e-12 && p.duty() <= 0.5 + 1e-12));

    const auto c = std::get<sigsynth::CombSpectrum>(draw_interference(InterferenceKind::CombSpectrum, d, rng));
    comb_counts.insert(c.freqs_hz.size());
    CHECK(c.freqs_hz.front() == doctest::Approx(90e3));
    CHECK(c.freqs_hz.back() == doctest::Approx(210e3));
  }
  CHECK(fixed_counts == std::set<std::size_t>{1, 2, 3});
  CHECK(comb_counts == std::set<std::size_t>{4, 5, 6, 7, 8});
}

TEST_CASE("corpus plans: sizes, uniform cells, stratified split, determinism") {
  CorpusConfig full;
  const auto m = plan_corpus(full, 7);
  CHECK(m.records.size() == 7000);

  CorpusConfig desk;
  desk.jsr_values_db = {0, 10};
  desk.per_cell = 20;
  const auto d = plan_corpus(desk, 7);
  CHECK(d.records.size() == 400);
  std::map<std::pair<double, int>, std::pair<int, int>> cells;  // (train, test)
  for (const auto& r : d.records) {
    auto& c = cells[{r.jsr_db, r.class_id}];
    (r.split == Split::Train ? c.first : c.second) += 1;
  }
  CHECK(cells.size() == 20);
  for (const auto& [key, c] : cells) {
    CHECK(c.first == 16);
    CHECK(c.second == 4);
  }
  CHECK(plan_corpus(desk, 7).serialize() == d.serialize());
  CHECK(plan_corpus(desk, 8).serialize() != d.serialize());
  for (std::size_t i = 0; i < d.records.size(); ++i) CHECK(d.records[i].id == i);
}

TEST_CASE("manifest round trip and parse errors") {
  const auto m = plan_corpus(tiny_config(), 3);
  const auto text = m.serialize();
  const auto back = Manifest::parse(text);
  CHECK(back.serialize() == text);
  CHECK(back.records.size() == m.records.size());
  CHECK_THROWS_AS(Manifest::parse("{\"id\": 1}\n"), ConfigError);
  CHECK_THROWS_AS(Manifest::parse("not json\n"), ConfigError);
  CHECK(CorpusConfig::from_json(tiny_config().to_json()).to_json() == tiny_config().to_json());
}

TEST_CASE("generate_corpus renders and is byte-identical across runs") {
  const auto base = std::filesystem::temp_directory_path() / "hopjam_dataset_test";
  std::filesystem::remove_all(base);
  auto cfg = tiny_config();
  cfg.per_cell = 1;
  const auto a = generate_corpus(cfg, 11, (base / "a").string(), Exec::parallel);
  const auto b = generate_corpus(cfg, 11, (base / "b").string(), Exec::serial);
  CHECK(a.records.size() == 20);
  CHECK(io::read_text(base / "a" / "manifest.jsonl") == io::read_text(base / "b" / "manifest.jsonl"));
  for (const auto& r : a.records) {
    CHECK(io::read_file(base / "a" / r.image_path) == io::read_file(base / "b" / r.image_path));
    const auto img = imgprep::read_composite((base / "a" / r.image_path).string());
    CHECK(img.height() == 24);
    for (const auto& d : r.diagnostics) {
      CHECK(d.converged);
      CHECK(d.iterations <= 100);
    }
  }
  const auto loaded = load_manifest((base / "a").string());
  CHECK(loaded.serialize() == a.serialize());
  CHECK_THROWS_AS(load_manifest((base / "nowhere").string()), IoError);
  std::filesystem::remove_all(base);
}

TEST_CASE("zero received signal renders an all-black composite") {
  auto cfg = tiny_config();
  const sigsynth::ComplexSignal zero(sigsynth::SamplingGrid::make(16e6, 0.01));
  const auto img = render(zero, cfg.render);
  for (const auto& ch : img.composite.channels) {
    CHECK(std::all_of(ch.pixels.begin(), ch.pixels.end(), [](auto v) { return v == 0; }));
  }
  for (const auto& d : img.diagnostics) CHECK(d.zero_energy);
}

TEST_CASE("matching pairs: labels, balance, errors") {
  const auto m = plan_corpus(tiny_config(), 5);
  const auto pairs = sample_pairs(m, 10000, 1, 0.5);
  CHECK(pairs.size() == 10000);
  std::size_t same = 0;
  for (const auto& p : pairs) {
    CHECK(m.records[p.a].split == Split::Train);
    CHECK(m.records[p.b].split == Split::Train);
    CHECK(p.same == (m.records[p.a].class_id == m.records[p.b].class_id));
    if (p.same) CHECK(p.a != p.b);
    same += p.same;
  }
  const double frac = static_cast<double>(same) / 10000.0;
  CHECK((frac >= 0.48 && frac <= 0.52));

  std::size_t total = 0;
  for (std::size_t it = 0; it < 2000; ++it) total += 180;
  CHECK(total == 360000);
  CHECK(sample_pairs(m, 180, 2).size() == 180);
  CHECK(sample_pairs(m, 50, 9).front().a == sample_pairs(m, 50, 9).front().a);

  Manifest sparse;
  sparse.records = {m.records[0], m.records[5]};
  sparse.records[0].split = sparse.records[1].split = Split::Train;
  CHECK_THROWS_AS(sample_pairs(sparse, 4, 1, 0.5), SamplingError);
  CHECK(sample_pairs(sparse, 4, 1, 0.0).size() == 4);
  Manifest empty;
  CHECK_THROWS_AS(sample_pairs(empty, 4, 1), SamplingError);
}
