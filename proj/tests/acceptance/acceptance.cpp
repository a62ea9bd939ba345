// Acceptance runner: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.  Corpora and checkpoints go to the work directory.
//
//   acceptance [--work DIR] [--only N]... [--reuse] [--seed S]
//
// --reuse loads corpora already present in the work directory instead of
// regenerating them (development only; ctest always regenerates).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "../oracles/siamese_oracle.hpp"
#include "../oracles/tfa_oracles.hpp"
#include "hopjam/app.hpp"
#include "hopjam/dataset.hpp"
#include "hopjam/error.hpp"
#include "hopjam/imgprep.hpp"
#include "hopjam/rng.hpp"
#include "hopjam/siamese.hpp"
#include "hopjam/sigsynth.hpp"
#include "hopjam/tfa.hpp"

namespace fs = std::filesystem;
using namespace hopjam;
using sigsynth::ComplexSignal;
using sigsynth::cd;
using sigsynth::SamplingGrid;
using tfa::TfGridSpec;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// ---- signal fixtures at 1 MHz ------------------------------------------------

constexpr double kFs = 1e6;
constexpr double kPi = std::numbers::pi;

SamplingGrid grid_of(std::size_t n) { return SamplingGrid{kFs, static_cast<double>(n) / kFs, n}; }

ComplexSignal tone(std::size_t n, double f) {
  std::vector<cd> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = std::polar(1.0, 2 * kPi * f * i / kFs);
  return ComplexSignal(grid_of(n), v);
}

ComplexSignal atom(std::size_t n, double f, double c, double sigma) {
  std::vector<cd> v(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = (static_cast<double>(i) - c) / sigma;
    v[i] = std::exp(-0.5 * u * u) * std::polar(1.0, 2 * kPi * f * i / kFs);
  }
  return ComplexSignal(grid_of(n), v);
}

ComplexSignal noise(std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::vector<cd> v(n);
  for (auto& s : v) s = {g(rng), g(rng)};
  return ComplexSignal(grid_of(n), v);
}

ComplexSignal add(const ComplexSignal& a, const ComplexSignal& b) {
  std::vector<cd> v(a.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = a[i] + b[i];
  return ComplexSignal(a.grid(), v);
}

TfGridSpec grid_spec(std::size_t t, std::size_t f, double hi, std::size_t window) {
  TfGridSpec g;
  g.n_time_bins = t;
  g.n_freq_bins = f;
  g.freq_low_hz = 0.0;
  g.freq_high_hz = hi;
  g.window_length = window;
  return g;
}

std::size_t nearest_bin(const std::vector<double>& axis, double f) {
  std::size_t best = 0;
  for (std::size_t k = 0; k < axis.size(); ++k) {
    if (std::abs(axis[k] - f) < std::abs(axis[best] - f)) best = k;
  }
  return best;
}

// ---- shared corpora ----------------------------------------------------------

struct Corpus {
  std::string dir;
  dataset::Manifest manifest;
  siamese::ImageStore images;
  double build_seconds = 0.0;
};

std::vector<std::size_t> all_indices(const dataset::Manifest& m) {
  std::vector<std::size_t> v(m.records.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = i;
  return v;
}

Corpus make_corpus(const dataset::CorpusConfig& cfg, std::uint64_t seed, const std::string& dir, bool reuse) {
  Corpus c;
  c.dir = dir;
  const auto t0 = Clock::now();
  if (reuse && fs::exists(fs::path(dir) / "manifest.jsonl")) {
    c.manifest = dataset::load_manifest(dir);
  } else {
    fs::remove_all(dir);
    c.manifest = dataset::generate_corpus(cfg, seed, dir);
  }
  const auto idx = all_indices(c.manifest);
  c.images = siamese::load_images(c.manifest, dir, idx);
  c.build_seconds = seconds_since(t0);
  return c;
}

struct Context {
  std::string work;
  bool reuse = false;
  app::RunConfig desk;
  std::optional<Corpus> desk_corpus;
  std::optional<Corpus> held_out;

  const Corpus& desk_data() {
    if (!desk_corpus) desk_corpus = make_corpus(desk.corpus, desk.corpus_seed(), work + "/desk", reuse);
    return *desk_corpus;
  }

  // Queries at JSR 10 dB drawn with a seed unrelated to the training corpus.
  const Corpus& held_out_data() {
    if (!held_out) {
      auto cfg = desk.corpus;
      cfg.jsr_values_db = {10.0};
      cfg.per_cell = 50;
      held_out = make_corpus(cfg, derive_seed(desk.seed, "held-out queries"), work + "/held_out", reuse);
    }
    return *held_out;
  }

  double held_out_accuracy(const siamese::ModelParameters& p, std::uint64_t eval_seed) {
    const auto& s = desk_data();
    const auto& q = held_out_data();
    siamese::EvalConfig ec = desk.eval;
    ec.seed = eval_seed;
    const auto queries = all_indices(q.manifest);
    return siamese::evaluate(p, s.manifest, s.images, q.manifest, q.images, queries, ec).accuracy;
  }
};

// Smallest k with P(X <= k) >= prob for X ~ Binomial(n, p).
std::size_t binomial_quantile(std::size_t n, double p, double prob) {
  double cdf = 0.0;
  for (std::size_t k = 0; k <= n; ++k) {
    const double logpmf = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) +
                          k * std::log(p) + (n - k) * std::log1p(-p);
    cdf += std::exp(logpmf);
    if (cdf >= prob) return k;
  }
  return n;
}

// ---- criteria ------------------------------------------------------------------

Outcome transform_oracles(Context&) {
  const auto t0 = Clock::now();
  double worst = 0.0;
  {
    const auto x = add(noise(384, 1), tone(384, 120e3));
    const auto g = grid_spec(24, 20, 250e3, 0);
    worst = std::max(worst, oracle::rel_error(tfa::cwt_complex(x, g, Exec::serial), oracle::cwt(x, g)));
  }
  {
    const auto x = add(noise(512, 2), tone(512, 80e3));
    for (std::size_t w : {std::size_t{129}, std::size_t{0}}) {
      const auto g = grid_spec(32, 32, 250e3, w);
      worst = std::max(worst, oracle::rel_error(tfa::mhd(x, g, Exec::serial).values, oracle::mhd(x, g)));
    }
  }
  {
    const auto x = add(noise(512, 3), tone(512, 150e3));
    for (std::size_t w : {std::size_t{65}, std::size_t{0}}) {
      const auto g = grid_spec(24, 24, 250e3, w);
      worst = std::max(worst, oracle::rel_error(tfa::bjd(x, g, Exec::serial).values, oracle::bjd(x, g)));
    }
  }
  const double secs = seconds_since(t0);
  return {worst <= 1e-6 && secs <= 60.0, fmt("max relative error %.2e (<= 1e-6), %.1f s (<= 60 s)", worst, secs)};
}

Outcome mhd_marginal(Context&) {
  const std::size_t n = 512;
  const auto x = atom(n, 250e3, 256.0, 40.0);
  const auto g = grid_spec(n, 512, 500e3, 0);
  const auto sp = tfa::mhd(x, g);
  const double df = (g.freq_high_hz - g.freq_low_hz) / g.n_freq_bins;
  double peak = 0.0;
  for (std::size_t i = 0; i < n; ++i) peak = std::max(peak, std::norm(x[i]));
  double worst = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    const double p = std::norm(x[t]);
    if (p < 0.01 * peak) continue;
    double m = 0.0;
    for (std::size_t k = 0; k < sp.n_freq; ++k) m += sp.at(t, k) * df;
    worst = std::max(worst, std::abs(m - p) / p);
  }
  return {worst < 0.01, fmt("worst relative marginal error %.2e (< 1e-2) where |s|^2 >= 1%% of peak", worst)};
}

Outcome bjd_cross_terms(Context&) {
  const std::size_t n = 256;
  const auto g = grid_spec(32, 64, 250e3, 0);
  const auto single = tfa::bjd(tone(n, 100e3), g);
  std::vector<double> avg(single.n_freq, 0.0);
  for (std::size_t t = 0; t < single.n_time; ++t)
    for (std::size_t k = 0; k < single.n_freq; ++k) avg[k] += single.at(t, k);
  const long peak_bin = std::max_element(avg.begin(), avg.end()) - avg.begin();
  const long expect = static_cast<long>(nearest_bin(single.freq_axis_hz, 100e3));

  const auto two = tfa::bjd(add(tone(n, 80e3), tone(n, 160e3)), g);
  const auto mid = nearest_bin(two.freq_axis_hz, 120e3);
  double peak = 0.0, at_mid = 0.0;
  for (std::size_t t = 0; t < two.n_time; ++t) {
    for (std::size_t k = 0; k < two.n_freq; ++k) peak = std::max(peak, std::abs(two.at(t, k)));
    at_mid = std::max(at_mid, std::abs(two.at(t, mid)));
  }
  const double ratio = at_mid / peak;
  const bool pass = ratio >= 0.05 && std::abs(peak_bin - expect) <= 1;
  return {pass, fmt("midpoint/peak %.3f (>= 0.05); single-tone peak bin %ld vs expected %ld (+-1)", ratio, peak_bin,
                    expect)};
}

Outcome binarization(Context& ctx) {
  const auto& c = ctx.desk_data();
  std::size_t channels = 0, not_converged = 0, zero = 0, max_it = 0, not_idempotent = 0;
  for (std::size_t i = 0; i < c.manifest.records.size(); ++i) {
    const auto& rec = c.manifest.records[i];
    for (const auto& d : rec.diagnostics) {
      ++channels;
      if (d.zero_energy) ++zero;
      if (!d.converged || d.iterations > 100) ++not_converged;
      max_it = std::max(max_it, d.iterations);
    }
    const auto img = imgprep::read_composite((fs::path(c.dir) / rec.image_path).string());
    for (const auto& ch : img.channels) {
      if (imgprep::binarize(ch) != ch) ++not_idempotent;
    }
  }
  std::vector<double> px(64);
  for (std::size_t i = 0; i < px.size(); ++i) px[i] = static_cast<double>(i % 2);
  GrayImage fixture;
  fixture.height = 8;
  fixture.width = 8;
  fixture.pixels = px;
  fixture.range_max = 1.0;
  const auto fx = imgprep::binarize_detailed(fixture);
  const bool pass = channels > 0 && not_converged == 0 && not_idempotent == 0 && fx.threshold == 0.5;
  return {pass, fmt("%zu channels (%zu zero-energy), %zu not converged, max %zu iterations (<= 100), "
                    "%zu not idempotent; {0,1} fixture T = %.17g (== 0.5)",
                    channels, zero, not_converged, max_it, not_idempotent, fx.threshold)};
}

Outcome normalization(Context&) {
  GrayImage g;
  g.height = 1;
  g.width = 2;
  g.pixels = {0.0, 137.0};
  const auto n = imgprep::normalize(g, 0.0, 137.0);
  const bool pass = n.pixels[0] == 0.0 && n.pixels[1] == 1.0;
  return {pass, fmt("0 -> %.17g (== 0), 137 -> %.17g (== 1)", n.pixels[0], n.pixels[1])};
}

Outcome gradient_check(Context&) {
  const auto t0 = Clock::now();
  siamese::Architecture arch;
  arch.input_side = 16;
  arch.convs = {{16, 3, true}, {16, 2, true}, {16, 2, false}, {16, 2, false}};
  arch.embedding = 16;
  auto params = siamese::init_parameters(arch, {}, 5);
  // Larger head weights keep the pair probabilities away from 0.5 so every
  // group carries a sizeable gradient.
  for (auto& v : params.alpha().values) v *= 10.0;
  std::vector<std::vector<double>> imgs;
  for (int i = 0; i < 6; ++i) {
    std::mt19937_64 rng(100 + i);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> v(3 * 16 * 16);
    for (auto& x : v) x = u(rng);
    imgs.push_back(std::move(v));
  }
  const std::vector<std::pair<int, int>> ids{{0, 1}, {2, 3}, {4, 5}, {1, 4}};
  const std::vector<bool> same{true, false, true, false};
  std::vector<siamese::PairRef> batch;
  std::vector<oracle::FrozenPair> frozen;
  for (std::size_t k = 0; k < ids.size(); ++k) {
    const auto& a = imgs[ids[k].first];
    const auto& b = imgs[ids[k].second];
    batch.push_back({a, b, same[k]});
    frozen.push_back({&a, &b, same[k], oracle::capture_pattern(params, a), oracle::capture_pattern(params, b)});
  }
  auto grads = siamese::ModelParameters::zeros(arch);
  siamese::loss_and_gradient(params, batch, grads);

  const double step = 1e-4;
  double worst = 0.0;
  std::string worst_group;
  for (std::size_t gi = 0; gi < params.groups.size(); ++gi) {
    for (std::size_t i = 0; i < params.groups[gi].values.size(); ++i) {
      auto plus = params, minus = params;
      plus.groups[gi].values[i] += step;
      minus.groups[gi].values[i] -= step;
      const double numeric = (oracle::frozen_loss(plus, frozen) - oracle::frozen_loss(minus, frozen)) / (2 * step);
      const double analytic = grads.groups[gi].values[i];
      const double err = std::abs(numeric - analytic) / std::max({std::abs(numeric), std::abs(analytic), 1e-6});
      if (err > worst) {
        worst = err;
        worst_group = params.groups[gi].name;
      }
    }
  }
  const double secs = seconds_since(t0);
  return {worst <= 1e-4 && secs <= 120.0,
          fmt("%zu groups, worst relative error %.2e in %s (<= 1e-4), %.1f s (<= 120 s)", params.groups.size(), worst,
              worst_group.c_str(), secs)};
}

Outcome training_sanity(Context& ctx) {
  const auto& c = ctx.desk_data();
  const auto& q = ctx.held_out_data();
  const auto t0 = Clock::now();
  const auto& cfg = ctx.desk;
  const auto untrained = siamese::init_parameters(cfg.arch, cfg.train.init, derive_seed(cfg.train.seed, "init"));
  const double acc0 = ctx.held_out_accuracy(untrained, cfg.eval.seed);
  const auto r = siamese::train(cfg.arch, cfg.train, c.manifest, c.images, Exec::serial);
  const auto sm = siamese::smooth(r.loss_trace, cfg.smoothing_window);
  const double ratio = sm.back() / sm.front();
  const double acc = ctx.held_out_accuracy(r.params, cfg.eval.seed);
  const double secs = seconds_since(t0) + c.build_seconds + q.build_seconds;

  const std::size_t n = q.manifest.records.size();
  const double lo = static_cast<double>(binomial_quantile(n, 0.1, 0.005)) / n;
  const double hi = static_cast<double>(binomial_quantile(n, 0.1, 0.995)) / n;
  const bool pass = ratio < 0.6 && acc > 0.3 && acc0 >= lo && acc0 <= hi && n >= 500 && secs <= 1200.0;
  return {pass, fmt("loss ratio %.3f (< 0.6); accuracy at 10 dB %.1f%% over %zu queries (> 30%%); untrained %.1f%% "
                    "(chance interval [%.1f%%, %.1f%%]); %.0f s including corpus generation (<= 1200 s)",
                    ratio, 100 * acc, n, 100 * acc0, 100 * lo, 100 * hi, secs)};
}

Outcome pair_budget_trend(Context& ctx) {
  // Ordered by total pairs, largest first.
  const std::vector<std::pair<std::size_t, std::size_t>> budgets{{200, 18}, {200, 10}, {100, 18}, {100, 10}};
  const auto& c = ctx.desk_data();
  std::vector<double> mean(budgets.size(), 0.0);
  const std::vector<std::uint64_t> seeds{1, 2, 3};
  for (std::size_t b = 0; b < budgets.size(); ++b) {
    for (auto s : seeds) {
      auto tc = ctx.desk.train;
      tc.iterations = budgets[b].first;
      tc.pairs_per_iteration = budgets[b].second;
      tc.seed = derive_seed(s, "train");
      const auto r = siamese::train(ctx.desk.arch, tc, c.manifest, c.images, Exec::serial);
      mean[b] += ctx.held_out_accuracy(r.params, derive_seed(s, "eval")) / seeds.size();
    }
  }
  bool pass = true;
  std::string detail;
  for (std::size_t b = 0; b < budgets.size(); ++b) {
    if (b > 0 && mean[b] > mean[b - 1] + 0.02) pass = false;
    detail += fmt("%s%zux%zu=%zu pairs: %.1f%%", b ? ", " : "", budgets[b].first, budgets[b].second,
                  budgets[b].first * budgets[b].second, 100 * mean[b]);
  }
  return {pass, detail + " (non-increasing within 2 pp, mean of 3 seeds)"};
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

// Relative path -> contents of every file under dir.
std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) out[fs::relative(e.path(), dir).string()] = read_file(e.path());
  }
  return out;
}

Outcome corpus_determinism(Context& ctx) {
  const dataset::CorpusConfig full;
  const auto plan = dataset::plan_corpus(full, 1);
  std::map<std::pair<double, int>, std::size_t> cells;
  for (const auto& r : plan.records) ++cells[{r.jsr_db, r.class_id}];
  const bool cells_ok = cells.size() == 70 && std::all_of(cells.begin(), cells.end(), [](const auto& kv) {
                          return kv.second == 100;
                        });

  dataset::CorpusConfig small;
  small.jsr_values_db = {0.0, 10.0};
  small.per_cell = 1;
  small.duration_s = 0.01;
  small.render.grid.n_time_bins = 64;
  small.render.grid.n_freq_bins = 64;
  small.render.grid.window_length = 65;
  small.render.prep.side = 24;
  const fs::path a = fs::path(ctx.work) / "rerun_a", b = fs::path(ctx.work) / "rerun_b";
  fs::remove_all(a);
  fs::remove_all(b);
  dataset::generate_corpus(small, 42, a.string());
  dataset::generate_corpus(small, 42, b.string());
  const auto sa = snapshot(a), sb = snapshot(b);

  // Training reruns write identical checkpoints too.
  siamese::Architecture arch;
  arch.input_side = 24;
  arch.convs = {{16, 3, true}, {16, 2, true}, {16, 2, false}, {16, 2, false}};
  arch.embedding = 16;
  const auto m = dataset::load_manifest(a.string());
  const auto idx = all_indices(m);
  const auto imgs = siamese::load_images(m, a.string(), idx);
  siamese::TrainConfig tc;
  tc.iterations = 3;
  tc.pairs_per_iteration = 4;
  tc.seed = 9;
  for (const auto& dir : {a, b}) {
    siamese::save_checkpoint((dir / "model.bin").string(), siamese::train(arch, tc, m, imgs).params, tc.iterations);
  }
  const bool same_ckpt = read_file(a / "model.bin") == read_file(b / "model.bin");

  const bool pass = plan.records.size() == 7000 && cells_ok && sa == sb && !sa.empty() && same_ckpt;
  return {pass, fmt("full preset plans %zu records (== 7000, 100 per JSR/class cell: %s); small corpus reruns "
                    "%s over %zu files; training checkpoints %s",
                    plan.records.size(), cells_ok ? "yes" : "no", sa == sb ? "byte-identical" : "DIFFER", sa.size(),
                    same_ckpt ? "byte-identical" : "DIFFER")};
}

Outcome jsr_round_trip(Context&) {
  const SamplingGrid g{1e6, 0.01, 10000};
  const auto s = sigsynth::gen_fh_signal(sigsynth::FhParams::standard(), g, 1);
  const auto j = sigsynth::gen_comb_spectrum({{0.7, 1.2, 0.9}, {90e3, 150e3, 210e3}, {0.1, 0.2, 0.3}}, g);
  double worst = 0.0;
  std::size_t cases = 0;
  for (auto m : {sigsynth::AmplitudeMeasure::MeanAbs, sigsynth::AmplitudeMeasure::Rms}) {
    for (int step = 0; step <= 300; ++step) {
      const double jsr = -10.0 + 0.1 * step;
      const auto scaled = sigsynth::scale_to_jsr(j, s, jsr, m);
      worst = std::max(worst, std::abs(sigsynth::measure_jsr_db(scaled, s, m) - jsr));
      ++cases;
    }
  }
  return {worst <= 1e-9, fmt("%zu cases over -10..20 dB, worst error %.2e dB (<= 1e-9)", cases, worst)};
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome(Context&)> run;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App cli{"acceptance criteria runner"};
  std::string work = "acceptance_work";
  std::vector<int> only;
  bool reuse = false;
  std::uint64_t seed = 1;
  cli.add_option("--work", work, "Work directory for corpora");
  cli.add_option("--only", only, "Run only the listed criteria");
  cli.add_flag("--reuse", reuse, "Reuse corpora already in the work directory");
  cli.add_option("--seed", seed, "Master seed of the desk run");
  CLI11_PARSE(cli, argc, argv);

  Context ctx;
  ctx.work = work;
  ctx.reuse = reuse;
  ctx.desk = app::load_run_config("desk", std::nullopt, seed);
  fs::create_directories(work);

  const std::vector<Criterion> criteria{
      {1, "transform oracle equivalence", transform_oracles},
      {2, "MHD time marginal", mhd_marginal},
      {3, "BJD cross term and tone concentration", bjd_cross_terms},
      {4, "binarization on the desk corpus", binarization},
      {5, "normalization endpoints", normalization},
      {6, "gradient check", gradient_check},
      {7, "desk training sanity", training_sanity},
      {8, "pair-budget trend", pair_budget_trend},
      {9, "corpus arithmetic and determinism", corpus_determinism},
      {10, "JSR round trip", jsr_round_trip},
  };

  int failed = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    Outcome o;
    try {
      o = c.run(ctx);
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("[%s] %2d %s: %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
