#include <numbers>
#include <random>
#include <algorithm>

#include "hopjam/dataset.hpp"
#include "hopjam/error.hpp"
#include "hopjam/jsonutil.hpp"

namespace hopjam::dataset {

using nlohmann::json;
using namespace sigsynth;

std::string ClassLabel::name() const {
  std::string s;
  for (std::size_t i = 0; i < members.size(); ++i) {
    if (i) s += "+";
    s += to_string(members[i]);
  }
  return s;
}

const std::vector<ClassLabel>& enumerate_classes() {
  static const std::vector<ClassLabel> classes = [] {
    std::vector<ClassLabel> c;
    int id = 0;
    for (std::size_t k = 0; k < kInterferenceKindCount; ++k) {
      c.push_back({id++, {static_cast<InterferenceKind>(k)}});
    }
    for (std::size_t a = 0; a < kInterferenceKindCount; ++a) {
      for (std::size_t b = a + 1; b < kInterferenceKindCount; ++b) {
        c.push_back({id++, {static_cast<InterferenceKind>(a), static_cast<InterferenceKind>(b)}});
      }
    }
    return c;
  }();
  return classes;
}

int class_id_of(std::vector<InterferenceKind> kinds) {
  std::sort(kinds.begin(), kinds.end());
  for (const auto& c : enumerate_classes()) {
    if (c.members == kinds) return c.id;
  }
  throw ConfigError("no interference class has these members");
}

// ---- interference draws -------------------------------------------------------

namespace {

void check_range(const std::array<double, 2>& r, const char* what, bool positive) {
  if (!(r[0] <= r[1]) || (positive ? !(r[0] > 0.0) : !(r[0] >= 0.0))) {
    throw ConfigError(std::string("interference distributions: invalid range for ") + what);
  }
}

double uniform(Rng& rng, const std::array<double, 2>& r) {
  return std::uniform_real_distribution<double>(r[0], r[1])(rng);
}

}  // namespace

void InterferenceDistributions::validate() const {
  if (fixed_freq_set_hz.empty() || fixed_n_min < 1 || fixed_n_min > fixed_n_max ||
      fixed_n_max > fixed_freq_set_hz.size()) {
    throw ConfigError("interference distributions: invalid fixed-tone count range");
  }
  check_range(sweep_bandwidth_hz, "sweep_bandwidth_hz", true);
  check_range(sweep_start_hz, "sweep_start_hz", false);
  check_range(sweep_period_s, "sweep_period_s", true);
  check_range(pulse_period_s, "pulse_period_s", true);
  check_range(pulse_duty, "pulse_duty", true);
  if (!(pulse_duty[1] < 1.0)) throw ConfigError("interference distributions: duty must stay below 1");
  if (comb_n_min < 2 || comb_n_min > comb_n_max) throw ConfigError("interference distributions: invalid comb tooth range");
  check_range(comb_band_hz, "comb_band_hz", true);
  if (!(comb_band_hz[0] < comb_band_hz[1])) throw ConfigError("interference distributions: empty comb band");
  check_range(amplitude, "amplitude", true);
}

json InterferenceDistributions::to_json() const {
  return {{"fixed_freq_set_hz", fixed_freq_set_hz},
          {"fixed_n", {fixed_n_min, fixed_n_max}},
          {"sweep_bandwidth_hz", sweep_bandwidth_hz},
          {"sweep_start_hz", sweep_start_hz},
          {"sweep_period_s", sweep_period_s},
          {"pulse_period_s", pulse_period_s},
          {"pulse_duty", pulse_duty},
          {"comb_n", {comb_n_min, comb_n_max}},
          {"comb_band_hz", comb_band_hz},
          {"amplitude", amplitude}};
}

InterferenceDistributions InterferenceDistributions::from_json(const json& j) {
  using jsonutil::get_or;
  const std::string w = "distributions";
  InterferenceDistributions d;
  d.fixed_freq_set_hz = get_or(j, "fixed_freq_set_hz", d.fixed_freq_set_hz, w);
  const auto fn = get_or<std::array<std::size_t, 2>>(j, "fixed_n", {d.fixed_n_min, d.fixed_n_max}, w);
  d.fixed_n_min = fn[0];
  d.fixed_n_max = fn[1];
  d.sweep_bandwidth_hz = get_or(j, "sweep_bandwidth_hz", d.sweep_bandwidth_hz, w);
  d.sweep_start_hz = get_or(j, "sweep_start_hz", d.sweep_start_hz, w);
  if (j.is_object() && j.contains("sweep_period_s") && j.at("sweep_period_s").is_string()) {
    if (j.at("sweep_period_s").get<std::string>() != "literal") {
      throw ConfigError("distributions.sweep_period_s: expected [lo, hi] or \"literal\"");
    }
    d.sweep_period_s = literal_sweep_period_s();
  } else {
    d.sweep_period_s = get_or(j, "sweep_period_s", d.sweep_period_s, w);
  }
  d.pulse_period_s = get_or(j, "pulse_period_s", d.pulse_period_s, w);
  d.pulse_duty = get_or(j, "pulse_duty", d.pulse_duty, w);
  const auto cn = get_or<std::array<std::size_t, 2>>(j, "comb_n", {d.comb_n_min, d.comb_n_max}, w);
  d.comb_n_min = cn[0];
  d.comb_n_max = cn[1];
  d.comb_band_hz = get_or(j, "comb_band_hz", d.comb_band_hz, w);
  d.amplitude = get_or(j, "amplitude", d.amplitude, w);
  d.validate();
  return d;
}

InterferenceSpec draw_interference(InterferenceKind kind, const InterferenceDistributions& d, Rng& rng) {
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  switch (kind) {
    case InterferenceKind::FixedTone: {
      const auto n = std::uniform_int_distribution<std::size_t>(d.fixed_n_min, d.fixed_n_max)(rng);
      std::vector<double> pool = d.fixed_freq_set_hz;
      std::shuffle(pool.begin(), pool.end(), rng);
      pool.resize(n);
      std::sort(pool.begin(), pool.end());
      FixedTone t;
      for (double f : pool) {
        t.freqs_hz.push_back(f);
        t.amplitudes.push_back(uniform(rng, d.amplitude));
        t.phases_rad.push_back(phase(rng));
      }
      return t;
    }
    case InterferenceKind::LinearSweep: {
      LinearSweep s;
      s.amplitude = uniform(rng, d.amplitude);
      s.start_hz = uniform(rng, d.sweep_start_hz);
      const double bw = uniform(rng, d.sweep_bandwidth_hz);
      s.period_s = uniform(rng, d.sweep_period_s);
      s.slope_hz_per_s = bw / s.period_s;
      s.phase_rad = phase(rng);
      return s;
    }
    case InterferenceKind::PeriodicPulse: {
      PeriodicPulse p;
      p.amplitude = uniform(rng, d.amplitude);
      p.period_s = uniform(rng, d.pulse_period_s);
      p.width_s = uniform(rng, d.pulse_duty) * p.period_s;
      return p;
    }
    case InterferenceKind::CombSpectrum: {
      const auto n = std::uniform_int_distribution<std::size_t>(d.comb_n_min, d.comb_n_max)(rng);
      CombSpectrum c;
      const double step = (d.comb_band_hz[1] - d.comb_band_hz[0]) / static_cast<double>(n - 1);
      for (std::size_t i = 0; i < n; ++i) {
        c.freqs_hz.push_back(d.comb_band_hz[0] + step * static_cast<double>(i));
        c.amplitudes.push_back(uniform(rng, d.amplitude));
        c.phases_rad.push_back(phase(rng));
      }
      return c;
    }
  }
  throw ConfigError("unknown interference kind");
}

}  // namespace hopjam::dataset
