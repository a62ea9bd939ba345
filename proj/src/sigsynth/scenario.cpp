#include <cmath>
#include <filesystem>

#include "hopjam/error.hpp"
#include "hopjam/io.hpp"
#include "hopjam/jsonutil.hpp"
#include "hopjam/rng.hpp"
#include "hopjam/sigsynth.hpp"

namespace hopjam::sigsynth {

using nlohmann::json;

void ScenarioSpec::validate() const {
  grid.validate();
  fh.validate();
  if (interferences.empty() || interferences.size() > 2) {
    throw ConfigError("scenario: interferences must contain 1 or 2 entries");
  }
  if (!std::isfinite(jsr_db)) throw ConfigError("scenario: jsr_db must be finite");
  if (noise_snr_db && !std::isfinite(*noise_snr_db)) throw ConfigError("scenario: noise_snr_db must be finite");
}

Synthesis synthesize(const ScenarioSpec& scenario) {
  scenario.validate();
  const auto desired = gen_fh_signal(scenario.fh, scenario.grid, derive_seed(scenario.rng_seed, "fh"));

  std::vector<cd> sum(scenario.grid.n_samples, cd{});
  for (const auto& spec : scenario.interferences) {
    const auto j = gen_interference(spec, scenario.grid);
    for (std::size_t n = 0; n < sum.size(); ++n) sum[n] += j[n];
  }
  const auto jamming = scale_to_jsr(ComplexSignal(scenario.grid, std::move(sum)), desired, scenario.jsr_db,
                                    scenario.jsr_measure);
  const double measured = measure_jsr_db(jamming, desired, scenario.jsr_measure);

  NoiseSpec noise{scenario.noise_snr_db, derive_seed(scenario.rng_seed, "noise")};
  auto received = mix(desired, std::span(&jamming, 1), noise);
  return Synthesis{std::move(received), desired, jamming, measured};
}

// ---- JSON -------------------------------------------------------------------

namespace {

using jsonutil::get_field;
using jsonutil::get_or;

}  // namespace

json to_json(const InterferenceSpec& spec) {
  json j;
  j["kind"] = to_string(kind_of(spec));
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, FixedTone>) {
          j["amplitudes"] = s.amplitudes;
          j["freqs_hz"] = s.freqs_hz;
          j["phases_rad"] = s.phases_rad;
        } else if constexpr (std::is_same_v<T, LinearSweep>) {
          j["amplitude"] = s.amplitude;
          j["start_hz"] = s.start_hz;
          j["slope_hz_per_s"] = s.slope_hz_per_s;
          j["phase_rad"] = s.phase_rad;
          j["sweep_period_s"] = s.period_s;
        } else if constexpr (std::is_same_v<T, PeriodicPulse>) {
          j["amplitude"] = s.amplitude;
          j["period_s"] = s.period_s;
          j["width_s"] = s.width_s;
        } else {
          j["amplitudes"] = s.amplitudes;
          j["freqs_hz"] = s.freqs_hz;
          j["phases_rad"] = s.phases_rad;
          j["envelope_depth"] = s.envelope_depth;
          j["envelope_rate_hz"] = s.envelope_rate_hz;
          j["phase_deviation_rad"] = s.phase_deviation_rad;
          j["phase_rate_hz"] = s.phase_rate_hz;
        }
      },
      spec);
  return j;
}

InterferenceSpec interference_from_json(const json& j) {
  const std::string where = "interference";
  const auto kind = interference_kind_from_string(get_field<std::string>(j, "kind", where));
  switch (kind) {
    case InterferenceKind::FixedTone: {
      FixedTone t;
      t.freqs_hz = get_field<std::vector<double>>(j, "freqs_hz", where);
      t.amplitudes = get_or(j, "amplitudes", std::vector<double>(t.freqs_hz.size(), 1.0), where);
      t.phases_rad = get_or(j, "phases_rad", std::vector<double>(t.freqs_hz.size(), 0.0), where);
      return t;
    }
    case InterferenceKind::LinearSweep: {
      LinearSweep s;
      s.amplitude = get_or(j, "amplitude", 1.0, where);
      s.start_hz = get_field<double>(j, "start_hz", where);
      s.slope_hz_per_s = get_field<double>(j, "slope_hz_per_s", where);
      s.phase_rad = get_or(j, "phase_rad", 0.0, where);
      s.period_s = get_field<double>(j, "sweep_period_s", where);
      return s;
    }
    case InterferenceKind::PeriodicPulse: {
      PeriodicPulse p;
      p.amplitude = get_or(j, "amplitude", 1.0, where);
      p.period_s = get_field<double>(j, "period_s", where);
      p.width_s = get_field<double>(j, "width_s", where);
      return p;
    }
    case InterferenceKind::CombSpectrum: {
      CombSpectrum c;
      c.freqs_hz = get_field<std::vector<double>>(j, "freqs_hz", where);
      c.amplitudes = get_or(j, "amplitudes", std::vector<double>(c.freqs_hz.size(), 1.0), where);
      c.phases_rad = get_or(j, "phases_rad", std::vector<double>(c.freqs_hz.size(), 0.0), where);
      c.envelope_depth = get_or(j, "envelope_depth", 0.0, where);
      c.envelope_rate_hz = get_or(j, "envelope_rate_hz", 0.0, where);
      c.phase_deviation_rad = get_or(j, "phase_deviation_rad", 0.0, where);
      c.phase_rate_hz = get_or(j, "phase_rate_hz", 0.0, where);
      return c;
    }
  }
  throw ConfigError("unreachable interference kind");
}

json to_json(const ScenarioSpec& spec) {
  json j;
  j["format_version"] = kScenarioFormatVersion;
  j["sample_rate_hz"] = spec.grid.sample_rate_hz;
  j["duration_s"] = spec.grid.duration_s;
  json fh;
  fh["n_hop_freqs"] = spec.fh.n_hop_freqs;
  fh["freq_set_hz"] = spec.fh.freq_set_hz;
  fh["band_hz"] = {spec.fh.band_low_hz, spec.fh.band_high_hz};
  fh["hop_rate_hops_per_s"] = spec.fh.hop_rate_hops_per_s;
  fh["modulation"] = "BPSK";
  fh["symbol_rate_hz"] = spec.fh.symbol_rate_hz;
  fh["amplitude"] = spec.fh.amplitude;
  fh["hop_sequence_seed"] = spec.fh.hop_sequence_seed;
  j["fh"] = fh;
  j["interferences"] = json::array();
  for (const auto& i : spec.interferences) j["interferences"].push_back(to_json(i));
  j["jsr_db"] = spec.jsr_db;
  j["jsr_measure"] = spec.jsr_measure == AmplitudeMeasure::MeanAbs ? "mean_abs" : "rms";
  if (spec.noise_snr_db) {
    j["noise_snr_db"] = *spec.noise_snr_db;
  } else {
    j["noise_snr_db"] = "none";
  }
  j["rng_seed"] = spec.rng_seed;
  return j;
}

ScenarioSpec scenario_from_json(const json& j) {
  const std::string where = "scenario";
  if (!j.is_object()) throw ConfigError("scenario: expected a JSON object");
  const int version = get_or(j, "format_version", kScenarioFormatVersion, where);
  if (version != kScenarioFormatVersion) throw ConfigError("scenario: unsupported format_version");

  ScenarioSpec s;
  const double fs = get_or(j, "sample_rate_hz", 16e6, where);
  const double dur = get_or(j, "duration_s", 0.04, where);
  s.grid = SamplingGrid::make(fs, dur);

  const json fhj = j.contains("fh") ? j.at("fh") : json::object();
  if (!fhj.is_object()) throw ConfigError("scenario.fh: expected an object");
  const std::string fw = "scenario.fh";
  std::vector<double> band = get_or(fhj, "band_hz", std::vector<double>{100e3, 220e3}, fw);
  if (band.size() != 2) throw ConfigError("scenario.fh.band_hz: expected [low, high]");
  const auto n_hops = get_or<std::size_t>(fhj, "n_hop_freqs", 16, fw);
  const double hop_rate = get_or(fhj, "hop_rate_hops_per_s", 100.0, fw);
  s.fh = FhParams::standard(n_hops, band[0], band[1], hop_rate);
  if (fhj.contains("freq_set_hz")) s.fh.freq_set_hz = get_field<std::vector<double>>(fhj, "freq_set_hz", fw);
  if (get_or<std::string>(fhj, "modulation", "BPSK", fw) != "BPSK") {
    throw ConfigError("scenario.fh.modulation: only BPSK is supported");
  }
  s.fh.symbol_rate_hz = get_or(fhj, "symbol_rate_hz", 10.0 * hop_rate, fw);
  s.fh.amplitude = get_or(fhj, "amplitude", 1.0, fw);
  s.fh.hop_sequence_seed = get_or<std::uint64_t>(fhj, "hop_sequence_seed", 1, fw);

  if (!j.contains("interferences") || !j.at("interferences").is_array()) {
    throw ConfigError("scenario: 'interferences' must be an array");
  }
  for (const auto& ij : j.at("interferences")) s.interferences.push_back(interference_from_json(ij));
  s.jsr_db = get_field<double>(j, "jsr_db", where);
  const std::string measure = get_or<std::string>(j, "jsr_measure", "mean_abs", where);
  if (measure == "mean_abs") {
    s.jsr_measure = AmplitudeMeasure::MeanAbs;
  } else if (measure == "rms") {
    s.jsr_measure = AmplitudeMeasure::Rms;
  } else {
    throw ConfigError("scenario.jsr_measure: expected 'mean_abs' or 'rms'");
  }
  if (j.contains("noise_snr_db")) {
    const auto& nj = j.at("noise_snr_db");
    if (nj.is_string() && nj.get<std::string>() == "none") {
      s.noise_snr_db.reset();
    } else if (nj.is_number()) {
      s.noise_snr_db = nj.get<double>();
    } else {
      throw ConfigError("scenario.noise_snr_db: expected a number or \"none\"");
    }
  }
  s.rng_seed = get_or<std::uint64_t>(j, "rng_seed", 0, where);
  s.validate();
  return s;
}

// ---- signal files ------------------------------------------------------------

namespace {

std::string strip_known_ext(const std::string& path) {
  std::filesystem::path p(path);
  const auto ext = p.extension().string();
  if (ext == ".cf32" || ext == ".json") p.replace_extension();
  return p.string();
}

}  // namespace

void write_signal(const std::string& stem_in, const ComplexSignal& x, const std::optional<ScenarioSpec>& scenario,
                  std::uint64_t seed) {
  const std::string stem = strip_known_ext(stem_in);
  std::vector<std::uint8_t> bytes;
  bytes.reserve(x.size() * 8);
  for (const cd& v : x.samples()) {
    io::append_f32_le(bytes, static_cast<float>(v.real()));
    io::append_f32_le(bytes, static_cast<float>(v.imag()));
  }
  json side;
  side["format_version"] = kSignalFormatVersion;
  side["sample_rate_hz"] = x.grid().sample_rate_hz;
  side["duration_s"] = x.grid().duration_s;
  side["n_samples"] = x.size();
  side["scenario_spec"] = scenario ? to_json(*scenario) : json(nullptr);
  side["seed"] = seed;
  io::write_file_atomic(stem + ".cf32", bytes);
  io::write_text_atomic(stem + ".json", side.dump(2) + "\n");
}

SignalFile read_signal(const std::string& path) {
  const std::string stem = strip_known_ext(path);
  if (!std::filesystem::exists(stem + ".json") || !std::filesystem::exists(stem + ".cf32")) {
    throw IoError("signal file not found: " + stem + ".{cf32,json}");
  }
  json side;
  try {
    side = json::parse(io::read_text(stem + ".json"));
  } catch (const json::exception& e) {
    throw IoError("malformed signal sidecar " + stem + ".json: " + e.what());
  }
  const int version = side.value("format_version", 0);
  if (version != kSignalFormatVersion) throw IoError("unsupported signal format_version in " + stem + ".json");
  const double fs = side.at("sample_rate_hz").get<double>();
  const auto n = side.at("n_samples").get<std::size_t>();
  SamplingGrid grid;
  grid.sample_rate_hz = fs;
  grid.n_samples = n;
  grid.duration_s = side.contains("duration_s") ? side.at("duration_s").get<double>() : static_cast<double>(n) / fs;
  const auto bytes = io::read_file(stem + ".cf32");
  if (bytes.size() != n * 8) throw IoError("signal payload size mismatch in " + stem + ".cf32");
  std::vector<cd> samples(n);
  for (std::size_t i = 0; i < n; ++i) {
    samples[i] = {io::read_f32_le(&bytes[8 * i]), io::read_f32_le(&bytes[8 * i + 4])};
  }
  SignalFile out{ComplexSignal(grid, std::move(samples)), std::nullopt, side.value("seed", std::uint64_t{0})};
  if (side.contains("scenario_spec") && !side.at("scenario_spec").is_null()) {
    out.scenario = scenario_from_json(side.at("scenario_spec"));
  }
  return out;
}

}  // namespace hopjam::sigsynth
