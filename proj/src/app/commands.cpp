#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "hopjam/app.hpp"
#include "hopjam/error.hpp"
#include "hopjam/io.hpp"
#include "hopjam/rng.hpp"

namespace hopjam::app {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json parse_json_file(const std::string& path) {
  const std::string text = io::read_text(path);
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

std::string path_in(const std::string& dir, const std::string& name) { return (fs::path(dir) / name).string(); }

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir + ": " + ec.message());
}

// ---- plotting -------------------------------------------------------------------

// White canvas, row 0 at the bottom (write_pgm puts the last row on top).
struct Canvas {
  GrayImage img;
  std::size_t margin = 12;

  Canvas(std::size_t h, std::size_t w) : img(h, w, 255.0) {
    for (std::size_t c = margin; c < w - margin / 2; ++c) img.at(margin, c) = 0.0;
    for (std::size_t r = margin; r < h - margin / 2; ++r) img.at(r, margin) = 0.0;
  }

  void dot(long r, long c, double v) {
    if (r >= 0 && c >= 0 && static_cast<std::size_t>(r) < img.height && static_cast<std::size_t>(c) < img.width) {
      img.at(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) = v;
    }
  }

  void line(long r0, long c0, long r1, long c1, double v) {
    const long dr = std::abs(r1 - r0), dc = std::abs(c1 - c0);
    const long sr = r0 < r1 ? 1 : -1, sc = c0 < c1 ? 1 : -1;
    long err = dc - dr;
    while (true) {
      dot(r0, c0, v);
      if (r0 == r1 && c0 == c1) break;
      const long e2 = 2 * err;
      if (e2 > -dr) { err -= dr; c0 += sc; }
      if (e2 < dc) { err += dc; r0 += sr; }
    }
  }

  // Polyline of ys against evenly spaced x positions, scaled to [lo, hi].
  void series(const std::vector<double>& ys, double lo, double hi, double v, bool markers) {
    if (ys.empty()) return;
    const double span = hi > lo ? hi - lo : 1.0;
    const auto px = [&](std::size_t i) {
      const double w = static_cast<double>(img.width - 2 * margin);
      return static_cast<long>(margin) + (ys.size() == 1 ? 0L : std::lround(w * static_cast<double>(i) / static_cast<double>(ys.size() - 1)));
    };
    const auto py = [&](double y) {
      const double h = static_cast<double>(img.height - 2 * margin);
      return static_cast<long>(margin) + std::lround(h * (std::clamp(y, lo, hi) - lo) / span);
    };
    for (std::size_t i = 0; i < ys.size(); ++i) {
      if (i > 0) line(py(ys[i - 1]), px(i - 1), py(ys[i]), px(i), v);
      if (markers) {
        for (long d = -2; d <= 2; ++d) {
          dot(py(ys[i]) + d, px(i), v);
          dot(py(ys[i]), px(i) + d, v);
        }
      }
    }
  }
};

std::vector<std::vector<double>> read_csv_columns(const std::string& path, std::size_t n_cols) {
  std::istringstream in(io::read_text(path));
  std::string line;
  std::getline(in, line);  // header
  std::vector<std::vector<double>> cols(n_cols);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string cell;
    for (std::size_t c = 0; c < n_cols; ++c) {
      if (!std::getline(row, cell, ',')) throw ConfigError(path + ": short row");
      try {
        cols[c].push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw ConfigError(path + ": bad number '" + cell + "'");
      }
    }
  }
  return cols;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

}  // namespace

// ---- synth ----------------------------------------------------------------------

SynthOutput cmd_synth(const std::string& spec_path, std::optional<std::uint64_t> seed, const std::string& out_dir) {
  auto scenario = sigsynth::scenario_from_json(parse_json_file(spec_path));
  if (seed) {
    scenario.rng_seed = derive_seed(*seed, "synth");
    scenario.fh.hop_sequence_seed = derive_seed(*seed, "hops");
  }
  const auto syn = sigsynth::synthesize(scenario);
  ensure_dir(out_dir);
  SynthOutput out{path_in(out_dir, fs::path(spec_path).stem().string()), syn.measured_jsr_db};
  sigsynth::write_signal(out.stem, syn.received, scenario, seed.value_or(scenario.rng_seed));
  return out;
}

// ---- tfa ------------------------------------------------------------------------

std::vector<std::string> cmd_tfa(const std::string& signal_path, const std::string& transform,
                                 const dataset::RenderConfig& render, const std::string& out_dir) {
  std::vector<tfa::TransformKind> kinds;
  if (transform == "all") {
    kinds = {tfa::TransformKind::Wavelet, tfa::TransformKind::MHD, tfa::TransformKind::BJD};
  } else {
    kinds = {tfa::transform_kind_from_string(transform)};
  }
  const auto file = sigsynth::read_signal(signal_path);
  render.validate(file.signal.grid().sample_rate_hz);
  const auto x = render.decimation > 1 ? tfa::decimate(file.signal, render.decimation, render.decimation_cutoff_hz,
                                                       render.decimation_taps, Exec::parallel)
                                       : file.signal;
  ensure_dir(out_dir);
  std::vector<std::string> written;
  imgprep::CompositeImage composite;
  for (std::size_t c = 0; c < kinds.size(); ++c) {
    const auto sp = tfa::transform(kinds[c], x, render.grid, Exec::parallel);
    const std::string stem = path_in(out_dir, tfa::to_string(kinds[c]));
    tfa::write_spectrogram(stem, sp);
    const auto gray = tfa::to_gray(sp);
    imgprep::write_pgm(stem + ".pgm", gray);
    written.insert(written.end(), {stem + ".f32", stem + ".json", stem + ".pgm"});
    if (kinds.size() == 3) composite.channels[c] = imgprep::prepare_channel(gray, render.prep).image;
  }
  if (kinds.size() == 3) {
    const std::string stem = path_in(out_dir, "composite");
    imgprep::write_composite(stem, composite, {{"signal", signal_path}, {"render", render.to_json()}});
    written.insert(written.end(), {stem + ".ppm", stem + ".json"});
  }
  return written;
}

// ---- dataset --------------------------------------------------------------------

dataset::Manifest cmd_dataset(const RunConfig& cfg, const std::string& out_dir) {
  cfg.validate();
  ensure_dir(out_dir);
  auto m = dataset::generate_corpus(cfg.corpus, cfg.corpus_seed(), out_dir, Exec::parallel);
  io::write_text_atomic(path_in(out_dir, "run_config.json"), cfg.to_json().dump(2) + "\n");
  return m;
}

// ---- train ----------------------------------------------------------------------

TrainSummary cmd_train(const RunConfig& cfg, const std::string& corpus_dir, const std::string& out_dir, bool verbose) {
  cfg.validate();
  const auto m = dataset::load_manifest(corpus_dir);
  const auto train_idx = m.indices(dataset::Split::Train);
  if (train_idx.empty()) throw SamplingError(corpus_dir + ": train split is empty");
  const auto images = siamese::load_images(m, corpus_dir, train_idx);

  const auto t0 = std::chrono::steady_clock::now();
  const auto progress = [&](std::size_t it, double loss) {
    if (verbose && (it % 10 == 0 || it + 1 == cfg.train.iterations)) {
      std::cerr << "iteration " << it << " loss " << loss << "\n";
    }
  };
  const auto result = siamese::train(cfg.arch, cfg.train, m, images, Exec::parallel, progress);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  const auto smoothed = siamese::smooth(result.loss_trace, cfg.smoothing_window);
  std::string csv = "iteration,loss,smoothed_loss,learning_rate\n";
  for (std::size_t i = 0; i < result.loss_trace.size(); ++i) {
    csv += std::to_string(i) + "," + fmt(result.loss_trace[i]) + "," + fmt(smoothed[i]) + "," + fmt(result.lr_trace[i]) + "\n";
  }
  TrainSummary s{result.loss_trace.size(), result.pairs_consumed, smoothed.front(), smoothed.back(), seconds};

  ensure_dir(out_dir);
  siamese::save_checkpoint(path_in(out_dir, "checkpoint.bin"), result.params, result.loss_trace.size(),
                           {{"run_config", cfg.to_json()}});
  io::write_text_atomic(path_in(out_dir, "loss.csv"), csv);
  const json summary = {{"iterations", s.iterations},
                        {"pairs_consumed", s.pairs},
                        {"initial_smoothed_loss", s.initial_smoothed_loss},
                        {"final_smoothed_loss", s.final_smoothed_loss},
                        {"seconds", s.seconds},
                        {"corpus", corpus_dir},
                        {"run_config", cfg.to_json()}};
  io::write_text_atomic(path_in(out_dir, "train.json"), summary.dump(2) + "\n");
  return s;
}

// ---- eval -----------------------------------------------------------------------

siamese::EvalReport cmd_eval(const RunConfig& cfg, const std::string& corpus_dir, const std::string& checkpoint,
                             const std::string& out_dir) {
  const auto m = dataset::load_manifest(corpus_dir);
  const auto queries = m.indices(dataset::Split::Test);
  if (queries.empty()) throw SamplingError(corpus_dir + ": test split is empty");
  const auto ck = siamese::load_checkpoint(checkpoint);

  std::vector<std::size_t> needed = m.indices(dataset::Split::Train);
  needed.insert(needed.end(), queries.begin(), queries.end());
  const auto images = siamese::load_images(m, corpus_dir, needed);
  const auto report = siamese::evaluate(ck.params, m, images, m, images, queries, cfg.eval, Exec::parallel);

  ensure_dir(out_dir);
  json doc = report.to_json();
  doc["checkpoint"] = checkpoint;
  doc["corpus"] = corpus_dir;
  doc["support_per_class"] = cfg.eval.support_per_class;
  doc["support_draws"] = cfg.eval.support_draws;
  io::write_text_atomic(path_in(out_dir, "eval.json"), doc.dump(2) + "\n");

  std::string acc = "jsr_db,accuracy,queries\n";
  for (const auto& [jsr, a] : report.accuracy_by_jsr) {
    acc += fmt(jsr) + "," + fmt(a) + "," + std::to_string(report.queries_by_jsr.at(jsr)) + "\n";
  }
  io::write_text_atomic(path_in(out_dir, "accuracy_by_jsr.csv"), acc);

  std::string conf = "true_class";
  for (std::size_t c = 0; c < siamese::kClassCount; ++c) conf += ",pred_" + std::to_string(c);
  conf += "\n";
  for (std::size_t t = 0; t < siamese::kClassCount; ++t) {
    conf += std::to_string(t);
    for (auto v : report.confusion[t]) conf += "," + std::to_string(v);
    conf += "\n";
  }
  io::write_text_atomic(path_in(out_dir, "confusion.csv"), conf);
  return report;
}

// ---- report ---------------------------------------------------------------------

std::vector<std::string> cmd_report(const std::string& run_dir, const std::string& out_dir) {
  const auto loss = read_csv_columns(path_in(run_dir, "loss.csv"), 3);
  if (loss[0].empty()) throw ConfigError(run_dir + "/loss.csv has no rows");
  ensure_dir(out_dir);
  std::vector<std::string> written;

  {
    Canvas canvas(200, 400);
    const double hi = *std::max_element(loss[1].begin(), loss[1].end());
    canvas.series(loss[1], 0.0, hi, 170.0, false);  // raw trace, light gray
    canvas.series(loss[2], 0.0, hi, 0.0, false);    // smoothed trace, black
    written.push_back(path_in(out_dir, "loss_curve.pgm"));
    imgprep::write_pgm(written.back(), canvas.img);
  }

  const std::string eval_path = path_in(run_dir, "eval.json");
  if (fs::exists(eval_path)) {
    const json ev = parse_json_file(eval_path);
    std::vector<double> acc;
    std::string csv = "jsr_db,accuracy\n";
    for (const auto& row : ev.at("by_jsr")) {
      acc.push_back(row.at("accuracy").get<double>());
      csv += fmt(row.at("jsr_db").get<double>()) + "," + fmt(acc.back()) + "\n";
    }
    Canvas canvas(200, 300);
    canvas.series(acc, 0.0, 1.0, 0.0, true);
    written.push_back(path_in(out_dir, "accuracy_by_jsr.pgm"));
    imgprep::write_pgm(written.back(), canvas.img);
    written.push_back(path_in(out_dir, "accuracy_by_jsr.csv"));
    io::write_text_atomic(written.back(), csv);

    // Confusion heat map, 16 px per cell, darker = more; true class 0 on top.
    const auto& conf = ev.at("confusion");
    const std::size_t n = conf.size(), cell = 16;
    double peak = 1.0;
    for (const auto& r : conf) {
      for (const auto& v : r) peak = std::max(peak, v.get<double>());
    }
    GrayImage heat(n * cell, n * cell, 255.0);
    for (std::size_t t = 0; t < n; ++t) {
      for (std::size_t p = 0; p < n; ++p) {
        const double shade = 255.0 * (1.0 - conf[t][p].get<double>() / peak);
        for (std::size_t r = 0; r < cell; ++r) {
          for (std::size_t c = 0; c < cell; ++c) heat.at((n - 1 - t) * cell + r, p * cell + c) = std::round(shade);
        }
      }
    }
    written.push_back(path_in(out_dir, "confusion.pgm"));
    imgprep::write_pgm(written.back(), heat);
  }

  const json summary = {{"iterations", loss[0].size()},
                        {"initial_smoothed_loss", loss[2].front()},
                        {"final_smoothed_loss", loss[2].back()},
                        {"files", written}};
  written.push_back(path_in(out_dir, "summary.json"));
  io::write_text_atomic(written.back(), summary.dump(2) + "\n");
  return written;
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const IoError*>(&e) || dynamic_cast<const SamplingError*>(&e)) return 3;
  if (dynamic_cast<const NumericalError*>(&e) || dynamic_cast<const DegenerateInputError*>(&e)) return 4;
  if (dynamic_cast<const Error*>(&e)) return 2;
  return 1;
}

}  // namespace hopjam::app
