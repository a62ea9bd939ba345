#include "hopjam/dataset.hpp"
#include "hopjam/error.hpp"
#include "hopjam/jsonutil.hpp"

namespace hopjam::dataset {

using nlohmann::json;

void RenderConfig::validate(double sample_rate_hz) const {
  if (decimation == 0) throw ConfigError("render: decimation must be at least 1");
  const double rate = sample_rate_hz / static_cast<double>(decimation);
  if (decimation > 1 && (!(decimation_cutoff_hz > 0.0) || !(decimation_cutoff_hz <= 0.5 * rate))) {
    throw ConfigError("render: decimation cutoff must lie in (0, analysis Nyquist]");
  }
  grid.validate(rate);
  prep.validate();
}

json RenderConfig::to_json() const {
  return {{"decimation", decimation},
          {"decimation_cutoff_hz", decimation_cutoff_hz},
          {"decimation_taps", decimation_taps},
          {"tfa", grid.to_json()},
          {"imgprep", prep.to_json()}};
}

RenderConfig RenderConfig::from_json(const json& j) {
  using jsonutil::get_or;
  const std::string w = "render";
  RenderConfig c;
  c.decimation = get_or(j, "decimation", c.decimation, w);
  c.decimation_cutoff_hz = get_or(j, "decimation_cutoff_hz", c.decimation_cutoff_hz, w);
  c.decimation_taps = get_or(j, "decimation_taps", c.decimation_taps, w);
  if (j.is_object() && j.contains("tfa")) c.grid = tfa::TfGridSpec::from_json(j.at("tfa"));
  if (j.is_object() && j.contains("imgprep")) c.prep = imgprep::PrepParams::from_json(j.at("imgprep"));
  return c;
}

std::array<tfa::Spectrogram, 3> render_spectrograms(const sigsynth::ComplexSignal& x, const RenderConfig& cfg,
                                                    Exec exec) {
  return {tfa::cwt(x, cfg.grid, exec), tfa::mhd(x, cfg.grid, exec), tfa::bjd(x, cfg.grid, exec)};
}

RenderedImage render(const sigsynth::ComplexSignal& received, const RenderConfig& cfg, Exec exec) {
  cfg.validate(received.grid().sample_rate_hz);
  const auto x = cfg.decimation > 1
                     ? tfa::decimate(received, cfg.decimation, cfg.decimation_cutoff_hz, cfg.decimation_taps, exec)
                     : received;
  const auto spectrograms = render_spectrograms(x, cfg, exec);
  RenderedImage out;
  for (std::size_t c = 0; c < 3; ++c) {
    const auto res = imgprep::prepare_channel(tfa::to_gray(spectrograms[c]), cfg.prep);
    out.composite.channels[c] = res.image;
    out.diagnostics[c] = {res.binarization.threshold, res.binarization.iterations, res.binarization.converged,
                          res.zero_energy};
  }
  return out;
}

}  // namespace hopjam::dataset
