#include <cmath>

#include "hopjam/error.hpp"
#include "hopjam/sigsynth.hpp"

namespace hopjam::sigsynth {

SamplingGrid SamplingGrid::make(double sample_rate_hz, double duration_s) {
  SamplingGrid g;
  g.sample_rate_hz = sample_rate_hz;
  g.duration_s = duration_s;
  const double n = std::round(sample_rate_hz * duration_s);
  g.n_samples = n > 0 ? static_cast<std::size_t>(n) : 0;
  g.validate();
  return g;
}

void SamplingGrid::validate() const {
  if (!(sample_rate_hz > 0.0) || !std::isfinite(sample_rate_hz)) {
    throw ConfigError("sampling grid: sample_rate_hz must be positive");
  }
  if (!(duration_s > 0.0) || !std::isfinite(duration_s)) {
    throw ConfigError("sampling grid: duration_s must be positive");
  }
  if (n_samples == 0) throw ConfigError("sampling grid: n_samples must be positive");
  if (static_cast<double>(n_samples) != std::round(sample_rate_hz * duration_s)) {
    throw ConfigError("sampling grid: n_samples != round(sample_rate_hz * duration_s)");
  }
}

ComplexSignal::ComplexSignal(SamplingGrid grid) : grid_(grid), samples_(grid.n_samples, cd{}) {}

ComplexSignal::ComplexSignal(SamplingGrid grid, std::vector<cd> samples)
    : grid_(grid), samples_(std::move(samples)) {
  if (samples_.size() != grid_.n_samples) {
    throw DimensionError("signal has " + std::to_string(samples_.size()) + " samples, grid expects " +
                         std::to_string(grid_.n_samples));
  }
  for (const cd& v : samples_) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      throw NumericalError("signal contains a non-finite sample");
    }
  }
}

std::vector<double> ComplexSignal::real_part() const {
  std::vector<double> r(samples_.size());
  for (std::size_t i = 0; i < samples_.size(); ++i) r[i] = samples_[i].real();
  return r;
}

double ComplexSignal::energy() const {
  double e = 0.0;
  for (const cd& v : samples_) e += std::norm(v);
  return e;
}

ComplexSignal ComplexSignal::scaled(double factor) const {
  std::vector<cd> out(samples_.size());
  for (std::size_t i = 0; i < samples_.size(); ++i) out[i] = samples_[i] * factor;
  return ComplexSignal(grid_, std::move(out));
}

double average_amplitude(const ComplexSignal& x, AmplitudeMeasure measure) {
  if (x.size() == 0) return 0.0;
  double acc = 0.0;
  if (measure == AmplitudeMeasure::MeanAbs) {
    for (const cd& v : x.samples()) acc += std::abs(v);
    return acc / static_cast<double>(x.size());
  }
  for (const cd& v : x.samples()) acc += std::norm(v);
  return std::sqrt(acc / static_cast<double>(x.size()));
}

double mean_power(const ComplexSignal& x) {
  return x.size() == 0 ? 0.0 : x.energy() / static_cast<double>(x.size());
}

}  // namespace hopjam::sigsynth
