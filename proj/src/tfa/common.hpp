#pragma once

#include <cmath>
#include <complex>
#include <numbers>

#include "hopjam/error.hpp"
#include "hopjam/tfa.hpp"

namespace hopjam::tfa::detail {

/// exp(i 2 pi c), reducing c to its fractional part first so that large
/// cycle counts keep full phase precision.
inline cd cis_cycles(double c) { return std::polar(1.0, 2.0 * std::numbers::pi * (c - std::floor(c))); }

/// Empty spectrogram on the grid's time bins and frequency axis.
inline Spectrogram skeleton(TransformKind kind, const ComplexSignal& x, const TfGridSpec& grid,
                            std::vector<double> freq_axis) {
  if (x.size() == 0) throw DimensionError("transform: empty signal");
  grid.validate(x.grid().sample_rate_hz);
  Spectrogram sp;
  sp.kind = kind;
  sp.n_time = grid.n_time_bins;
  sp.n_freq = freq_axis.size();
  sp.freq_axis_hz = std::move(freq_axis);
  sp.values.assign(sp.n_time * sp.n_freq, 0.0);
  sp.edge_affected.assign(sp.n_time, 0);
  for (std::size_t n : grid.time_indices(x.size())) sp.time_axis_s.push_back(x.grid().time_of(n));
  sp.params = grid.to_json();
  sp.params["sample_rate_hz"] = x.grid().sample_rate_hz;
  sp.params["n_samples"] = x.size();
  return sp;
}

/// Half length M of the lag window (lags -M..M).  Unwindowed transforms take
/// `unwindowed_half`.
inline std::size_t lag_half_length(const TfGridSpec& grid, std::size_t n_samples, std::size_t unwindowed_half) {
  if (grid.window_length == 0) return unwindowed_half;
  if (grid.window_length > n_samples) throw DimensionError("transform: lag window longer than signal");
  return (grid.window_length - 1) / 2;
}

inline void flag_edges(Spectrogram& sp, const std::vector<std::size_t>& idx, std::size_t n_samples, double reach) {
  for (std::size_t j = 0; j < idx.size(); ++j) {
    const double n = static_cast<double>(idx[j]);
    sp.edge_affected[j] = (n < reach || n + reach > static_cast<double>(n_samples - 1)) ? 1 : 0;
  }
}

}  // namespace hopjam::tfa::detail
