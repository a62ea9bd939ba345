#pragma once

// Brute-force reference evaluations of the three transforms, written directly
// from their integral definitions with no precomputed tables, truncation or
// symmetry shortcuts.  O(N^2) to O(N^3); intended for records of at most a few
// hundred samples.

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "hopjam/tfa.hpp"

namespace oracle {

using cd = std::complex<double>;
using hopjam::sigsynth::ComplexSignal;
using hopjam::tfa::TfGridSpec;

inline constexpr double kPi = std::numbers::pi;

inline std::vector<std::size_t> time_bins(const TfGridSpec& g, std::size_t n) {
  std::vector<std::size_t> idx;
  for (std::size_t j = 0; j < g.n_time_bins; ++j) {
    idx.push_back(static_cast<std::size_t>(std::floor((j + 0.5) * static_cast<double>(n) / g.n_time_bins)));
  }
  return idx;
}

inline std::vector<double> freq_bins(const TfGridSpec& g) {
  std::vector<double> f;
  for (std::size_t k = 0; k < g.n_freq_bins; ++k) {
    f.push_back(g.freq_low_hz + (k + 0.5) * (g.freq_high_hz - g.freq_low_hz) / g.n_freq_bins);
  }
  return f;
}

inline double hamming(double m, double half) { return half == 0.0 ? 1.0 : 0.54 + 0.46 * std::cos(kPi * m / half); }

/// CWT(a, b) = (1/sqrt a) sum_u x(u) conj(phi((u - b)/a)) dt over the whole
/// record, phi(t) = pi^(-1/4) exp(i w0 t) exp(-t^2/2).  Layout [time][freq],
/// frequency ascending.
inline std::vector<cd> cwt(const ComplexSignal& x, const TfGridSpec& g) {
  const double dt = x.grid().dt();
  const auto idx = time_bins(g, x.size());
  const auto f = freq_bins(g);
  std::vector<cd> out(idx.size() * f.size());
  for (std::size_t j = 0; j < idx.size(); ++j) {
    const double b = idx[j] * dt;
    for (std::size_t k = 0; k < f.size(); ++k) {
      const double a = g.morlet_w0 / (2.0 * kPi * f[k]);
      cd acc{};
      for (std::size_t u = 0; u < x.size(); ++u) {
        const double t = (u * dt - b) / a;
        const cd phi = std::pow(kPi, -0.25) * std::exp(cd(-0.5 * t * t, g.morlet_w0 * t));
        acc += x[u] * std::conj(phi);
      }
      out[j * f.size() + k] = acc * dt / std::sqrt(a);
    }
  }
  return out;
}

/// Margenau-Hill distribution in its symmetric time-lag form:
/// (1/2) sum_m h(m) [x(t + m) x*(t) + x(t) x*(t - m)] e^{-i 2 pi f m dt} dt,
/// samples outside the record taken as zero.  window_length == 0 means every
/// lag with unit weight.
inline std::vector<double> mhd(const ComplexSignal& x, const TfGridSpec& g) {
  const double dt = x.grid().dt();
  const auto N = static_cast<long>(x.size());
  const auto idx = time_bins(g, x.size());
  const auto f = freq_bins(g);
  const long M = g.window_length == 0 ? N - 1 : static_cast<long>(g.window_length - 1) / 2;
  const bool windowed = g.window_length != 0 && g.window == hopjam::tfa::LagWindow::Hamming;
  auto at = [&](long i) { return (i >= 0 && i < N) ? x[static_cast<std::size_t>(i)] : cd{}; };
  std::vector<double> out(idx.size() * f.size());
  for (std::size_t j = 0; j < idx.size(); ++j) {
    const long n = static_cast<long>(idx[j]);
    for (std::size_t k = 0; k < f.size(); ++k) {
      cd acc{};
      for (long m = -M; m <= M; ++m) {
        const double h = windowed ? hamming(static_cast<double>(m), static_cast<double>(M)) : 1.0;
        const cd r = 0.5 * (at(n + m) * std::conj(at(n)) + at(n) * std::conj(at(n - m)));
        acc += h * r * std::exp(cd(0.0, -2.0 * kPi * f[k] * m * dt));
      }
      out[j * f.size() + k] = acc.real() * dt;
    }
  }
  return out;
}

/// Born-Jordan distribution as the literal double sum
/// sum_tau sum_u [1 / (2 a |tau|)] x(u + tau/2) x*(u - tau/2) e^{-i 2 pi f tau},
/// u over [t - a|tau|, t + a|tau|], on the lattice tau = 2 m dt, u = (n + p) dt.
inline std::vector<double> bjd(const ComplexSignal& x, const TfGridSpec& g) {
  const double dt = x.grid().dt();
  const auto N = static_cast<long>(x.size());
  const auto idx = time_bins(g, x.size());
  const auto f = freq_bins(g);
  const long M = g.window_length == 0 ? (N - 1) / 2 : static_cast<long>(g.window_length - 1) / 2;
  const bool windowed = g.window_length != 0 && g.window == hopjam::tfa::LagWindow::Hamming;
  auto at = [&](long i) { return (i >= 0 && i < N) ? x[static_cast<std::size_t>(i)] : cd{}; };
  std::vector<double> out(idx.size() * f.size());
  for (std::size_t j = 0; j < idx.size(); ++j) {
    const long n = static_cast<long>(idx[j]);
    for (std::size_t k = 0; k < f.size(); ++k) {
      cd acc{};
      for (long m = -M; m <= M; ++m) {
        const long W = static_cast<long>(std::floor(2.0 * g.bjd_a * std::abs(m)));
        const double h = windowed ? hamming(static_cast<double>(m), static_cast<double>(M)) : 1.0;
        const cd e = std::exp(cd(0.0, -2.0 * kPi * f[k] * (2.0 * m * dt)));
        cd inner{};
        for (long p = -W; p <= W; ++p) inner += at(n + p + m) * std::conj(at(n + p - m));
        acc += h * inner / static_cast<double>(2 * W + 1) * e;
      }
      out[j * f.size() + k] = acc.real() * 2.0 * dt;
    }
  }
  return out;
}

/// max |a - b| / max |b|.
template <class A, class B>
double rel_error(const A& a, const B& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num = std::max(num, std::abs(a[i] - b[i]));
    den = std::max(den, std::abs(b[i]));
  }
  return den == 0.0 ? num : num / den;
}

}  // namespace oracle
