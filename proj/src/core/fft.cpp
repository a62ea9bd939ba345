#include "hopjam/fft.hpp"

#include <cmath>
#include <numbers>

namespace hopjam::fft {
namespace {

constexpr std::size_t kMaxDirectRadix = 64;

std::vector<std::size_t> factorize(std::size_t n) {
  std::vector<std::size_t> f;
  while (n % 4 == 0) { f.push_back(4); n /= 4; }
  while (n % 2 == 0) { f.push_back(2); n /= 2; }
  for (std::size_t p = 3; p * p <= n; p += 2) {
    while (n % p == 0) { f.push_back(p); n /= p; }
  }
  if (n > 1) f.push_back(n);
  return f;
}

std::vector<cd> twiddles(std::size_t n) {
  std::vector<cd> tw(n);
  for (std::size_t i = 0; i < n; ++i) {
    tw[i] = std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n));
  }
  return tw;
}

struct Plan {
  std::size_t n;
  std::vector<std::size_t> factors;
  std::vector<cd> tw;  // exp(-2 pi i k / n)
};

// Out-of-place decimation-in-time step over the factor list.
void rec(const Plan& plan, const cd* in, std::size_t in_stride, cd* out, std::size_t n,
         std::size_t level, std::vector<cd>& scratch) {
  if (n == 1) {
    out[0] = in[0];
    return;
  }
  const std::size_t p = plan.factors[level];
  const std::size_t m = n / p;
  for (std::size_t r = 0; r < p; ++r) {
    rec(plan, in + r * in_stride, in_stride * p, out + r * m, m, level + 1, scratch);
  }
  const std::size_t tw_step = plan.n / n;
  // j * tw_step < plan.n for every index used below (j < n).
  const auto w = [&](std::size_t j) { return plan.tw[j * tw_step]; };

  if (p == 2) {
    for (std::size_t k = 0; k < m; ++k) {
      const cd a = out[k];
      const cd b = out[k + m] * w(k);
      out[k] = a + b;
      out[k + m] = a - b;
    }
    return;
  }
  if (p == 4) {
    for (std::size_t k = 0; k < m; ++k) {
      const cd a0 = out[k];
      const cd a1 = out[k + m] * w(k);
      const cd a2 = out[k + 2 * m] * w(2 * k);
      const cd a3 = out[k + 3 * m] * w(3 * k);
      const cd s02 = a0 + a2, d02 = a0 - a2;
      const cd s13 = a1 + a3, d13 = a1 - a3;
      const cd jd13(d13.imag(), -d13.real());  // -i * d13
      out[k] = s02 + s13;
      out[k + m] = d02 + jd13;
      out[k + 2 * m] = s02 - s13;
      out[k + 3 * m] = d02 - jd13;
    }
    return;
  }
  if (p == 5) {
    // Winograd-style radix-5 butterfly.
    const double c1 = std::cos(2.0 * std::numbers::pi / 5.0), c2 = std::cos(4.0 * std::numbers::pi / 5.0);
    const double s1 = std::sin(2.0 * std::numbers::pi / 5.0), s2 = std::sin(4.0 * std::numbers::pi / 5.0);
    for (std::size_t k = 0; k < m; ++k) {
      const cd a0 = out[k];
      const cd a1 = out[k + m] * w(k);
      const cd a2 = out[k + 2 * m] * w(2 * k);
      const cd a3 = out[k + 3 * m] * w(3 * k);
      const cd a4 = out[k + 4 * m] * w(4 * k);
      const cd b1 = a1 + a4, b2 = a2 + a3, d1 = a1 - a4, d2 = a2 - a3;
      const cd r1 = a0 + c1 * b1 + c2 * b2;
      const cd r2 = a0 + c2 * b1 + c1 * b2;
      const cd i1 = s1 * d1 + s2 * d2;  // multiplied by -i below
      const cd i2 = s2 * d1 - s1 * d2;
      const cd mi1(i1.imag(), -i1.real()), mi2(i2.imag(), -i2.real());
      out[k] = a0 + b1 + b2;
      out[k + m] = r1 + mi1;
      out[k + 4 * m] = r1 - mi1;
      out[k + 2 * m] = r2 + mi2;
      out[k + 3 * m] = r2 - mi2;
    }
    return;
  }
  // Generic radix p.
  scratch.resize(2 * p);
  cd* t = scratch.data();
  cd* y = scratch.data() + p;
  const std::size_t wp_step = plan.n / p;
  for (std::size_t k = 0; k < m; ++k) {
    for (std::size_t r = 0; r < p; ++r) t[r] = out[k + r * m] * w(r * k);
    for (std::size_t q = 0; q < p; ++q) {
      cd acc = 0.0;
      for (std::size_t r = 0; r < p; ++r) acc += t[r] * plan.tw[((r * q) % p) * wp_step];
      y[q] = acc;
    }
    for (std::size_t q = 0; q < p; ++q) out[k + q * m] = y[q];
  }
}

void mixed_radix(std::span<cd> data) {
  Plan plan{data.size(), factorize(data.size()), twiddles(data.size())};
  std::vector<cd> in(data.begin(), data.end());
  std::vector<cd> scratch;
  rec(plan, in.data(), 1, data.data(), data.size(), 0, scratch);
}

void bluestein(std::span<cd> data) {
  const std::size_t n = data.size();
  std::size_t m = 1;
  while (m < 2 * n - 1) m <<= 1;
  std::vector<cd> chirp(n);
  for (std::size_t k = 0; k < n; ++k) {
    // k^2 mod 2n keeps the angle argument small and exact.
    const std::size_t k2 = (k * k) % (2 * n);
    chirp[k] = std::polar(1.0, -std::numbers::pi * static_cast<double>(k2) / static_cast<double>(n));
  }
  std::vector<cd> a(m, 0.0), b(m, 0.0);
  for (std::size_t k = 0; k < n; ++k) a[k] = data[k] * chirp[k];
  b[0] = std::conj(chirp[0]);
  for (std::size_t k = 1; k < n; ++k) b[k] = b[m - k] = std::conj(chirp[k]);
  mixed_radix(a);
  mixed_radix(b);
  for (std::size_t i = 0; i < m; ++i) a[i] *= b[i];
  for (auto& v : a) v = std::conj(v);
  mixed_radix(a);
  const double scale = 1.0 / static_cast<double>(m);
  for (std::size_t k = 0; k < n; ++k) data[k] = std::conj(a[k]) * scale * chirp[k];
}

}  // namespace

void forward(std::span<cd> data) {
  if (data.size() <= 1) return;
  const auto f = factorize(data.size());
  if (f.back() > kMaxDirectRadix) {
    bluestein(data);
  } else {
    mixed_radix(data);
  }
}

void inverse(std::span<cd> data) {
  for (auto& v : data) v = std::conj(v);
  forward(data);
  const double scale = data.empty() ? 1.0 : 1.0 / static_cast<double>(data.size());
  for (auto& v : data) v = std::conj(v) * scale;
}

std::vector<cd> forward_copy(std::span<const cd> data) {
  std::vector<cd> out(data.begin(), data.end());
  forward(out);
  return out;
}

std::vector<cd> analytic_from_real(std::span<const double> x) {
  const std::size_t n = x.size();
  std::vector<cd> z(x.begin(), x.end());
  if (n < 2) return z;
  forward(z);
  // Bin 0 (and n/2 for even n) keep unit weight; positive bins doubled.
  const std::size_t half = n / 2;
  for (std::size_t k = 1; k < n; ++k) {
    if (k < (n + 1) / 2) {
      z[k] *= 2.0;
    } else if (!(n % 2 == 0 && k == half)) {
      z[k] = 0.0;
    }
  }
  inverse(z);
  for (std::size_t i = 0; i < n; ++i) z[i].real(x[i]);
  return z;
}

}  // namespace hopjam::fft
