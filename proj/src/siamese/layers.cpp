#include "hopjam/layers.hpp"

#include <algorithm>
#include <cmath>

#include "hopjam/error.hpp"

namespace hopjam::layers {
namespace {

void require(bool ok, const char* what) {
  if (!ok) throw DimensionError(what);
}

}  // namespace

Shape3 conv_output_shape(Shape3 in, std::size_t out_channels, std::size_t k) {
  require(k >= 1 && in.h >= k && in.w >= k, "convolution kernel larger than its input");
  return {out_channels, in.h - k + 1, in.w - k + 1};
}

void conv2d_forward(std::span<const double> in, Shape3 s, std::span<const double> kernel,
                    std::span<const double> bias, std::size_t out_channels, std::size_t k,
                    std::span<double> out, Exec exec) {
  const Shape3 o = conv_output_shape(s, out_channels, k);
  require(in.size() == s.size(), "conv input size");
  require(kernel.size() == out_channels * s.c * k * k, "conv kernel size");
  require(bias.size() == out_channels, "conv bias size");
  require(out.size() == o.size(), "conv output size");
  const std::size_t plane = o.h * o.w;
  for_each_index(exec, out_channels, [&](std::size_t oc) {
    double* dst = out.data() + oc * plane;
    std::fill(dst, dst + plane, bias[oc]);
    for (std::size_t c = 0; c < s.c; ++c) {
      const double* src = in.data() + c * s.h * s.w;
      const double* kern = kernel.data() + (oc * s.c + c) * k * k;
      for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
          const double wgt = kern[i * k + j];
          for (std::size_t y = 0; y < o.h; ++y) {
            const double* row = src + (y + i) * s.w + j;
            double* drow = dst + y * o.w;
            for (std::size_t x = 0; x < o.w; ++x) drow[x] += wgt * row[x];
          }
        }
      }
    }
  });
}

void conv2d_backward(std::span<const double> in, Shape3 s, std::span<const double> kernel,
                     std::size_t out_channels, std::size_t k, std::span<const double> d_out,
                     std::span<double> d_kernel, std::span<double> d_bias, std::span<double> d_in,
                     Exec exec) {
  const Shape3 o = conv_output_shape(s, out_channels, k);
  require(in.size() == s.size() && d_out.size() == o.size(), "conv backward sizes");
  require(d_kernel.size() == kernel.size() && d_bias.size() == out_channels, "conv gradient sizes");
  require(d_in.empty() || d_in.size() == s.size(), "conv input gradient size");
  const std::size_t plane = o.h * o.w;

  for_each_index(exec, out_channels, [&](std::size_t oc) {
    const double* g = d_out.data() + oc * plane;
    double bsum = 0.0;
    for (std::size_t n = 0; n < plane; ++n) bsum += g[n];
    d_bias[oc] += bsum;
    // Column partial sums keep the inner loop elementwise (vectorizable).
    std::vector<double> partial(o.w);
    for (std::size_t c = 0; c < s.c; ++c) {
      const double* src = in.data() + c * s.h * s.w;
      double* dk = d_kernel.data() + (oc * s.c + c) * k * k;
      for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
          std::fill(partial.begin(), partial.end(), 0.0);
          for (std::size_t y = 0; y < o.h; ++y) {
            const double* row = src + (y + i) * s.w + j;
            const double* grow = g + y * o.w;
            for (std::size_t x = 0; x < o.w; ++x) partial[x] += grow[x] * row[x];
          }
          double acc = 0.0;
          for (double v : partial) acc += v;
          dk[i * k + j] += acc;
        }
      }
    }
  });

  if (d_in.empty()) return;
  for_each_index(exec, s.c, [&](std::size_t c) {
    double* dst = d_in.data() + c * s.h * s.w;
    std::fill(dst, dst + s.h * s.w, 0.0);
    for (std::size_t oc = 0; oc < out_channels; ++oc) {
      const double* g = d_out.data() + oc * plane;
      const double* kern = kernel.data() + (oc * s.c + c) * k * k;
      for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
          const double wgt = kern[i * k + j];
          for (std::size_t y = 0; y < o.h; ++y) {
            double* row = dst + (y + i) * s.w + j;
            const double* grow = g + y * o.w;
            for (std::size_t x = 0; x < o.w; ++x) row[x] += wgt * grow[x];
          }
        }
      }
    }
  });
}

void relu_forward(std::span<double> x) {
  for (auto& v : x) v = v > 0.0 ? v : 0.0;
}

void relu_backward(std::span<const double> activated, std::span<double> d) {
  require(activated.size() == d.size(), "relu backward size");
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (!(activated[i] > 0.0)) d[i] = 0.0;
  }
}

Shape3 pool_output_shape(Shape3 in) {
  require(in.h >= 2 && in.w >= 2, "max pooling input smaller than 2 x 2");
  return {in.c, in.h / 2, in.w / 2};
}

void maxpool_forward(std::span<const double> in, Shape3 s, std::span<double> out,
                     std::span<std::uint32_t> argmax, Exec exec) {
  const Shape3 o = pool_output_shape(s);
  require(in.size() == s.size() && out.size() == o.size() && argmax.size() == o.size(),
          "max pooling sizes");
  for_each_index(exec, s.c, [&](std::size_t c) {
    for (std::size_t y = 0; y < o.h; ++y) {
      for (std::size_t x = 0; x < o.w; ++x) {
        std::size_t best = (c * s.h + 2 * y) * s.w + 2 * x;
        for (std::size_t dy = 0; dy < 2; ++dy) {
          for (std::size_t dx = 0; dx < 2; ++dx) {
            const std::size_t idx = (c * s.h + 2 * y + dy) * s.w + 2 * x + dx;
            if (in[idx] > in[best]) best = idx;
          }
        }
        const std::size_t dst = (c * o.h + y) * o.w + x;
        out[dst] = in[best];
        argmax[dst] = static_cast<std::uint32_t>(best);
      }
    }
  });
}

void maxpool_backward(std::span<const double> d_out, std::span<const std::uint32_t> argmax,
                      std::span<double> d_in) {
  require(d_out.size() == argmax.size(), "max pooling backward sizes");
  std::fill(d_in.begin(), d_in.end(), 0.0);
  // Pool windows do not overlap, so each input cell receives at most one value.
  for (std::size_t i = 0; i < d_out.size(); ++i) d_in[argmax[i]] = d_out[i];
}

void dense_forward(std::span<const double> x, std::span<const double> weight,
                   std::span<const double> bias, std::span<double> y, Exec exec) {
  const std::size_t n_in = x.size(), n_out = y.size();
  require(weight.size() == n_in * n_out && bias.size() == n_out, "dense layer sizes");
  for_each_index(exec, n_out, [&](std::size_t o) {
    const double* row = weight.data() + o * n_in;
    double acc = bias[o];
    for (std::size_t i = 0; i < n_in; ++i) acc += row[i] * x[i];
    y[o] = acc;
  });
}

void dense_backward(std::span<const double> x, std::span<const double> weight,
                    std::span<const double> d_y, std::span<double> d_weight,
                    std::span<double> d_bias, std::span<double> d_x, Exec exec) {
  const std::size_t n_in = x.size(), n_out = d_y.size();
  require(weight.size() == n_in * n_out && d_weight.size() == weight.size() &&
              d_bias.size() == n_out && (d_x.empty() || d_x.size() == n_in),
          "dense backward sizes");
  for_each_index(exec, n_out, [&](std::size_t o) {
    const double g = d_y[o];
    d_bias[o] += g;
    if (g == 0.0) return;
    double* row = d_weight.data() + o * n_in;
    for (std::size_t i = 0; i < n_in; ++i) row[i] += g * x[i];
  });
  if (d_x.empty()) return;
  constexpr std::size_t kBlock = 256;
  const std::size_t n_blocks = (n_in + kBlock - 1) / kBlock;
  for_each_index(exec, n_blocks, [&](std::size_t blk) {
    const std::size_t lo = blk * kBlock, hi = std::min(n_in, lo + kBlock);
    std::fill(d_x.begin() + static_cast<std::ptrdiff_t>(lo), d_x.begin() + static_cast<std::ptrdiff_t>(hi), 0.0);
    for (std::size_t o = 0; o < n_out; ++o) {
      const double g = d_y[o];
      const double* row = weight.data() + o * n_in;
      for (std::size_t i = lo; i < hi; ++i) d_x[i] += row[i] * g;
    }
  });
}

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace hopjam::layers
