#pragma once

// Dense CHW layer kernels used by the siamese network.  Every kernel has a
// serial and an OpenMP path selected by Exec; the parallel path partitions
// over independent output cells, so both paths are bit-identical.

#include <cstdint>
#include <span>
#include <vector>

#include "hopjam/exec.hpp"

namespace hopjam::layers {

struct Shape3 {
  std::size_t c = 0, h = 0, w = 0;
  std::size_t size() const { return c * h * w; }
  bool operator==(const Shape3&) const = default;
};

/// Output shape of a valid, stride-1 convolution with k x k kernels.
Shape3 conv_output_shape(Shape3 in, std::size_t out_channels, std::size_t k);

/// out[o, y, x] = bias[o] + sum_{c, i, j} kernel[o, c, i, j] in[c, y + i, x + j]
void conv2d_forward(std::span<const double> in, Shape3 in_shape, std::span<const double> kernel,
                    std::span<const double> bias, std::size_t out_channels, std::size_t k,
                    std::span<double> out, Exec exec);

/// Accumulates kernel and bias gradients (+=) and, if d_in is non-empty,
/// writes the input gradient (=).
void conv2d_backward(std::span<const double> in, Shape3 in_shape, std::span<const double> kernel,
                     std::size_t out_channels, std::size_t k, std::span<const double> d_out,
                     std::span<double> d_kernel, std::span<double> d_bias, std::span<double> d_in,
                     Exec exec);

/// In-place max(0, x).
void relu_forward(std::span<double> x);
/// Zeroes d where the activated output is not positive (subgradient 0 at the kink).
void relu_backward(std::span<const double> activated, std::span<double> d);

/// 2 x 2 max pooling with stride 2; trailing odd rows/columns are dropped.
/// `argmax` receives the flat input index of each selected cell (first
/// maximum in row-major order wins ties).
Shape3 pool_output_shape(Shape3 in);
void maxpool_forward(std::span<const double> in, Shape3 in_shape, std::span<double> out,
                     std::span<std::uint32_t> argmax, Exec exec);
/// d_in = 0 except at the selected cells, which receive d_out.
void maxpool_backward(std::span<const double> d_out, std::span<const std::uint32_t> argmax,
                      std::span<double> d_in);

/// y = W x + b with W stored row-major as [out][in].
void dense_forward(std::span<const double> x, std::span<const double> weight,
                   std::span<const double> bias, std::span<double> y, Exec exec);
/// Accumulates dW += dy x^T and db += dy; writes dx = W^T dy when non-empty.
void dense_backward(std::span<const double> x, std::span<const double> weight,
                    std::span<const double> d_y, std::span<double> d_weight,
                    std::span<double> d_bias, std::span<double> d_x, Exec exec);

double sigmoid(double z);

}  // namespace hopjam::layers
