#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace flicker::diffnet {

// Spatio-temporal extent of a channels-last activation (T x H x W x C).
struct Extent {
  std::size_t t = 0, h = 0, w = 0, c = 0;
  std::size_t volume() const { return t * h * w * c; }
  std::size_t positions() const { return t * h * w; }
  bool operator==(const Extent&) const = default;
};

// 3D convolution geometry. Weights are laid out [kt][kh][kw][in][out], bias [out].
struct Conv3dShape {
  std::size_t in_channels = 0, out_channels = 0;
  std::array<std::size_t, 3> kernel{};   // t, h, w
  std::array<std::size_t, 3> stride{1, 1, 1};
  std::array<std::size_t, 3> padding{};  // zero padding on both sides

  std::size_t weight_count() const { return kernel[0] * kernel[1] * kernel[2] * in_channels * out_channels; }
  // Throws ShapeError when `in` does not fit the kernel.
  Extent output_extent(const Extent& in) const;
  bool operator==(const Conv3dShape&) const = default;
};

// out = conv(in) + bias.
void conv3d_forward(const Conv3dShape& s, const Extent& in_extent, std::span<const double> in,
                    std::span<const double> weight, std::span<const double> bias, std::span<double> out);

// Accumulates d(loss)/d(in) into grad_in.
void conv3d_backward_input(const Conv3dShape& s, const Extent& in_extent, std::span<const double> grad_out,
                           std::span<const double> weight, std::span<double> grad_in);

// Accumulates d(loss)/d(weight) and d(loss)/d(bias).
void conv3d_backward_params(const Conv3dShape& s, const Extent& in_extent, std::span<const double> in,
                            std::span<const double> grad_out, std::span<double> grad_weight,
                            std::span<double> grad_bias);

// In-place ReLU; the derivative at exactly zero is taken as zero.
void relu_forward(std::span<double> x);
// grad *= (activation > 0), where activation is the ReLU output.
void relu_backward(std::span<const double> activation, std::span<double> grad);

// Mean over all positions for each channel.
void mean_pool_forward(const Extent& in_extent, std::span<const double> in, std::span<double> out);
// Broadcasts grad_out / positions back onto every position (overwrites grad_in).
void mean_pool_backward(const Extent& in_extent, std::span<const double> grad_out, std::span<double> grad_in);

// out = W x + b with W stored row-major [out][in].
void dense_forward(std::size_t in, std::size_t out_dim, std::span<const double> x, std::span<const double> weight,
                   std::span<const double> bias, std::span<double> out);
void dense_backward(std::size_t in, std::size_t out_dim, std::span<const double> x, std::span<const double> weight,
                    std::span<const double> grad_out, std::span<double> grad_x, std::span<double> grad_weight,
                    std::span<double> grad_bias);

}  // namespace flicker::diffnet
