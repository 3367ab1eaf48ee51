#include "flicker/diffnet/layers.hpp"

#include <algorithm>
#include <string>

#include "flicker/error.hpp"

namespace flicker::diffnet {
namespace {

// Kernel taps [lo, hi) that land inside the input for output index o.
struct TapRange {
  std::size_t lo, hi;
  std::ptrdiff_t base;  // input index of tap 0
};

TapRange taps(std::size_t o, std::size_t stride, std::size_t pad, std::size_t kernel, std::size_t in) {
  const auto base = static_cast<std::ptrdiff_t>(o * stride) - static_cast<std::ptrdiff_t>(pad);
  const auto lo = static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, -base));
  const auto hi = static_cast<std::size_t>(
      std::clamp<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(in) - base, 0, static_cast<std::ptrdiff_t>(kernel)));
  return {lo, std::max(lo, hi), base};
}

std::size_t out_len(std::size_t in, std::size_t k, std::size_t s, std::size_t p) {
  if (in + 2 * p < k || s == 0) throw ShapeError("conv3d: input extent smaller than kernel");
  return (in + 2 * p - k) / s + 1;
}

}  // namespace

Extent Conv3dShape::output_extent(const Extent& in) const {
  if (in.c != in_channels)
    throw ShapeError("conv3d: expected " + std::to_string(in_channels) + " input channels, got " +
                     std::to_string(in.c));
  return {out_len(in.t, kernel[0], stride[0], padding[0]), out_len(in.h, kernel[1], stride[1], padding[1]),
          out_len(in.w, kernel[2], stride[2], padding[2]), out_channels};
}

void conv3d_forward(const Conv3dShape& s, const Extent& ie, std::span<const double> in,
                    std::span<const double> weight, std::span<const double> bias, std::span<double> out) {
  const Extent oe = s.output_extent(ie);
  const std::size_t ci_n = s.in_channels, co_n = s.out_channels;
  const std::size_t tap_stride = ci_n * co_n;
  double* o = out.data();
  for (std::size_t to = 0; to < oe.t; ++to) {
    const TapRange rt = taps(to, s.stride[0], s.padding[0], s.kernel[0], ie.t);
    for (std::size_t ho = 0; ho < oe.h; ++ho) {
      const TapRange rh = taps(ho, s.stride[1], s.padding[1], s.kernel[1], ie.h);
      for (std::size_t wo = 0; wo < oe.w; ++wo, o += co_n) {
        const TapRange rw = taps(wo, s.stride[2], s.padding[2], s.kernel[2], ie.w);
        std::copy(bias.begin(), bias.end(), o);
        for (std::size_t kt = rt.lo; kt < rt.hi; ++kt) {
          const std::size_t ti = static_cast<std::size_t>(rt.base + static_cast<std::ptrdiff_t>(kt));
          for (std::size_t kh = rh.lo; kh < rh.hi; ++kh) {
            const std::size_t hi = static_cast<std::size_t>(rh.base + static_cast<std::ptrdiff_t>(kh));
            const double* x = in.data() + ((ti * ie.h + hi) * ie.w + static_cast<std::size_t>(rw.base + rw.lo)) * ci_n;
            const double* wk = weight.data() + ((kt * s.kernel[1] + kh) * s.kernel[2] + rw.lo) * tap_stride;
            for (std::size_t kw = rw.lo; kw < rw.hi; ++kw, x += ci_n, wk += tap_stride) {
              for (std::size_t ci = 0; ci < ci_n; ++ci) {
                const double xv = x[ci];
                const double* wr = wk + ci * co_n;
                for (std::size_t co = 0; co < co_n; ++co) o[co] += xv * wr[co];
              }
            }
          }
        }
      }
    }
  }
}

void conv3d_backward_input(const Conv3dShape& s, const Extent& ie, std::span<const double> grad_out,
                           std::span<const double> weight, std::span<double> grad_in) {
  const Extent oe = s.output_extent(ie);
  const std::size_t ci_n = s.in_channels, co_n = s.out_channels;
  const std::size_t tap_stride = ci_n * co_n;
  const double* g = grad_out.data();
  for (std::size_t to = 0; to < oe.t; ++to) {
    const TapRange rt = taps(to, s.stride[0], s.padding[0], s.kernel[0], ie.t);
    for (std::size_t ho = 0; ho < oe.h; ++ho) {
      const TapRange rh = taps(ho, s.stride[1], s.padding[1], s.kernel[1], ie.h);
      for (std::size_t wo = 0; wo < oe.w; ++wo, g += co_n) {
        const TapRange rw = taps(wo, s.stride[2], s.padding[2], s.kernel[2], ie.w);
        for (std::size_t kt = rt.lo; kt < rt.hi; ++kt) {
          const std::size_t ti = static_cast<std::size_t>(rt.base + static_cast<std::ptrdiff_t>(kt));
          for (std::size_t kh = rh.lo; kh < rh.hi; ++kh) {
            const std::size_t hi = static_cast<std::size_t>(rh.base + static_cast<std::ptrdiff_t>(kh));
            double* gx = grad_in.data() + ((ti * ie.h + hi) * ie.w + static_cast<std::size_t>(rw.base + rw.lo)) * ci_n;
            const double* wk = weight.data() + ((kt * s.kernel[1] + kh) * s.kernel[2] + rw.lo) * tap_stride;
            for (std::size_t kw = rw.lo; kw < rw.hi; ++kw, gx += ci_n, wk += tap_stride) {
              for (std::size_t ci = 0; ci < ci_n; ++ci) {
                const double* wr = wk + ci * co_n;
                double acc = 0.0;
                for (std::size_t co = 0; co < co_n; ++co) acc += wr[co] * g[co];
                gx[ci] += acc;
              }
            }
          }
        }
      }
    }
  }
}

void conv3d_backward_params(const Conv3dShape& s, const Extent& ie, std::span<const double> in,
                            std::span<const double> grad_out, std::span<double> grad_weight,
                            std::span<double> grad_bias) {
  const Extent oe = s.output_extent(ie);
  const std::size_t ci_n = s.in_channels, co_n = s.out_channels;
  const std::size_t tap_stride = ci_n * co_n;
  const double* g = grad_out.data();
  for (std::size_t to = 0; to < oe.t; ++to) {
    const TapRange rt = taps(to, s.stride[0], s.padding[0], s.kernel[0], ie.t);
    for (std::size_t ho = 0; ho < oe.h; ++ho) {
      const TapRange rh = taps(ho, s.stride[1], s.padding[1], s.kernel[1], ie.h);
      for (std::size_t wo = 0; wo < oe.w; ++wo, g += co_n) {
        const TapRange rw = taps(wo, s.stride[2], s.padding[2], s.kernel[2], ie.w);
        for (std::size_t co = 0; co < co_n; ++co) grad_bias[co] += g[co];
        for (std::size_t kt = rt.lo; kt < rt.hi; ++kt) {
          const std::size_t ti = static_cast<std::size_t>(rt.base + static_cast<std::ptrdiff_t>(kt));
          for (std::size_t kh = rh.lo; kh < rh.hi; ++kh) {
            const std::size_t hi = static_cast<std::size_t>(rh.base + static_cast<std::ptrdiff_t>(kh));
            const double* x = in.data() + ((ti * ie.h + hi) * ie.w + static_cast<std::size_t>(rw.base + rw.lo)) * ci_n;
            double* gw = grad_weight.data() + ((kt * s.kernel[1] + kh) * s.kernel[2] + rw.lo) * tap_stride;
            for (std::size_t kw = rw.lo; kw < rw.hi; ++kw, x += ci_n, gw += tap_stride) {
              for (std::size_t ci = 0; ci < ci_n; ++ci) {
                const double xv = x[ci];
                double* gr = gw + ci * co_n;
                for (std::size_t co = 0; co < co_n; ++co) gr[co] += xv * g[co];
              }
            }
          }
        }
      }
    }
  }
}

void relu_forward(std::span<double> x) {
  for (double& v : x) v = v > 0.0 ? v : 0.0;
}

void relu_backward(std::span<const double> activation, std::span<double> grad) {
  for (std::size_t i = 0; i < grad.size(); ++i)
    if (!(activation[i] > 0.0)) grad[i] = 0.0;
}

void mean_pool_forward(const Extent& ie, std::span<const double> in, std::span<double> out) {
  std::fill(out.begin(), out.end(), 0.0);
  const double* x = in.data();
  for (std::size_t p = 0; p < ie.positions(); ++p, x += ie.c)
    for (std::size_t c = 0; c < ie.c; ++c) out[c] += x[c];
  const double inv = 1.0 / static_cast<double>(ie.positions());
  for (double& v : out) v *= inv;
}

void mean_pool_backward(const Extent& ie, std::span<const double> grad_out, std::span<double> grad_in) {
  const double inv = 1.0 / static_cast<double>(ie.positions());
  double* g = grad_in.data();
  for (std::size_t p = 0; p < ie.positions(); ++p, g += ie.c)
    for (std::size_t c = 0; c < ie.c; ++c) g[c] = grad_out[c] * inv;
}

void dense_forward(std::size_t in, std::size_t out_dim, std::span<const double> x, std::span<const double> weight,
                   std::span<const double> bias, std::span<double> out) {
  for (std::size_t k = 0; k < out_dim; ++k) {
    double acc = bias[k];
    for (std::size_t j = 0; j < in; ++j) acc += weight[k * in + j] * x[j];
    out[k] = acc;
  }
}

void dense_backward(std::size_t in, std::size_t out_dim, std::span<const double> x, std::span<const double> weight,
                    std::span<const double> grad_out, std::span<double> grad_x, std::span<double> grad_weight,
                    std::span<double> grad_bias) {
  if (!grad_x.empty()) {
    std::fill(grad_x.begin(), grad_x.end(), 0.0);
    for (std::size_t k = 0; k < out_dim; ++k)
      for (std::size_t j = 0; j < in; ++j) grad_x[j] += weight[k * in + j] * grad_out[k];
  }
  if (!grad_weight.empty()) {
    for (std::size_t k = 0; k < out_dim; ++k) {
      grad_bias[k] += grad_out[k];
      for (std::size_t j = 0; j < in; ++j) grad_weight[k * in + j] += grad_out[k] * x[j];
    }
  }
}

}  // namespace flicker::diffnet
