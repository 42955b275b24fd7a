#include "edda/kernels.hpp"

#include <algorithm>
#include <limits>

namespace edda::kernels {
namespace {

// Below this many multiply-adds a kernel call stays on the calling thread.
constexpr std::size_t kParallelWork = 1 << 15;

// Output rows/cols o in [lo, hi) whose input coordinate o + k - pad is in range.
struct Span1d {
  int lo;
  int hi;
};

Span1d valid_range(int extent_in, int extent_out, int k, int pad) {
  const int lo = std::max(0, pad - k);
  const int hi = std::min(extent_out, extent_in + pad - k);
  return {lo, std::max(lo, hi)};
}

}  // namespace

void conv2d_forward(const ConvGeometry& g, std::span<const double> in,
                    std::span<const double> weight, std::span<const double> bias,
                    std::span<double> out) {
  const int oh = g.out_height();
  const int ow = g.out_width();
  const std::size_t in_plane = static_cast<std::size_t>(g.height) * g.width;
  const std::size_t out_plane = static_cast<std::size_t>(oh) * ow;
  const bool parallel = g.weight_size() * out_plane > kParallelWork;

#pragma omp parallel for schedule(static) if (parallel)
  for (int oc = 0; oc < g.out_channels; ++oc) {
    double* dst = out.data() + oc * out_plane;
    std::fill(dst, dst + out_plane, bias[oc]);
    for (int ic = 0; ic < g.in_channels; ++ic) {
      const double* src = in.data() + ic * in_plane;
      const double* w = weight.data() + (static_cast<std::size_t>(oc) * g.in_channels + ic) *
                                            g.kernel * g.kernel;
      for (int ky = 0; ky < g.kernel; ++ky) {
        const Span1d ys = valid_range(g.height, oh, ky, g.pad);
        for (int kx = 0; kx < g.kernel; ++kx) {
          const Span1d xs = valid_range(g.width, ow, kx, g.pad);
          const double wv = w[ky * g.kernel + kx];
          const int shift = kx - g.pad;
          for (int y = ys.lo; y < ys.hi; ++y) {
            const double* row_in = src + static_cast<std::size_t>(y + ky - g.pad) * g.width + shift;
            double* row_out = dst + static_cast<std::size_t>(y) * ow;
#pragma omp simd
            for (int x = xs.lo; x < xs.hi; ++x) row_out[x] += wv * row_in[x];
          }
        }
      }
    }
  }
}

void conv2d_backward_input(const ConvGeometry& g, std::span<const double> grad_out,
                           std::span<const double> weight, std::span<double> grad_in) {
  const int oh = g.out_height();
  const int ow = g.out_width();
  const std::size_t in_plane = static_cast<std::size_t>(g.height) * g.width;
  const std::size_t out_plane = static_cast<std::size_t>(oh) * ow;
  const bool parallel = g.weight_size() * out_plane > kParallelWork;

#pragma omp parallel for schedule(static) if (parallel)
  for (int ic = 0; ic < g.in_channels; ++ic) {
    double* dst = grad_in.data() + ic * in_plane;
    std::fill(dst, dst + in_plane, 0.0);
    for (int oc = 0; oc < g.out_channels; ++oc) {
      const double* src = grad_out.data() + oc * out_plane;
      const double* w = weight.data() + (static_cast<std::size_t>(oc) * g.in_channels + ic) *
                                            g.kernel * g.kernel;
      for (int ky = 0; ky < g.kernel; ++ky) {
        const Span1d ys = valid_range(g.height, oh, ky, g.pad);
        for (int kx = 0; kx < g.kernel; ++kx) {
          const Span1d xs = valid_range(g.width, ow, kx, g.pad);
          const double wv = w[ky * g.kernel + kx];
          const int shift = kx - g.pad;
          for (int y = ys.lo; y < ys.hi; ++y) {
            double* row_in = dst + static_cast<std::size_t>(y + ky - g.pad) * g.width + shift;
            const double* row_out = src + static_cast<std::size_t>(y) * ow;
#pragma omp simd
            for (int x = xs.lo; x < xs.hi; ++x) row_in[x] += wv * row_out[x];
          }
        }
      }
    }
  }
}

void conv2d_backward_params(const ConvGeometry& g, std::span<const double> grad_out,
                            std::span<const double> in, std::span<double> grad_weight,
                            std::span<double> grad_bias) {
  const int oh = g.out_height();
  const int ow = g.out_width();
  const std::size_t in_plane = static_cast<std::size_t>(g.height) * g.width;
  const std::size_t out_plane = static_cast<std::size_t>(oh) * ow;
  const bool parallel = g.weight_size() * out_plane > kParallelWork;

#pragma omp parallel for schedule(static) if (parallel)
  for (int oc = 0; oc < g.out_channels; ++oc) {
    const double* go = grad_out.data() + oc * out_plane;
    double bsum = 0.0;
    for (std::size_t i = 0; i < out_plane; ++i) bsum += go[i];
    grad_bias[oc] += bsum;
    for (int ic = 0; ic < g.in_channels; ++ic) {
      const double* src = in.data() + ic * in_plane;
      double* gw = grad_weight.data() + (static_cast<std::size_t>(oc) * g.in_channels + ic) *
                                            g.kernel * g.kernel;
      for (int ky = 0; ky < g.kernel; ++ky) {
        const Span1d ys = valid_range(g.height, oh, ky, g.pad);
        for (int kx = 0; kx < g.kernel; ++kx) {
          const Span1d xs = valid_range(g.width, ow, kx, g.pad);
          const int shift = kx - g.pad;
          double acc = 0.0;
          for (int y = ys.lo; y < ys.hi; ++y) {
            const double* row_in = src + static_cast<std::size_t>(y + ky - g.pad) * g.width + shift;
            const double* row_out = go + static_cast<std::size_t>(y) * ow;
            for (int x = xs.lo; x < xs.hi; ++x) acc += row_out[x] * row_in[x];
          }
          gw[ky * g.kernel + kx] += acc;
        }
      }
    }
  }
}

void maxpool2_forward(int channels, int height, int width, std::span<const double> in,
                      std::span<double> out, std::span<std::size_t> argmax) {
  const int oh = height / 2;
  const int ow = width / 2;
  for (int c = 0; c < channels; ++c) {
    for (int y = 0; y < oh; ++y) {
      for (int x = 0; x < ow; ++x) {
        std::size_t best = 0;
        double best_value = -std::numeric_limits<double>::infinity();
        for (int dy = 0; dy < 2; ++dy) {
          for (int dx = 0; dx < 2; ++dx) {
            const std::size_t idx =
                (static_cast<std::size_t>(c) * height + 2 * y + dy) * width + 2 * x + dx;
            if (in[idx] > best_value) {
              best_value = in[idx];
              best = idx;
            }
          }
        }
        const std::size_t o = (static_cast<std::size_t>(c) * oh + y) * ow + x;
        out[o] = best_value;
        argmax[o] = best;
      }
    }
  }
}

void maxpool2_backward(std::span<const double> grad_out, std::span<const std::size_t> argmax,
                       std::span<double> grad_in) {
  std::fill(grad_in.begin(), grad_in.end(), 0.0);
  for (std::size_t o = 0; o < grad_out.size(); ++o) grad_in[argmax[o]] += grad_out[o];
}

void linear_forward(int in_features, int out_features, std::span<const double> in,
                    std::span<const double> weight, std::span<const double> bias,
                    std::span<double> out) {
  const bool parallel = static_cast<std::size_t>(in_features) * out_features > kParallelWork;
#pragma omp parallel for schedule(static) if (parallel)
  for (int o = 0; o < out_features; ++o) {
    const double* w = weight.data() + static_cast<std::size_t>(o) * in_features;
    double acc = bias[o];
    for (int i = 0; i < in_features; ++i) acc += w[i] * in[i];
    out[o] = acc;
  }
}

void linear_backward_input(int in_features, int out_features, std::span<const double> grad_out,
                           std::span<const double> weight, std::span<double> grad_in) {
  const bool parallel = static_cast<std::size_t>(in_features) * out_features > kParallelWork;
#pragma omp parallel for schedule(static) if (parallel)
  for (int i = 0; i < in_features; ++i) {
    double acc = 0.0;
    for (int o = 0; o < out_features; ++o) {
      acc += weight[static_cast<std::size_t>(o) * in_features + i] * grad_out[o];
    }
    grad_in[i] = acc;
  }
}

void linear_backward_params(int in_features, int out_features, std::span<const double> grad_out,
                            std::span<const double> in, std::span<double> grad_weight,
                            std::span<double> grad_bias) {
  const bool parallel = static_cast<std::size_t>(in_features) * out_features > kParallelWork;
#pragma omp parallel for schedule(static) if (parallel)
  for (int o = 0; o < out_features; ++o) {
    const double go = grad_out[o];
    double* gw = grad_weight.data() + static_cast<std::size_t>(o) * in_features;
#pragma omp simd
    for (int i = 0; i < in_features; ++i) gw[i] += go * in[i];
    grad_bias[o] += go;
  }
}

}  // namespace edda::kernels
