// Serial reference kernels. Written for obviousness, not speed: one output
// element at a time with explicit bounds tests.

#include "edda/kernels.hpp"

namespace edda::kernels::reference {
namespace {

std::size_t widx(const ConvGeometry& g, int oc, int ic, int ky, int kx) {
  return ((static_cast<std::size_t>(oc) * g.in_channels + ic) * g.kernel + ky) * g.kernel + kx;
}

std::size_t iidx(const ConvGeometry& g, int c, int y, int x) {
  return (static_cast<std::size_t>(c) * g.height + y) * g.width + x;
}

std::size_t oidx(const ConvGeometry& g, int c, int y, int x) {
  return (static_cast<std::size_t>(c) * g.out_height() + y) * g.out_width() + x;
}

}  // namespace

void conv2d_forward(const ConvGeometry& g, std::span<const double> in,
                    std::span<const double> weight, std::span<const double> bias,
                    std::span<double> out) {
  for (int oc = 0; oc < g.out_channels; ++oc) {
    for (int y = 0; y < g.out_height(); ++y) {
      for (int x = 0; x < g.out_width(); ++x) {
        double acc = bias[oc];
        for (int ic = 0; ic < g.in_channels; ++ic) {
          for (int ky = 0; ky < g.kernel; ++ky) {
            for (int kx = 0; kx < g.kernel; ++kx) {
              const int iy = y + ky - g.pad;
              const int ix = x + kx - g.pad;
              if (iy < 0 || iy >= g.height || ix < 0 || ix >= g.width) continue;
              acc += weight[widx(g, oc, ic, ky, kx)] * in[iidx(g, ic, iy, ix)];
            }
          }
        }
        out[oidx(g, oc, y, x)] = acc;
      }
    }
  }
}

void conv2d_backward_input(const ConvGeometry& g, std::span<const double> grad_out,
                           std::span<const double> weight, std::span<double> grad_in) {
  for (int ic = 0; ic < g.in_channels; ++ic) {
    for (int iy = 0; iy < g.height; ++iy) {
      for (int ix = 0; ix < g.width; ++ix) {
        double acc = 0.0;
        for (int oc = 0; oc < g.out_channels; ++oc) {
          for (int ky = 0; ky < g.kernel; ++ky) {
            for (int kx = 0; kx < g.kernel; ++kx) {
              const int y = iy - ky + g.pad;
              const int x = ix - kx + g.pad;
              if (y < 0 || y >= g.out_height() || x < 0 || x >= g.out_width()) continue;
              acc += weight[widx(g, oc, ic, ky, kx)] * grad_out[oidx(g, oc, y, x)];
            }
          }
        }
        grad_in[iidx(g, ic, iy, ix)] = acc;
      }
    }
  }
}

void conv2d_backward_params(const ConvGeometry& g, std::span<const double> grad_out,
                            std::span<const double> in, std::span<double> grad_weight,
                            std::span<double> grad_bias) {
  for (int oc = 0; oc < g.out_channels; ++oc) {
    for (int y = 0; y < g.out_height(); ++y) {
      for (int x = 0; x < g.out_width(); ++x) {
        const double go = grad_out[oidx(g, oc, y, x)];
        grad_bias[oc] += go;
        for (int ic = 0; ic < g.in_channels; ++ic) {
          for (int ky = 0; ky < g.kernel; ++ky) {
            for (int kx = 0; kx < g.kernel; ++kx) {
              const int iy = y + ky - g.pad;
              const int ix = x + kx - g.pad;
              if (iy < 0 || iy >= g.height || ix < 0 || ix >= g.width) continue;
              grad_weight[widx(g, oc, ic, ky, kx)] += go * in[iidx(g, ic, iy, ix)];
            }
          }
        }
      }
    }
  }
}

void linear_forward(int in_features, int out_features, std::span<const double> in,
                    std::span<const double> weight, std::span<const double> bias,
                    std::span<double> out) {
  for (int o = 0; o < out_features; ++o) {
    double acc = bias[o];
    for (int i = 0; i < in_features; ++i) {
      acc += weight[static_cast<std::size_t>(o) * in_features + i] * in[i];
    }
    out[o] = acc;
  }
}

void linear_backward_input(int in_features, int out_features, std::span<const double> grad_out,
                           std::span<const double> weight, std::span<double> grad_in) {
  for (int i = 0; i < in_features; ++i) grad_in[i] = 0.0;
  for (int o = 0; o < out_features; ++o) {
    for (int i = 0; i < in_features; ++i) {
      grad_in[i] += weight[static_cast<std::size_t>(o) * in_features + i] * grad_out[o];
    }
  }
}

void linear_backward_params(int in_features, int out_features, std::span<const double> grad_out,
                            std::span<const double> in, std::span<double> grad_weight,
                            std::span<double> grad_bias) {
  for (int o = 0; o < out_features; ++o) {
    for (int i = 0; i < in_features; ++i) {
      grad_weight[static_cast<std::size_t>(o) * in_features + i] += grad_out[o] * in[i];
    }
    grad_bias[o] += grad_out[o];
  }
}

}  // namespace edda::kernels::reference
