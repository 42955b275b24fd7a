#pragma once

// Dense compute kernels for single-example, channel-planar tensors.
//
// The functions in edda::kernels are the production path: their outer loops
// are OpenMP-parallel over independent output slices, so every output element
// is written by exactly one thread and results do not depend on the thread
// count. edda::kernels::reference holds plain serial versions of the same
// operations; tests hold the two against each other and the benchmark target
// times them side by side.

#include <cstddef>
#include <span>

namespace edda::kernels {

// Stride-1 square convolution with symmetric zero padding.
struct ConvGeometry {
  int in_channels = 0;
  int out_channels = 0;
  int height = 0;
  int width = 0;
  int kernel = 3;
  int pad = 1;

  int out_height() const { return height + 2 * pad - kernel + 1; }
  int out_width() const { return width + 2 * pad - kernel + 1; }
  std::size_t in_size() const { return static_cast<std::size_t>(in_channels) * height * width; }
  std::size_t out_size() const {
    return static_cast<std::size_t>(out_channels) * out_height() * out_width();
  }
  std::size_t weight_size() const {
    return static_cast<std::size_t>(out_channels) * in_channels * kernel * kernel;
  }
};

// out = conv(in, weight) + bias. weight layout [oc][ic][ky][kx].
void conv2d_forward(const ConvGeometry& g, std::span<const double> in,
                    std::span<const double> weight, std::span<const double> bias,
                    std::span<double> out);

// grad_in = d(out)/d(in)^T grad_out (overwrites grad_in).
void conv2d_backward_input(const ConvGeometry& g, std::span<const double> grad_out,
                           std::span<const double> weight, std::span<double> grad_in);

// grad_weight += ..., grad_bias += ... (accumulates).
void conv2d_backward_params(const ConvGeometry& g, std::span<const double> grad_out,
                            std::span<const double> in, std::span<double> grad_weight,
                            std::span<double> grad_bias);

// 2x2 stride-2 max pooling (odd trailing row/column dropped). `argmax`
// receives, per output element, the flat input index that won.
void maxpool2_forward(int channels, int height, int width, std::span<const double> in,
                      std::span<double> out, std::span<std::size_t> argmax);
void maxpool2_backward(std::span<const double> grad_out, std::span<const std::size_t> argmax,
                       std::span<double> grad_in);

// out[o] = bias[o] + sum_i weight[o][i] * in[i].
void linear_forward(int in_features, int out_features, std::span<const double> in,
                    std::span<const double> weight, std::span<const double> bias,
                    std::span<double> out);
// grad_in = W^T grad_out (overwrites).
void linear_backward_input(int in_features, int out_features, std::span<const double> grad_out,
                           std::span<const double> weight, std::span<double> grad_in);
// grad_weight += grad_out in^T; grad_bias += grad_out.
void linear_backward_params(int in_features, int out_features, std::span<const double> grad_out,
                            std::span<const double> in, std::span<double> grad_weight,
                            std::span<double> grad_bias);

namespace reference {

void conv2d_forward(const ConvGeometry& g, std::span<const double> in,
                    std::span<const double> weight, std::span<const double> bias,
                    std::span<double> out);
void conv2d_backward_input(const ConvGeometry& g, std::span<const double> grad_out,
                           std::span<const double> weight, std::span<double> grad_in);
void conv2d_backward_params(const ConvGeometry& g, std::span<const double> grad_out,
                            std::span<const double> in, std::span<double> grad_weight,
                            std::span<double> grad_bias);
void linear_forward(int in_features, int out_features, std::span<const double> in,
                    std::span<const double> weight, std::span<const double> bias,
                    std::span<double> out);
void linear_backward_input(int in_features, int out_features, std::span<const double> grad_out,
                           std::span<const double> weight, std::span<double> grad_in);
void linear_backward_params(int in_features, int out_features, std::span<const double> grad_out,
                            std::span<const double> in, std::span<double> grad_weight,
                            std::span<double> grad_bias);

}  // namespace reference
}  // namespace edda::kernels
