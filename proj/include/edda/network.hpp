#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "edda/classifier.hpp"

namespace edda {

enum class LayerKind { kNormalize, kConv2d, kRelu, kMaxPool2, kGlobalAvgPool, kLinear };

std::string_view to_string(LayerKind kind);
LayerKind layer_kind_from_string(std::string_view name);

struct LayerSpec {
  LayerKind kind = LayerKind::kRelu;
  int units = 0;   // conv output channels / linear output features
  int kernel = 0;  // conv only
  int pad = 0;     // conv only
  std::vector<double> mean;    // normalize only
  std::vector<double> stddev;  // normalize only
  std::string name;  // feature-layer id for this layer's output; empty if unnamed

  // Filled in by Network.
  Shape in_shape;
  Shape out_shape;
  std::size_t param_offset = 0;
  std::size_t weight_count = 0;
  std::size_t bias_count = 0;
};

// Sequential feed-forward network over single images. Parameters live in one
// flat array so optimizers and checkpoints can treat them uniformly.
//
// Inputs are images in [0,1]; any dataset normalization is a kNormalize
// layer inside the network, so a zero pixel always means "black".
class Network final : public Classifier {
 public:
  Network(Shape input, int num_classes, TaskKind task, bool background = false);

  Network& normalize(std::vector<double> mean, std::vector<double> stddev);
  Network& conv(int out_channels, int kernel, int pad, std::string name = {});
  Network& relu(std::string name = {});
  Network& maxpool2(std::string name = {});
  Network& global_avg_pool(std::string name = {});
  Network& linear(int out_features, std::string name = {});
  Network& add(LayerSpec spec);

  // He-normal weights, zero biases, deterministic in `seed`.
  void init_parameters(std::uint64_t seed);

  int num_classes() const override { return num_classes_; }
  TaskKind task() const override { return task_; }
  Shape input_shape() const override { return input_; }
  bool has_background() const override { return background_; }
  std::vector<std::string> feature_layers() const override;

  const std::vector<LayerSpec>& layers() const { return layers_; }
  std::span<const double> parameters() const { return params_; }
  std::span<double> parameters() { return params_; }
  std::size_t parameter_count() const { return params_.size(); }
  std::uint64_t parameter_hash() const;

  // Last named feature layer with spatial extent larger than 1x1.
  std::string default_feature_layer() const override;
  Shape feature_shape(std::string_view layer) const;

  // Activations of every layer boundary: acts[0] is the input and acts[i+1]
  // the output of layer i.
  struct Trace {
    std::vector<std::vector<double>> acts;
    std::vector<std::vector<std::size_t>> argmax;
  };

  Trace forward(std::span<const double> input) const;

  // Back-propagates `grad_logits` through the trace. Parameter gradients are
  // accumulated into `grad_params` when it is non-empty. Returns the gradient
  // with respect to acts[stop], or an empty vector when `need_result` is
  // false (training only wants parameter gradients).
  std::vector<double> backward(const Trace& trace, std::span<const double> grad_logits,
                               std::span<double> grad_params, std::size_t stop = 0,
                               bool need_result = true) const;

  // Runs the layers after `layer` on the given activations; used to check
  // feature-layer gradients numerically.
  std::vector<double> logits_from_feature(std::string_view layer,
                                          std::span<const double> activations) const;

 protected:
  std::vector<double> compute_logits(const ImageTensor& image) const override;
  std::vector<double> compute_input_gradient(const ImageTensor& image,
                                             int class_index) const override;
  FeatureGradient compute_feature_gradient(const ImageTensor& image, int class_index,
                                           std::string_view layer) const override;

 private:
  Shape current_shape() const;
  std::size_t layer_index(std::string_view name) const;
  void check_complete() const;
  void accumulate_params(std::size_t i, std::span<const double> in, std::span<const double> grad,
                         double* gp) const;
  void forward_layer(std::size_t i, std::span<const double> in, std::vector<double>& out,
                     std::vector<std::size_t>& argmax) const;

  Shape input_;
  int num_classes_;
  TaskKind task_;
  bool background_;
  std::vector<LayerSpec> layers_;
  std::vector<double> params_;
};

// Channel widths of the three convolution blocks in the reference model.
struct SmallCnnWidths {
  int conv1 = 8;
  int conv2 = 16;
  int conv3 = 16;
};

// Three conv blocks (3x3 conv + ReLU, max-pool after the first two), global
// average pooling and a linear head. Feature layers are "conv1".."conv3",
// naming each block's rectified output.
Network make_small_cnn(Shape input, int num_classes, TaskKind task, bool background,
                       SmallCnnWidths widths, std::uint64_t seed);

// FNV-1a over the raw bytes of a double array.
std::uint64_t hash_doubles(std::span<const double> values);

}  // namespace edda
