#include "edda/network.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <random>

#include "edda/errors.hpp"
#include "edda/kernels.hpp"

namespace edda {
namespace {

kernels::ConvGeometry geometry(const LayerSpec& l) {
  return {l.in_shape.channels, l.units, l.in_shape.height, l.in_shape.width, l.kernel, l.pad};
}

}  // namespace

std::string_view to_string(LayerKind kind) {
  switch (kind) {
    case LayerKind::kNormalize: return "normalize";
    case LayerKind::kConv2d: return "conv2d";
    case LayerKind::kRelu: return "relu";
    case LayerKind::kMaxPool2: return "maxpool2";
    case LayerKind::kGlobalAvgPool: return "global_avg_pool";
    case LayerKind::kLinear: return "linear";
  }
  return "unknown";
}

LayerKind layer_kind_from_string(std::string_view name) {
  for (auto k : {LayerKind::kNormalize, LayerKind::kConv2d, LayerKind::kRelu,
                 LayerKind::kMaxPool2, LayerKind::kGlobalAvgPool, LayerKind::kLinear}) {
    if (to_string(k) == name) return k;
  }
  throw FormatError("unknown layer kind '" + std::string(name) + "'");
}

std::uint64_t hash_doubles(std::span<const double> values) {
  std::uint64_t h = 1469598103934665603ULL;
  for (double v : values) {
    unsigned char bytes[sizeof(double)];
    std::memcpy(bytes, &v, sizeof(double));
    for (unsigned char b : bytes) {
      h ^= b;
      h *= 1099511628211ULL;
    }
  }
  return h;
}

Network::Network(Shape input, int num_classes, TaskKind task, bool background)
    : input_(input), num_classes_(num_classes), task_(task), background_(background) {
  if (input.size() == 0) throw InputShapeError("network input shape must be non-empty");
  if (num_classes < 1) throw ConfigError("num_classes must be positive");
  if (background && task == TaskKind::kMultilabel) {
    throw ConfigError("background class is only defined for multiclass models");
  }
}

Shape Network::current_shape() const {
  return layers_.empty() ? input_ : layers_.back().out_shape;
}

Network& Network::add(LayerSpec spec) {
  spec.in_shape = current_shape();
  const Shape in = spec.in_shape;
  spec.weight_count = 0;
  spec.bias_count = 0;
  switch (spec.kind) {
    case LayerKind::kNormalize:
      if (spec.mean.size() != static_cast<std::size_t>(in.channels) ||
          spec.stddev.size() != spec.mean.size()) {
        throw ConfigError("normalize needs one mean and stddev per channel");
      }
      for (double s : spec.stddev) {
        if (!(s > 0.0)) throw ConfigError("normalize stddev must be positive");
      }
      spec.out_shape = in;
      break;
    case LayerKind::kConv2d: {
      if (spec.units < 1 || spec.kernel < 1 || spec.pad < 0) {
        throw ConfigError("conv2d needs positive channels and kernel");
      }
      spec.out_shape = {spec.units, in.height + 2 * spec.pad - spec.kernel + 1,
                        in.width + 2 * spec.pad - spec.kernel + 1};
      if (spec.out_shape.height < 1 || spec.out_shape.width < 1) {
        throw ConfigError("conv2d kernel larger than its padded input");
      }
      spec.weight_count = static_cast<std::size_t>(spec.units) * in.channels * spec.kernel *
                          spec.kernel;
      spec.bias_count = static_cast<std::size_t>(spec.units);
      break;
    }
    case LayerKind::kRelu:
      spec.out_shape = in;
      break;
    case LayerKind::kMaxPool2:
      if (in.height < 2 || in.width < 2) throw ConfigError("maxpool2 input smaller than 2x2");
      spec.out_shape = {in.channels, in.height / 2, in.width / 2};
      break;
    case LayerKind::kGlobalAvgPool:
      spec.out_shape = {in.channels, 1, 1};
      break;
    case LayerKind::kLinear:
      if (spec.units < 1) throw ConfigError("linear needs positive output features");
      spec.out_shape = {spec.units, 1, 1};
      spec.weight_count = static_cast<std::size_t>(spec.units) * in.size();
      spec.bias_count = static_cast<std::size_t>(spec.units);
      break;
  }
  if (!spec.name.empty()) {
    for (const auto& l : layers_) {
      if (l.name == spec.name) throw ConfigError("duplicate layer name '" + spec.name + "'");
    }
  }
  spec.param_offset = params_.size();
  params_.resize(params_.size() + spec.weight_count + spec.bias_count, 0.0);
  layers_.push_back(std::move(spec));
  return *this;
}

Network& Network::normalize(std::vector<double> mean, std::vector<double> stddev) {
  LayerSpec s;
  s.kind = LayerKind::kNormalize;
  s.mean = std::move(mean);
  s.stddev = std::move(stddev);
  return add(std::move(s));
}

Network& Network::conv(int out_channels, int kernel, int pad, std::string name) {
  LayerSpec s;
  s.kind = LayerKind::kConv2d;
  s.units = out_channels;
  s.kernel = kernel;
  s.pad = pad;
  s.name = std::move(name);
  return add(std::move(s));
}

Network& Network::relu(std::string name) {
  LayerSpec s;
  s.kind = LayerKind::kRelu;
  s.name = std::move(name);
  return add(std::move(s));
}

Network& Network::maxpool2(std::string name) {
  LayerSpec s;
  s.kind = LayerKind::kMaxPool2;
  s.name = std::move(name);
  return add(std::move(s));
}

Network& Network::global_avg_pool(std::string name) {
  LayerSpec s;
  s.kind = LayerKind::kGlobalAvgPool;
  s.name = std::move(name);
  return add(std::move(s));
}

Network& Network::linear(int out_features, std::string name) {
  LayerSpec s;
  s.kind = LayerKind::kLinear;
  s.units = out_features;
  s.name = std::move(name);
  return add(std::move(s));
}

void Network::init_parameters(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  for (const auto& l : layers_) {
    if (l.weight_count == 0) continue;
    const std::size_t fan_in = l.weight_count / l.bias_count;
    std::normal_distribution<double> dist(0.0, std::sqrt(2.0 / static_cast<double>(fan_in)));
    double* w = params_.data() + l.param_offset;
    for (std::size_t i = 0; i < l.weight_count; ++i) w[i] = dist(rng);
    std::fill(w + l.weight_count, w + l.weight_count + l.bias_count, 0.0);
  }
}

std::uint64_t Network::parameter_hash() const { return hash_doubles(params_); }

std::vector<std::string> Network::feature_layers() const {
  std::vector<std::string> names;
  for (const auto& l : layers_) {
    if (!l.name.empty()) names.push_back(l.name);
  }
  return names;
}

std::string Network::default_feature_layer() const {
  for (auto it = layers_.rbegin(); it != layers_.rend(); ++it) {
    if (!it->name.empty() && it->out_shape.plane() > 1) return it->name;
  }
  throw ConfigError("network has no spatial feature layer");
}

std::size_t Network::layer_index(std::string_view name) const {
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    if (!name.empty() && layers_[i].name == name) return i;
  }
  throw ConfigError("unknown feature layer '" + std::string(name) + "'");
}

Shape Network::feature_shape(std::string_view layer) const {
  return layers_[layer_index(layer)].out_shape;
}

void Network::check_complete() const {
  if (current_shape().size() != static_cast<std::size_t>(num_outputs())) {
    throw ConfigError("network produces " + std::to_string(current_shape().size()) +
                      " outputs but the model has " + std::to_string(num_outputs()));
  }
}

void Network::forward_layer(std::size_t i, std::span<const double> in, std::vector<double>& out,
                            std::vector<std::size_t>& argmax) const {
  const LayerSpec& l = layers_[i];
  out.assign(l.out_shape.size(), 0.0);
  const double* p = params_.data() + l.param_offset;
  switch (l.kind) {
    case LayerKind::kNormalize: {
      const std::size_t plane = l.in_shape.plane();
      for (int c = 0; c < l.in_shape.channels; ++c) {
        for (std::size_t j = 0; j < plane; ++j) {
          out[c * plane + j] = (in[c * plane + j] - l.mean[c]) / l.stddev[c];
        }
      }
      break;
    }
    case LayerKind::kConv2d:
      kernels::conv2d_forward(geometry(l), in, {p, l.weight_count}, {p + l.weight_count, l.bias_count},
                              out);
      break;
    case LayerKind::kRelu:
      for (std::size_t j = 0; j < in.size(); ++j) out[j] = in[j] > 0.0 ? in[j] : 0.0;
      break;
    case LayerKind::kMaxPool2:
      argmax.assign(out.size(), 0);
      kernels::maxpool2_forward(l.in_shape.channels, l.in_shape.height, l.in_shape.width, in, out,
                                argmax);
      break;
    case LayerKind::kGlobalAvgPool: {
      const std::size_t plane = l.in_shape.plane();
      for (int c = 0; c < l.in_shape.channels; ++c) {
        double s = 0.0;
        for (std::size_t j = 0; j < plane; ++j) s += in[c * plane + j];
        out[c] = s / static_cast<double>(plane);
      }
      break;
    }
    case LayerKind::kLinear:
      kernels::linear_forward(static_cast<int>(l.in_shape.size()), l.units, in,
                              {p, l.weight_count}, {p + l.weight_count, l.bias_count}, out);
      break;
  }
}

Network::Trace Network::forward(std::span<const double> input) const {
  check_complete();
  if (input.size() != input_.size()) throw InputShapeError("network input has wrong length");
  Trace t;
  t.acts.resize(layers_.size() + 1);
  t.argmax.resize(layers_.size());
  t.acts[0].assign(input.begin(), input.end());
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    forward_layer(i, t.acts[i], t.acts[i + 1], t.argmax[i]);
  }
  return t;
}

void Network::accumulate_params(std::size_t i, std::span<const double> in,
                                std::span<const double> grad, double* gp) const {
  const LayerSpec& l = layers_[i];
  if (l.kind == LayerKind::kConv2d) {
    kernels::conv2d_backward_params(geometry(l), grad, in, {gp, l.weight_count},
                                    {gp + l.weight_count, l.bias_count});
  } else if (l.kind == LayerKind::kLinear) {
    kernels::linear_backward_params(static_cast<int>(l.in_shape.size()), l.units, grad, in,
                                    {gp, l.weight_count}, {gp + l.weight_count, l.bias_count});
  }
}

std::vector<double> Network::backward(const Trace& trace, std::span<const double> grad_logits,
                                      std::span<double> grad_params, std::size_t stop,
                                      bool need_result) const {
  const bool want_params = !grad_params.empty();
  if (want_params && grad_params.size() != params_.size()) {
    throw ArgumentError("parameter gradient buffer has wrong length");
  }
  std::vector<double> grad(grad_logits.begin(), grad_logits.end());
  std::vector<double> grad_in;
  for (std::size_t i = layers_.size(); i-- > stop;) {
    const LayerSpec& l = layers_[i];
    const auto& in = trace.acts[i];
    const double* p = params_.data() + l.param_offset;
    double* gp = want_params ? grad_params.data() + l.param_offset : nullptr;
    if (i == stop && !need_result) {
      if (want_params && l.weight_count > 0) accumulate_params(i, in, grad, gp);
      return {};
    }
    grad_in.assign(l.in_shape.size(), 0.0);
    switch (l.kind) {
      case LayerKind::kNormalize: {
        const std::size_t plane = l.in_shape.plane();
        for (int c = 0; c < l.in_shape.channels; ++c) {
          for (std::size_t j = 0; j < plane; ++j) grad_in[c * plane + j] = grad[c * plane + j] / l.stddev[c];
        }
        break;
      }
      case LayerKind::kConv2d: {
        if (want_params) accumulate_params(i, in, grad, gp);
        kernels::conv2d_backward_input(geometry(l), grad, {p, l.weight_count}, grad_in);
        break;
      }
      case LayerKind::kRelu:
        for (std::size_t j = 0; j < grad_in.size(); ++j) grad_in[j] = in[j] > 0.0 ? grad[j] : 0.0;
        break;
      case LayerKind::kMaxPool2:
        kernels::maxpool2_backward(grad, trace.argmax[i], grad_in);
        break;
      case LayerKind::kGlobalAvgPool: {
        const std::size_t plane = l.in_shape.plane();
        for (int c = 0; c < l.in_shape.channels; ++c) {
          const double v = grad[c] / static_cast<double>(plane);
          std::fill(grad_in.begin() + c * plane, grad_in.begin() + (c + 1) * plane, v);
        }
        break;
      }
      case LayerKind::kLinear: {
        if (want_params) accumulate_params(i, in, grad, gp);
        kernels::linear_backward_input(static_cast<int>(l.in_shape.size()), l.units, grad,
                                       {p, l.weight_count}, grad_in);
        break;
      }
    }
    grad.swap(grad_in);
  }
  return grad;
}

std::vector<double> Network::logits_from_feature(std::string_view layer,
                                                 std::span<const double> activations) const {
  check_complete();
  const std::size_t start = layer_index(layer);
  if (activations.size() != layers_[start].out_shape.size()) {
    throw InputShapeError("feature activations have wrong length");
  }
  std::vector<double> cur(activations.begin(), activations.end());
  std::vector<double> next;
  std::vector<std::size_t> argmax;
  for (std::size_t i = start + 1; i < layers_.size(); ++i) {
    forward_layer(i, cur, next, argmax);
    cur.swap(next);
  }
  return cur;
}

std::vector<double> Network::compute_logits(const ImageTensor& image) const {
  auto t = forward(image.data());
  return std::move(t.acts.back());
}

std::vector<double> Network::compute_input_gradient(const ImageTensor& image,
                                                    int class_index) const {
  const auto t = forward(image.data());
  std::vector<double> seed(t.acts.back().size(), 0.0);
  seed[class_index] = 1.0;
  return backward(t, seed, {}, 0);
}

FeatureGradient Network::compute_feature_gradient(const ImageTensor& image, int class_index,
                                                  std::string_view layer) const {
  const std::size_t idx = layer_index(layer);
  auto t = forward(image.data());
  std::vector<double> seed(t.acts.back().size(), 0.0);
  seed[class_index] = 1.0;
  FeatureGradient fg;
  fg.shape = layers_[idx].out_shape;
  fg.gradient = backward(t, seed, {}, idx + 1);
  fg.activations = std::move(t.acts[idx + 1]);
  return fg;
}

Network make_small_cnn(Shape input, int num_classes, TaskKind task, bool background,
                       SmallCnnWidths widths, std::uint64_t seed) {
  Network net(input, num_classes, task, background);
  net.conv(widths.conv1, 3, 1).relu("conv1").maxpool2();
  net.conv(widths.conv2, 3, 1).relu("conv2").maxpool2();
  net.conv(widths.conv3, 3, 1).relu("conv3");
  net.global_avg_pool().linear(num_classes + (background ? 1 : 0));
  net.init_parameters(seed);
  return net;
}

}  // namespace edda
