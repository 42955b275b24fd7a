#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "edda/tensor.hpp"

namespace edda {

// A dense tensor returned from gradient queries; `shape` describes `values`.
struct GradientTensor {
  Shape shape;
  std::vector<double> values;
};

// Activations of a named feature layer together with the gradient of one
// class logit with respect to them.
struct FeatureGradient {
  Shape shape;
  std::vector<double> activations;
  std::vector<double> gradient;
};

// What a class-score gradient is taken with respect to.
class GradientSource {
 public:
  static GradientSource input() { return GradientSource(); }
  static GradientSource feature_layer(std::string id) {
    GradientSource s;
    s.layer_ = std::move(id);
    return s;
  }
  bool is_input() const { return layer_.empty(); }
  const std::string& layer() const { return layer_; }

 private:
  std::string layer_;
};

// Abstract image classifier. Read-only queries (logits, gradients) are const
// and must be safe to call concurrently; implementations keep no mutable
// per-call state in the object.
//
// num_classes() counts real classes. When has_background() is true the model
// has one extra output at index num_classes() reserved for the background
// label, so num_outputs() == num_classes() + 1.
class Classifier {
 public:
  virtual ~Classifier() = default;

  virtual int num_classes() const = 0;
  virtual TaskKind task() const = 0;
  virtual Shape input_shape() const = 0;
  virtual bool has_background() const { return false; }
  virtual std::vector<std::string> feature_layers() const { return {}; }
  // Layer Grad-CAM uses when none is configured; defaults to the last entry
  // of feature_layers().
  virtual std::string default_feature_layer() const;

  int num_outputs() const { return num_classes() + (has_background() ? 1 : 0); }

  // Pre-softmax (or pre-sigmoid) class scores. Validates the input shape.
  std::vector<double> logits(const ImageTensor& image) const;

  // Gradient of logit[class_index] with respect to the input, in the image's
  // channel-planar layout.
  std::vector<double> input_gradient(const ImageTensor& image, int class_index) const;

  // Activations of `layer` and d logit[class_index] / d activations.
  FeatureGradient feature_gradient(const ImageTensor& image, int class_index,
                                   std::string_view layer) const;

 protected:
  virtual std::vector<double> compute_logits(const ImageTensor& image) const = 0;
  virtual std::vector<double> compute_input_gradient(const ImageTensor& image,
                                                     int class_index) const = 0;
  // Default: no feature layers, always a ConfigError.
  virtual FeatureGradient compute_feature_gradient(const ImageTensor& image, int class_index,
                                                   std::string_view layer) const;

  void check_input(const ImageTensor& image) const;
  void check_class(int class_index) const;
};

// Per-class scores: softmax over logits for multiclass, element-wise sigmoid
// for multilabel.
std::vector<double> predict(const Classifier& model, const ImageTensor& image);

// Gradient of the pre-softmax score of `class_index` with respect to the
// input image or a named feature layer.
GradientTensor class_score_gradient(const Classifier& model, const ImageTensor& image,
                                    int class_index, const GradientSource& wrt);

// Numerically stable softmax / sigmoid, exposed for losses and tests.
std::vector<double> softmax(std::span<const double> logits);
double sigmoid(double z);

// Index of the largest of the first `limit` entries (ties → lowest index).
int argmax(std::span<const double> values, int limit = -1);

}  // namespace edda
