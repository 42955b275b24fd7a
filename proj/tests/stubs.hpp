#pragma once

// Hand-built models and explainers whose behaviour tests can dictate.

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "edda/classifier.hpp"
#include "edda/explainers.hpp"

namespace edda::testing {

// Logits come from an arbitrary function of the image. Gradients are zero;
// these models are only used where the explainer is stubbed too.
class FunctionModel final : public Classifier {
 public:
  using Fn = std::function<std::vector<double>(const ImageTensor&)>;

  FunctionModel(Shape shape, int num_classes, TaskKind task, Fn fn, bool background = false)
      : shape_(shape), num_classes_(num_classes), task_(task), fn_(std::move(fn)),
        background_(background) {}

  int num_classes() const override { return num_classes_; }
  TaskKind task() const override { return task_; }
  Shape input_shape() const override { return shape_; }
  bool has_background() const override { return background_; }

 protected:
  std::vector<double> compute_logits(const ImageTensor& image) const override {
    return fn_(image);
  }
  std::vector<double> compute_input_gradient(const ImageTensor& image, int) const override {
    return std::vector<double>(image.size(), 0.0);
  }

 private:
  Shape shape_;
  int num_classes_;
  TaskKind task_;
  Fn fn_;
  bool background_;
};

// logits[k] = bias[k] + sum_i weights[k][i] * x[i]; the input gradient is
// exactly weights[k].
class LinearModel final : public Classifier {
 public:
  LinearModel(Shape shape, std::vector<std::vector<double>> weights, std::vector<double> bias,
              TaskKind task = TaskKind::kMulticlass)
      : shape_(shape), weights_(std::move(weights)), bias_(std::move(bias)), task_(task) {}

  int num_classes() const override { return static_cast<int>(weights_.size()); }
  TaskKind task() const override { return task_; }
  Shape input_shape() const override { return shape_; }

 protected:
  std::vector<double> compute_logits(const ImageTensor& image) const override {
    std::vector<double> out(bias_);
    const auto x = image.data();
    for (std::size_t k = 0; k < weights_.size(); ++k) {
      for (std::size_t i = 0; i < x.size(); ++i) out[k] += weights_[k][i] * x[i];
    }
    return out;
  }
  std::vector<double> compute_input_gradient(const ImageTensor&, int k) const override {
    return weights_[k];
  }

 private:
  Shape shape_;
  std::vector<std::vector<double>> weights_;
  std::vector<double> bias_;
  TaskKind task_;
};

class FunctionExplainer final : public Explainer {
 public:
  using Fn = std::function<SaliencyMap(const Classifier&, const ImageTensor&, int)>;

  explicit FunctionExplainer(Fn fn, std::string id = "stub") : fn_(std::move(fn)), id_(id) {}

  SaliencyMap explain(const Classifier& model, const ImageTensor& image,
                      int class_index) const override {
    return fn_(model, image, class_index);
  }
  std::string id() const override { return id_; }

 private:
  Fn fn_;
  std::string id_;
};

// Returns the same value at every pixel.
inline FunctionExplainer constant_explainer(double value) {
  return FunctionExplainer(
      [value](const Classifier&, const ImageTensor& image, int) {
        return SaliencyMap(image.width(), image.height(), value);
      },
      "constant");
}

}  // namespace edda::testing
