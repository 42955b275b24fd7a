#include "edda/classifier.hpp"

#include <algorithm>
#include <cmath>

#include "edda/errors.hpp"

namespace edda {

void Classifier::check_input(const ImageTensor& image) const {
  const Shape expected = input_shape();
  if (image.shape() != expected) {
    throw InputShapeError("model expects " + std::to_string(expected.width) + "x" +
                          std::to_string(expected.height) + "x" +
                          std::to_string(expected.channels) + " input, got " +
                          std::to_string(image.width()) + "x" + std::to_string(image.height()) +
                          "x" + std::to_string(image.channels()));
  }
}

void Classifier::check_class(int class_index) const {
  if (class_index < 0 || class_index >= num_outputs()) {
    throw ArgumentError("class index " + std::to_string(class_index) + " out of range [0, " +
                        std::to_string(num_outputs()) + ")");
  }
}

std::vector<double> Classifier::logits(const ImageTensor& image) const {
  check_input(image);
  return compute_logits(image);
}

std::vector<double> Classifier::input_gradient(const ImageTensor& image, int class_index) const {
  check_input(image);
  check_class(class_index);
  return compute_input_gradient(image, class_index);
}

FeatureGradient Classifier::feature_gradient(const ImageTensor& image, int class_index,
                                             std::string_view layer) const {
  check_input(image);
  check_class(class_index);
  return compute_feature_gradient(image, class_index, layer);
}

FeatureGradient Classifier::compute_feature_gradient(const ImageTensor&, int,
                                                     std::string_view layer) const {
  throw ConfigError("model has no feature layer '" + std::string(layer) + "'");
}

std::string Classifier::default_feature_layer() const {
  const auto names = feature_layers();
  if (names.empty()) throw ConfigError("model exposes no feature layers");
  return names.back();
}

std::vector<double> softmax(std::span<const double> logits) {
  std::vector<double> out(logits.size());
  if (logits.empty()) return out;
  const double max = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - max);
    sum += out[i];
  }
  for (double& v : out) v /= sum;
  return out;
}

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

int argmax(std::span<const double> values, int limit) {
  const std::size_t n =
      limit < 0 ? values.size() : std::min(values.size(), static_cast<std::size_t>(limit));
  if (n == 0) throw ArgumentError("argmax of empty range");
  return static_cast<int>(std::max_element(values.begin(), values.begin() + n) - values.begin());
}

std::vector<double> predict(const Classifier& model, const ImageTensor& image) {
  auto z = model.logits(image);
  if (model.task() == TaskKind::kMulticlass) return softmax(z);
  for (double& v : z) v = sigmoid(v);
  return z;
}

GradientTensor class_score_gradient(const Classifier& model, const ImageTensor& image,
                                    int class_index, const GradientSource& wrt) {
  if (wrt.is_input()) {
    return {image.shape(), model.input_gradient(image, class_index)};
  }
  auto fg = model.feature_gradient(image, class_index, wrt.layer());
  return {fg.shape, std::move(fg.gradient)};
}

}  // namespace edda
