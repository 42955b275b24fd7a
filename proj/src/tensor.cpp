#include "edda/tensor.hpp"

#include <algorithm>
#include <string>

#include "edda/errors.hpp"

namespace edda {

std::string_view to_string(TaskKind task) {
  return task == TaskKind::kMulticlass ? "multiclass" : "multilabel";
}

TaskKind task_from_string(std::string_view name) {
  if (name == "multiclass") return TaskKind::kMulticlass;
  if (name == "multilabel") return TaskKind::kMultilabel;
  throw ConfigError("unknown task kind '" + std::string(name) + "'");
}

ImageTensor::ImageTensor(int width, int height, int channels, double fill)
    : shape_{channels, height, width} {
  if (width <= 0 || height <= 0 || channels <= 0) {
    throw InputShapeError("image dimensions must be positive");
  }
  data_.assign(shape_.size(), fill);
}

ImageTensor::ImageTensor(int width, int height, int channels, std::vector<double> data)
    : shape_{channels, height, width}, data_(std::move(data)) {
  if (width <= 0 || height <= 0 || channels <= 0) {
    throw InputShapeError("image dimensions must be positive");
  }
  if (data_.size() != shape_.size()) {
    throw InputShapeError("image data length " + std::to_string(data_.size()) +
                          " does not match " + std::to_string(width) + "x" +
                          std::to_string(height) + "x" + std::to_string(channels));
  }
}

bool ImageTensor::in_unit_range() const {
  return std::all_of(data_.begin(), data_.end(),
                     [](double v) { return v >= 0.0 && v <= 1.0; });
}

SaliencyMap::SaliencyMap(int width, int height, double fill)
    : width_(width), height_(height),
      values_(static_cast<std::size_t>(width) * height, fill) {
  if (width <= 0 || height <= 0) throw InputShapeError("map dimensions must be positive");
}

SaliencyMap::SaliencyMap(int width, int height, std::vector<double> values)
    : width_(width), height_(height), values_(std::move(values)) {
  if (width <= 0 || height <= 0) throw InputShapeError("map dimensions must be positive");
  if (values_.size() != static_cast<std::size_t>(width) * height) {
    throw InputShapeError("saliency map length does not match its dimensions");
  }
}

void normalize_min_max(std::span<double> values) {
  if (values.empty()) return;
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  const double min = *lo;
  const double range = *hi - min;
  if (!(range > 0.0)) {
    std::fill(values.begin(), values.end(), 0.0);
    return;
  }
  for (double& v : values) v = (v - min) / range;
}

Target Target::multiclass(int class_index) {
  Target t;
  t.kind_ = TaskKind::kMulticlass;
  t.class_index_ = class_index;
  return t;
}

Target Target::multilabel(std::vector<std::uint8_t> labels) {
  Target t;
  t.kind_ = TaskKind::kMultilabel;
  t.labels_ = std::move(labels);
  return t;
}

int Target::class_index() const {
  if (kind_ != TaskKind::kMulticlass) throw ArgumentError("multilabel target has no class index");
  return class_index_;
}

const std::vector<std::uint8_t>& Target::labels() const {
  if (kind_ != TaskKind::kMultilabel) throw ArgumentError("multiclass target has no label vector");
  return labels_;
}

void Target::validate(int num_classes, bool allow_background) const {
  if (kind_ == TaskKind::kMulticlass) {
    const int limit = allow_background ? num_classes + 1 : num_classes;
    if (class_index_ < 0 || class_index_ >= limit) {
      throw ArgumentError("class index " + std::to_string(class_index_) +
                          " out of range for " + std::to_string(num_classes) + " classes");
    }
    return;
  }
  if (labels_.size() != static_cast<std::size_t>(num_classes)) {
    throw ArgumentError("label vector length " + std::to_string(labels_.size()) +
                        " != num_classes " + std::to_string(num_classes));
  }
  for (auto v : labels_) {
    if (v > 1) throw ArgumentError("label vector entries must be 0 or 1");
  }
}

}  // namespace edda
