#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace edda {

enum class TaskKind { kMulticlass, kMultilabel };

std::string_view to_string(TaskKind task);
TaskKind task_from_string(std::string_view name);

struct Shape {
  int channels = 0;
  int height = 0;
  int width = 0;

  std::size_t plane() const { return static_cast<std::size_t>(height) * width; }
  std::size_t size() const { return plane() * channels; }
  bool operator==(const Shape&) const = default;
};

// Image with values in [0,1]. Storage is channel-planar, row-major inside a
// plane: index = (c * height + y) * width + x.
class ImageTensor {
 public:
  ImageTensor() = default;
  ImageTensor(int width, int height, int channels, double fill = 0.0);
  ImageTensor(int width, int height, int channels, std::vector<double> data);

  int width() const { return shape_.width; }
  int height() const { return shape_.height; }
  int channels() const { return shape_.channels; }
  const Shape& shape() const { return shape_; }
  std::size_t size() const { return data_.size(); }

  double& at(int c, int y, int x) { return data_[index(c, y, x)]; }
  double at(int c, int y, int x) const { return data_[index(c, y, x)]; }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  // True when every value lies in [0,1].
  bool in_unit_range() const;

  bool operator==(const ImageTensor&) const = default;

 private:
  std::size_t index(int c, int y, int x) const {
    return (static_cast<std::size_t>(c) * shape_.height + y) * shape_.width + x;
  }

  Shape shape_;
  std::vector<double> data_;
};

// Per-pixel attribution, row-major, normalized to [0,1].
class SaliencyMap {
 public:
  SaliencyMap() = default;
  SaliencyMap(int width, int height, double fill = 0.0);
  SaliencyMap(int width, int height, std::vector<double> values);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return values_.size(); }

  double& at(int y, int x) { return values_[static_cast<std::size_t>(y) * width_ + x]; }
  double at(int y, int x) const { return values_[static_cast<std::size_t>(y) * width_ + x]; }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }

  bool operator==(const SaliencyMap&) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<double> values_;
};

// Per-image min-max normalization in place. A constant map becomes all zeros.
void normalize_min_max(std::span<double> values);

// Ground truth for one example: a class index (multiclass) or a binary label
// vector (multilabel).
class Target {
 public:
  static Target multiclass(int class_index);
  static Target multilabel(std::vector<std::uint8_t> labels);

  TaskKind kind() const { return kind_; }
  int class_index() const;
  const std::vector<std::uint8_t>& labels() const;

  // Checks the invariants against a class count. `allow_background` admits
  // class_index == num_classes for multiclass targets.
  void validate(int num_classes, bool allow_background = false) const;

  bool operator==(const Target&) const = default;

 private:
  TaskKind kind_ = TaskKind::kMulticlass;
  int class_index_ = 0;
  std::vector<std::uint8_t> labels_;
};

struct Example {
  ImageTensor image;
  Target target;
};

}  // namespace edda
