#include "edda/explainers.hpp"

#include <algorithm>
#include <cmath>

#include "edda/errors.hpp"

namespace edda {

std::string_view to_string(ExplainerMethod method) {
  return method == ExplainerMethod::kGradCam ? "gradcam" : "saliency";
}

ExplainerMethod explainer_method_from_string(std::string_view name) {
  if (name == "gradcam") return ExplainerMethod::kGradCam;
  if (name == "saliency" || name == "vanilla_saliency") return ExplainerMethod::kVanillaSaliency;
  throw ConfigError("unknown explainer '" + std::string(name) + "' (expected gradcam|saliency)");
}

std::string ExplainerSpec::id() const {
  std::string s(to_string(method));
  if (method == ExplainerMethod::kGradCam && !target_layer.empty()) s += "@" + target_layer;
  return s;
}

std::vector<double> resize_bilinear(std::span<const double> src, int src_height, int src_width,
                                    int dst_height, int dst_width) {
  std::vector<double> dst(static_cast<std::size_t>(dst_height) * dst_width);
  const double sy = static_cast<double>(src_height) / dst_height;
  const double sx = static_cast<double>(src_width) / dst_width;
  for (int y = 0; y < dst_height; ++y) {
    const double fy = std::clamp((y + 0.5) * sy - 0.5, 0.0, static_cast<double>(src_height - 1));
    const int y0 = static_cast<int>(fy);
    const int y1 = std::min(y0 + 1, src_height - 1);
    const double wy = fy - y0;
    for (int x = 0; x < dst_width; ++x) {
      const double fx = std::clamp((x + 0.5) * sx - 0.5, 0.0, static_cast<double>(src_width - 1));
      const int x0 = static_cast<int>(fx);
      const int x1 = std::min(x0 + 1, src_width - 1);
      const double wx = fx - x0;
      const auto at = [&](int yy, int xx) { return src[static_cast<std::size_t>(yy) * src_width + xx]; };
      const double top = at(y0, x0) * (1.0 - wx) + at(y0, x1) * wx;
      const double bottom = at(y1, x0) * (1.0 - wx) + at(y1, x1) * wx;
      dst[static_cast<std::size_t>(y) * dst_width + x] = top * (1.0 - wy) + bottom * wy;
    }
  }
  return dst;
}

SaliencyMap gradcam_map(const Classifier& model, const ImageTensor& image, int class_index,
                        std::string_view layer, bool signed_output) {
  const FeatureGradient fg = model.feature_gradient(image, class_index, layer);
  const Shape& s = fg.shape;
  if (s.plane() <= 1) {
    throw ConfigError("Grad-CAM layer '" + std::string(layer) + "' has no spatial extent");
  }
  const std::size_t plane = s.plane();
  std::vector<double> cam(plane, 0.0);
  for (int c = 0; c < s.channels; ++c) {
    const double* g = fg.gradient.data() + c * plane;
    const double* a = fg.activations.data() + c * plane;
    double weight = 0.0;
    for (std::size_t j = 0; j < plane; ++j) weight += g[j];
    weight /= static_cast<double>(plane);
    if (weight == 0.0) continue;
    for (std::size_t j = 0; j < plane; ++j) cam[j] += weight * a[j];
  }
  if (!signed_output) {
    for (double& v : cam) v = std::max(v, 0.0);
  }
  auto up = resize_bilinear(cam, s.height, s.width, image.height(), image.width());
  if (!signed_output) {
    normalize_min_max(up);
  } else {
    double peak = 0.0;
    for (double v : up) peak = std::max(peak, std::abs(v));
    for (double& v : up) v = peak > 0.0 ? 0.5 + 0.5 * v / peak : 0.5;
  }
  return SaliencyMap(image.width(), image.height(), std::move(up));
}

SaliencyMap vanilla_saliency_map(const Classifier& model, const ImageTensor& image,
                                 int class_index) {
  const auto grad = model.input_gradient(image, class_index);
  const std::size_t plane = image.shape().plane();
  std::vector<double> map(plane, 0.0);
  for (int c = 0; c < image.channels(); ++c) {
    for (std::size_t j = 0; j < plane; ++j) {
      map[j] = std::max(map[j], std::abs(grad[c * plane + j]));
    }
  }
  normalize_min_max(map);
  return SaliencyMap(image.width(), image.height(), std::move(map));
}

namespace {

class GradCamExplainer final : public Explainer {
 public:
  explicit GradCamExplainer(ExplainerSpec spec) : spec_(std::move(spec)) {}

  SaliencyMap explain(const Classifier& model, const ImageTensor& image,
                      int class_index) const override {
    const std::string layer =
        spec_.target_layer.empty() ? model.default_feature_layer() : spec_.target_layer;
    return gradcam_map(model, image, class_index, layer, spec_.signed_output);
  }
  std::string id() const override { return spec_.id(); }

 private:
  ExplainerSpec spec_;
};

class VanillaSaliencyExplainer final : public Explainer {
 public:
  SaliencyMap explain(const Classifier& model, const ImageTensor& image,
                      int class_index) const override {
    return vanilla_saliency_map(model, image, class_index);
  }
  std::string id() const override { return "saliency"; }
};

}  // namespace

std::unique_ptr<Explainer> make_explainer(const ExplainerSpec& spec) {
  if (spec.method == ExplainerMethod::kGradCam) return std::make_unique<GradCamExplainer>(spec);
  return std::make_unique<VanillaSaliencyExplainer>();
}

SaliencyMap explain(const ExplainerSpec& spec, const Classifier& model, const ImageTensor& image,
                    int class_index) {
  return make_explainer(spec)->explain(model, image, class_index);
}

}  // namespace edda
