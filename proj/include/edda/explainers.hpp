#pragma once

#include <memory>
#include <string>
#include <string_view>

#include "edda/classifier.hpp"
#include "edda/tensor.hpp"

namespace edda {

enum class ExplainerMethod { kGradCam, kVanillaSaliency };

std::string_view to_string(ExplainerMethod method);
// Accepts "gradcam" and "saliency" (alias "vanilla_saliency").
ExplainerMethod explainer_method_from_string(std::string_view name);

struct ExplainerSpec {
  ExplainerMethod method = ExplainerMethod::kGradCam;
  // Grad-CAM feature layer; empty selects the model's default (last conv block).
  std::string target_layer;
  // Grad-CAM without rectification, for heatmap rendering only.
  bool signed_output = false;

  // Stable identifier used in reports, e.g. "gradcam@conv3" or "saliency".
  std::string id() const;
};

// Produces a saliency map for one (image, class) pair. Implementations are
// stateless, so one instance may serve concurrent calls.
class Explainer {
 public:
  virtual ~Explainer() = default;
  virtual SaliencyMap explain(const Classifier& model, const ImageTensor& image,
                              int class_index) const = 0;
  virtual std::string id() const = 0;
};

std::unique_ptr<Explainer> make_explainer(const ExplainerSpec& spec);

// Dispatches on spec.method. Result has the image's spatial size.
SaliencyMap explain(const ExplainerSpec& spec, const Classifier& model, const ImageTensor& image,
                    int class_index);

// Grad-CAM on `layer`: channel weights are the spatial mean of the class-logit
// gradient, the weighted activation sum is rectified, bilinearly resized to
// the input and min-max normalized.
//
// With signed_output the sum is not rectified; it is instead scaled by its
// largest magnitude and mapped to 0.5 + 0.5 * v, so 0.5 marks zero
// contribution, values above it positive and below it negative evidence.
SaliencyMap gradcam_map(const Classifier& model, const ImageTensor& image, int class_index,
                        std::string_view layer, bool signed_output = false);

// Channel-max of |d logit / d pixel|, min-max normalized.
SaliencyMap vanilla_saliency_map(const Classifier& model, const ImageTensor& image,
                                 int class_index);

// Bilinear resize of a single-channel row-major plane using half-pixel
// centers (edge-clamped).
std::vector<double> resize_bilinear(std::span<const double> src, int src_height, int src_width,
                                    int dst_height, int dst_width);

}  // namespace edda
