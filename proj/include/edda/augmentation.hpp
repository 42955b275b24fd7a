#pragma once

#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "edda/classifier.hpp"
#include "edda/explainers.hpp"
#include "edda/tensor.hpp"

namespace edda {

struct AugmentationConfig {
  double tau = 0.5;  // saliency threshold for occlusion
  double p = 0.0;    // probability of the masked+background branch
  ExplainerSpec explainer;
  bool background_enabled = false;
  double positive_threshold = 0.5;  // multilabel positive-prediction cutoff

  // Throws ConfigError when a field is out of range.
  void validate() const;
};

enum class Provenance {
  kOriginal,
  kMaskedOriginalLabel,
  kMaskedBackgroundLabel,
  kMaskedSingleLabel,
};

std::string_view to_string(Provenance provenance);

struct AugmentedExample {
  ImageTensor image;
  Target target;
  Provenance provenance = Provenance::kOriginal;
  int masked_class = -1;  // set for kMaskedSingleLabel
};

// Explanation-driven augmentation for multiclass batches. Emits exactly one
// example per input, in input order:
//   masked prediction == label     -> (masked, label)
//   otherwise, with probability p  -> (masked, background)
//   otherwise                      -> (original, label)
// Saliency is computed for the ground-truth label. The model is only read.
std::vector<AugmentedExample> edda_mc_batch(std::span<const Example> batch,
                                            const Classifier& model, const Explainer& explainer,
                                            const AugmentationConfig& config,
                                            std::mt19937_64& rng);
std::vector<AugmentedExample> edda_mc_batch(std::span<const Example> batch,
                                            const Classifier& model,
                                            const AugmentationConfig& config,
                                            std::mt19937_64& rng);

// Explanation-driven augmentation for multilabel batches. Returns the batch
// unchanged, followed by one masked example per true-positive class whose
// score survives occlusion of that class's salient region. Appended examples
// carry a single-label target and provenance kMaskedSingleLabel.
std::vector<AugmentedExample> edda_ml_batch(std::span<const Example> batch,
                                            const Classifier& model, const Explainer& explainer,
                                            const AugmentationConfig& config);
std::vector<AugmentedExample> edda_ml_batch(std::span<const Example> batch,
                                            const Classifier& model,
                                            const AugmentationConfig& config);

}  // namespace edda
