#include "edda/augmentation.hpp"

#include "edda/errors.hpp"
#include "edda/occlusion.hpp"
#include "edda/parallel.hpp"

namespace edda {

void AugmentationConfig::validate() const {
  if (!(tau >= 0.0 && tau <= 1.0)) throw ConfigError("tau must lie in [0, 1]");
  if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("p must lie in [0, 1]");
  if (!(positive_threshold > 0.0 && positive_threshold < 1.0)) {
    throw ConfigError("positive_threshold must lie in (0, 1)");
  }
}

std::string_view to_string(Provenance provenance) {
  switch (provenance) {
    case Provenance::kOriginal: return "original";
    case Provenance::kMaskedOriginalLabel: return "masked_original_label";
    case Provenance::kMaskedBackgroundLabel: return "masked_background_label";
    case Provenance::kMaskedSingleLabel: return "masked_single_label";
  }
  return "unknown";
}

std::vector<AugmentedExample> edda_mc_batch(std::span<const Example> batch,
                                            const Classifier& model, const Explainer& explainer,
                                            const AugmentationConfig& config,
                                            std::mt19937_64& rng) {
  config.validate();
  if (model.task() != TaskKind::kMulticlass) {
    throw ConfigError("edda_mc_batch needs a multiclass model");
  }
  if (config.background_enabled && !model.has_background()) {
    throw ConfigError("background label enabled but the model has no background output");
  }
  for (const auto& ex : batch) {
    if (ex.target.kind() != TaskKind::kMulticlass) {
      throw ArgumentError("edda_mc_batch needs multiclass targets");
    }
    ex.target.validate(model.num_classes());
  }

  // One draw per example, taken up front so the stream does not depend on
  // which branch each example takes or on thread scheduling.
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::vector<double> draws(batch.size());
  for (double& r : draws) r = uniform(rng);

  std::vector<AugmentedExample> out(batch.size());
  parallel_for(batch.size(), [&](std::size_t k) {
    const Example& ex = batch[k];
    const int label = ex.target.class_index();
    const SaliencyMap saliency = explainer.explain(model, ex.image, label);
    ImageTensor masked = occlude_salient(ex.image, saliency, config.tau);
    const int predicted = argmax(model.logits(masked));

    AugmentedExample& result = out[k];
    if (predicted == label) {
      result = {std::move(masked), ex.target, Provenance::kMaskedOriginalLabel};
      return;
    }
    if (config.p > 0.0 && !config.background_enabled) {
      throw ConfigError("background branch reached with p > 0 but background label disabled");
    }
    if (draws[k] < config.p) {
      result = {std::move(masked), Target::multiclass(model.num_classes()),
                Provenance::kMaskedBackgroundLabel};
    } else {
      result = {ex.image, ex.target, Provenance::kOriginal};
    }
  });
  return out;
}

std::vector<AugmentedExample> edda_mc_batch(std::span<const Example> batch,
                                            const Classifier& model,
                                            const AugmentationConfig& config,
                                            std::mt19937_64& rng) {
  return edda_mc_batch(batch, model, *make_explainer(config.explainer), config, rng);
}

std::vector<AugmentedExample> edda_ml_batch(std::span<const Example> batch,
                                            const Classifier& model, const Explainer& explainer,
                                            const AugmentationConfig& config) {
  config.validate();
  if (model.task() != TaskKind::kMultilabel) {
    throw ConfigError("edda_ml_batch needs a multilabel model");
  }
  for (const auto& ex : batch) {
    if (ex.target.kind() != TaskKind::kMultilabel) {
      throw ArgumentError("edda_ml_batch needs multilabel targets");
    }
    ex.target.validate(model.num_classes());
  }

  std::vector<std::vector<AugmentedExample>> extra(batch.size());
  parallel_for(batch.size(), [&](std::size_t k) {
    const Example& ex = batch[k];
    const auto scores = predict(model, ex.image);
    const auto& labels = ex.target.labels();
    for (int z = 0; z < model.num_classes(); ++z) {
      if (labels[z] != 1 || scores[z] < config.positive_threshold) continue;
      const SaliencyMap saliency = explainer.explain(model, ex.image, z);
      ImageTensor masked = occlude_salient(ex.image, saliency, config.tau);
      const auto masked_scores = predict(model, masked);
      if (masked_scores[z] < config.positive_threshold) continue;
      std::vector<std::uint8_t> single(labels.size(), 0);
      single[z] = 1;
      extra[k].push_back({std::move(masked), Target::multilabel(std::move(single)),
                          Provenance::kMaskedSingleLabel, z});
    }
  });

  std::vector<AugmentedExample> out;
  out.reserve(batch.size());
  for (const auto& ex : batch) out.push_back({ex.image, ex.target, Provenance::kOriginal});
  for (auto& group : extra) {
    for (auto& e : group) out.push_back(std::move(e));
  }
  return out;
}

std::vector<AugmentedExample> edda_ml_batch(std::span<const Example> batch,
                                            const Classifier& model,
                                            const AugmentationConfig& config) {
  return edda_ml_batch(batch, model, *make_explainer(config.explainer), config);
}

}  // namespace edda
