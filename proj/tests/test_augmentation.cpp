#include <gtest/gtest.h>

#include "edda/augmentation.hpp"
#include "edda/errors.hpp"
#include "edda/occlusion.hpp"
#include "stubs.hpp"

namespace edda {
namespace {

using testing::FunctionExplainer;
using testing::FunctionModel;

constexpr int kClasses = 3;
const Shape kShape{1, 4, 4};

// Multiclass fixture: the label is written into pixel (3,3) as (label+1)/5 and
// every original pixel is positive. The explainer marks pixel (0, label) as
// salient, so occlusion zeroes exactly that pixel. The stub model reads the
// label back and, when `aligned` is false, answers wrongly on any image with
// a zeroed pixel in row 0.
Example mc_example(int label) {
  ImageTensor img(4, 4, 1, 0.5);
  img.at(0, 3, 3) = (label + 1) / 5.0;
  return {img, Target::multiclass(label)};
}

FunctionModel mc_model(bool aligned, bool background = false) {
  return FunctionModel(
      kShape, kClasses, TaskKind::kMulticlass,
      [aligned, background](const ImageTensor& img) {
        const int label = static_cast<int>(img.at(0, 3, 3) * 5.0 + 0.5) - 1;
        bool masked = false;
        for (int x = 0; x < 4; ++x) masked = masked || img.at(0, 0, x) == 0.0;
        const int predicted = (masked && !aligned) ? (label + 1) % kClasses : label;
        std::vector<double> logits(kClasses + (background ? 1 : 0), 0.0);
        logits[predicted] = 4.0;
        return logits;
      },
      background);
}

FunctionExplainer label_pixel_explainer() {
  return FunctionExplainer([](const Classifier&, const ImageTensor& img, int cls) {
    SaliencyMap s(img.width(), img.height(), 0.1);
    s.at(0, cls) = 0.9;
    return s;
  });
}

std::vector<Example> mc_batch() {
  return {mc_example(0), mc_example(1), mc_example(2), mc_example(1)};
}

TEST(EddaMc, AlignedEmitsMaskedWithOriginalLabel) {
  const auto batch = mc_batch();
  const auto model = mc_model(true);
  const auto explainer = label_pixel_explainer();
  std::mt19937_64 rng(1);
  const auto out = edda_mc_batch(batch, model, explainer, AugmentationConfig{}, rng);
  ASSERT_EQ(out.size(), batch.size());
  for (std::size_t k = 0; k < batch.size(); ++k) {
    EXPECT_EQ(out[k].provenance, Provenance::kMaskedOriginalLabel);
    EXPECT_EQ(out[k].target, batch[k].target);
    const int label = batch[k].target.class_index();
    // Saliency was taken for the ground-truth label.
    EXPECT_EQ(out[k].image.at(0, 0, label), 0.0);
    EXPECT_EQ(out[k].image,
              occlude_salient(batch[k].image, explainer.explain(model, batch[k].image, label),
                              0.5));
  }
}

TEST(EddaMc, MisalignedWithPZeroIsIdentity) {
  const auto batch = mc_batch();
  std::mt19937_64 rng(1);
  const auto out =
      edda_mc_batch(batch, mc_model(false), label_pixel_explainer(), AugmentationConfig{}, rng);
  ASSERT_EQ(out.size(), batch.size());
  for (std::size_t k = 0; k < batch.size(); ++k) {
    EXPECT_EQ(out[k].provenance, Provenance::kOriginal);
    EXPECT_EQ(out[k].image, batch[k].image);
    EXPECT_EQ(out[k].target, batch[k].target);
  }
}

TEST(EddaMc, MisalignedWithPOneEmitsBackground) {
  const auto batch = mc_batch();
  AugmentationConfig cfg;
  cfg.p = 1.0;
  cfg.background_enabled = true;
  std::mt19937_64 rng(1);
  const auto out =
      edda_mc_batch(batch, mc_model(false, true), label_pixel_explainer(), cfg, rng);
  ASSERT_EQ(out.size(), batch.size());
  for (std::size_t k = 0; k < batch.size(); ++k) {
    EXPECT_EQ(out[k].provenance, Provenance::kMaskedBackgroundLabel);
    EXPECT_EQ(out[k].target, Target::multiclass(kClasses));
    EXPECT_EQ(out[k].image.at(0, 0, batch[k].target.class_index()), 0.0);
  }
}

TEST(EddaMc, IntermediatePFollowsUpFrontDraws) {
  std::vector<Example> batch;
  for (int i = 0; i < 40; ++i) batch.push_back(mc_example(i % kClasses));
  AugmentationConfig cfg;
  cfg.p = 0.4;
  cfg.background_enabled = true;
  const auto model = mc_model(false, true);
  std::mt19937_64 rng(99);
  const auto out = edda_mc_batch(batch, model, label_pixel_explainer(), cfg, rng);

  std::mt19937_64 replay(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int background = 0;
  for (std::size_t k = 0; k < batch.size(); ++k) {
    const bool expect_bg = u(replay) < cfg.p;
    background += expect_bg ? 1 : 0;
    EXPECT_EQ(out[k].provenance,
              expect_bg ? Provenance::kMaskedBackgroundLabel : Provenance::kOriginal);
  }
  EXPECT_GT(background, 0);
  EXPECT_LT(background, 40);

  std::mt19937_64 again(99);
  const auto repeat = edda_mc_batch(batch, model, label_pixel_explainer(), cfg, again);
  for (std::size_t k = 0; k < batch.size(); ++k) {
    EXPECT_EQ(repeat[k].image, out[k].image);
    EXPECT_EQ(repeat[k].target, out[k].target);
  }
}

TEST(EddaMc, ZeroSaliencyEmitsUnchangedImages) {
  const auto batch = mc_batch();
  std::mt19937_64 rng(1);
  const auto out = edda_mc_batch(batch, mc_model(false), testing::constant_explainer(0.0),
                                 AugmentationConfig{}, rng);
  for (std::size_t k = 0; k < batch.size(); ++k) {
    EXPECT_EQ(out[k].provenance, Provenance::kMaskedOriginalLabel);
    EXPECT_EQ(out[k].image, batch[k].image);
  }
}

TEST(EddaMc, Errors) {
  const auto batch = mc_batch();
  const auto explainer = label_pixel_explainer();
  std::mt19937_64 rng(1);
  AugmentationConfig cfg;
  cfg.p = 0.5;
  // Background branch reached without a background label.
  EXPECT_THROW(edda_mc_batch(batch, mc_model(false), explainer, cfg, rng), ConfigError);
  // Never reached when every masked prediction is correct.
  EXPECT_NO_THROW(edda_mc_batch(batch, mc_model(true), explainer, cfg, rng));

  cfg.background_enabled = true;
  EXPECT_THROW(edda_mc_batch(batch, mc_model(false, false), explainer, cfg, rng), ConfigError);

  std::vector<Example> ml{{ImageTensor(4, 4, 1, 0.5), Target::multilabel({1, 0, 0})}};
  EXPECT_THROW(edda_mc_batch(ml, mc_model(true), explainer, AugmentationConfig{}, rng),
               ArgumentError);
  std::vector<Example> bad{mc_example(0)};
  bad[0].target = Target::multiclass(7);
  EXPECT_THROW(edda_mc_batch(bad, mc_model(true), explainer, AugmentationConfig{}, rng),
               ArgumentError);

  AugmentationConfig wrong;
  wrong.tau = 1.5;
  EXPECT_THROW(edda_mc_batch(batch, mc_model(true), explainer, wrong, rng), ConfigError);
  wrong = AugmentationConfig{};
  wrong.p = -0.1;
  EXPECT_THROW(wrong.validate(), ConfigError);
  wrong = AugmentationConfig{};
  wrong.positive_threshold = 1.0;
  EXPECT_THROW(wrong.validate(), ConfigError);
}

// Multilabel fixture: class z is present when pixel (0, z) is positive, and
// the stub model scores it sigmoid(+5) there, sigmoid(-5) otherwise. The
// explainer for class z marks either the evidence pixel (0, z) or an
// irrelevant pixel (2, z), chosen per class by `hits_evidence`.
FunctionModel ml_model() {
  return FunctionModel(kShape, kClasses, TaskKind::kMultilabel, [](const ImageTensor& img) {
    std::vector<double> logits(kClasses);
    for (int z = 0; z < kClasses; ++z) logits[z] = img.at(0, 0, z) > 0.0 ? 5.0 : -5.0;
    return logits;
  });
}

FunctionExplainer ml_explainer(std::vector<bool> hits_evidence) {
  return FunctionExplainer([hits_evidence](const Classifier&, const ImageTensor& img, int z) {
    SaliencyMap s(img.width(), img.height(), 0.0);
    s.at(hits_evidence[z] ? 0 : 2, z) = 1.0;
    return s;
  });
}

Example ml_example(std::vector<int> present, std::vector<std::uint8_t> labels) {
  ImageTensor img(4, 4, 1, 0.2);
  for (int z = 0; z < kClasses; ++z) img.at(0, 0, z) = 0.0;
  for (int z : present) img.at(0, 0, z) = 0.8;
  return {img, Target::multilabel(std::move(labels))};
}

TEST(EddaMl, NoTruePositivesLeavesBatchUnchanged) {
  // Present but unlabeled (false positive) and labeled but absent (false
  // negative) classes are not true positives.
  const std::vector<Example> batch{ml_example({0}, {0, 1, 0}), ml_example({}, {0, 0, 1})};
  const auto out = edda_ml_batch(batch, ml_model(), ml_explainer({false, false, false}),
                                 AugmentationConfig{});
  ASSERT_EQ(out.size(), 2u);
  for (std::size_t k = 0; k < 2; ++k) {
    EXPECT_EQ(out[k].provenance, Provenance::kOriginal);
    EXPECT_EQ(out[k].image, batch[k].image);
    EXPECT_EQ(out[k].target, batch[k].target);
  }
}

TEST(EddaMl, SurvivingClassIsAppendedOnce) {
  // Classes 0 and 1 are true positives. Masking class 0 removes its evidence
  // (score falls below 0.5); masking class 1 hits an irrelevant pixel.
  const std::vector<Example> batch{ml_example({0, 1}, {1, 1, 0})};
  const auto out = edda_ml_batch(batch, ml_model(), ml_explainer({true, false, false}),
                                 AugmentationConfig{});
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].provenance, Provenance::kOriginal);
  EXPECT_EQ(out[0].image, batch[0].image);
  EXPECT_EQ(out[1].provenance, Provenance::kMaskedSingleLabel);
  EXPECT_EQ(out[1].masked_class, 1);
  EXPECT_EQ(out[1].target, Target::multilabel({0, 1, 0}));
  EXPECT_EQ(out[1].image.at(0, 2, 1), 0.0);
  EXPECT_EQ(out[1].image.at(0, 2, 0), 0.2);
  EXPECT_EQ(out[1].image.at(0, 0, 1), 0.8);
}

TEST(EddaMl, NonSurvivingClassesAddNothing) {
  const std::vector<Example> batch{ml_example({0, 2}, {1, 0, 1})};
  const auto out = edda_ml_batch(batch, ml_model(), ml_explainer({true, true, true}),
                                 AugmentationConfig{});
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].provenance, Provenance::kOriginal);
}

TEST(EddaMl, GrowthBoundAndOrder) {
  std::vector<Example> batch;
  for (int i = 0; i < 6; ++i) batch.push_back(ml_example({0, 1, 2}, {1, 1, 1}));
  const auto out = edda_ml_batch(batch, ml_model(), ml_explainer({false, false, false}),
                                 AugmentationConfig{});
  EXPECT_EQ(out.size(), batch.size() * (1 + kClasses));
  for (std::size_t k = 0; k < batch.size(); ++k) EXPECT_EQ(out[k].provenance, Provenance::kOriginal);
  for (std::size_t k = 0; k < batch.size() * kClasses; ++k) {
    EXPECT_EQ(out[batch.size() + k].masked_class, static_cast<int>(k % kClasses));
  }
}

TEST(EddaMl, Errors) {
  const std::vector<Example> mc{mc_example(0)};
  EXPECT_THROW(edda_ml_batch(mc, ml_model(), ml_explainer({false, false, false}), AugmentationConfig{}),
               ArgumentError);
  const std::vector<Example> ml{ml_example({0}, {1, 0, 0})};
  EXPECT_THROW(edda_ml_batch(ml, mc_model(true), ml_explainer({false, false, false}), AugmentationConfig{}),
               ConfigError);
  const std::vector<Example> short_labels{ml_example({0}, {1, 0})};
  EXPECT_THROW(edda_ml_batch(short_labels, ml_model(), ml_explainer({false, false, false}),
                             AugmentationConfig{}),
               ArgumentError);
}

TEST(Provenance, Names) {
  EXPECT_EQ(to_string(Provenance::kOriginal), "original");
  EXPECT_EQ(to_string(Provenance::kMaskedOriginalLabel), "masked_original_label");
  EXPECT_EQ(to_string(Provenance::kMaskedBackgroundLabel), "masked_background_label");
  EXPECT_EQ(to_string(Provenance::kMaskedSingleLabel), "masked_single_label");
}

}  // namespace
}  // namespace edda
