#include <gtest/gtest.h>

#include <random>

#include "edda/errors.hpp"
#include "edda/occlusion.hpp"

namespace edda {
namespace {

ImageTensor counting_image(int w, int h, int c) {
  std::vector<double> v(static_cast<std::size_t>(w) * h * c);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = 0.1 + 0.8 * static_cast<double>(i) / v.size();
  return ImageTensor(w, h, c, v);
}

std::size_t nonzero_positions(const ImageTensor& img) {
  std::size_t n = 0;
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      bool any = false;
      for (int c = 0; c < img.channels(); ++c) any = any || img.at(c, y, x) != 0.0;
      n += any ? 1 : 0;
    }
  }
  return n;
}

TEST(OccludeSalient, HandExample) {
  const ImageTensor img = counting_image(2, 2, 3);
  const SaliencyMap s(2, 2, std::vector<double>{0.9, 0.1, 0.6, 0.4});
  const ImageTensor out = occlude_salient(img, s, 0.5);
  for (int c = 0; c < 3; ++c) {
    EXPECT_EQ(out.at(c, 0, 0), 0.0);
    EXPECT_EQ(out.at(c, 1, 0), 0.0);
    EXPECT_EQ(out.at(c, 0, 1), img.at(c, 0, 1));
    EXPECT_EQ(out.at(c, 1, 1), img.at(c, 1, 1));
  }
}

TEST(OccludeSalient, ExtremesAndStrictThreshold) {
  const ImageTensor img = counting_image(4, 3, 2);
  EXPECT_EQ(occlude_salient(img, SaliencyMap(4, 3, 0.0), 0.5), img);
  EXPECT_EQ(occlude_salient(img, SaliencyMap(4, 3, 1.0), 0.5), ImageTensor(4, 3, 2, 0.0));
  // Equality with tau does not occlude.
  EXPECT_EQ(occlude_salient(img, SaliencyMap(4, 3, 0.5), 0.5), img);
}

TEST(OccludeSalient, IdempotentAndInputUntouched) {
  const ImageTensor img = counting_image(5, 5, 1);
  const ImageTensor copy = img;
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> v(25);
  for (double& x : v) x = u(rng);
  const SaliencyMap s(5, 5, v);
  const ImageTensor once = occlude_salient(img, s, 0.3);
  EXPECT_EQ(occlude_salient(once, s, 0.3), once);
  EXPECT_EQ(img, copy);
}

TEST(OccludeSalient, SizeMismatch) {
  EXPECT_THROW(occlude_salient(ImageTensor(3, 3, 1), SaliencyMap(3, 2), 0.5), ArgumentError);
  EXPECT_THROW(keep_top_fraction(ImageTensor(3, 3, 1), SaliencyMap(2, 3), 0.5), ArgumentError);
}

TEST(KeepTopFraction, FullFractionIsIdentity) {
  const ImageTensor img = counting_image(6, 4, 3);
  EXPECT_EQ(keep_top_fraction(img, SaliencyMap(6, 4, 0.2), 1.0), img);
}

TEST(KeepTopFraction, DistinctValuesKeepFifteen) {
  std::vector<double> v(100);
  for (int i = 0; i < 100; ++i) v[i] = ((i * 37) % 100) / 100.0;
  const SaliencyMap s(10, 10, v);
  const ImageTensor out = keep_top_fraction(ImageTensor(10, 10, 2, 1.0), s, 0.15);
  EXPECT_EQ(nonzero_positions(out), 15u);
  for (int i = 0; i < 100; ++i) {
    const bool kept = out.data()[i] != 0.0;
    EXPECT_EQ(kept, v[i] >= 0.85) << i;
  }
}

TEST(KeepTopFraction, UniformTiesKeepFirstRowMajorPixels) {
  const ImageTensor out = keep_top_fraction(ImageTensor(10, 10, 1, 1.0), SaliencyMap(10, 10, 0.3),
                                            0.15);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(out.data()[i], i < 15 ? 1.0 : 0.0) << i;
}

TEST(KeepTopFraction, CountIsCeilingWithRoundingGuard) {
  EXPECT_EQ(kept_pixel_count(100, 0.15), 15u);  // 0.15 * 100 = 15.000000000000002
  EXPECT_EQ(kept_pixel_count(1024, 0.15), 154u);  // 153.6 -> 154
  EXPECT_EQ(kept_pixel_count(7, 0.01), 1u);
  EXPECT_EQ(kept_pixel_count(64, 1.0), 64u);
  EXPECT_THROW(kept_pixel_count(10, 0.0), ArgumentError);
  EXPECT_THROW(kept_pixel_count(10, 1.5), ArgumentError);
}

TEST(KeepTopFraction, MaskMatchesImageAndIou) {
  const SaliencyMap s(2, 2, std::vector<double>{0.1, 0.9, 0.5, 0.9});
  EXPECT_EQ(top_fraction_mask(s, 0.5), (std::vector<std::uint8_t>{0, 1, 0, 1}));
  const std::vector<std::uint8_t> a{1, 1, 0, 0};
  const std::vector<std::uint8_t> b{0, 1, 1, 0};
  EXPECT_DOUBLE_EQ(mask_iou(a, b), 1.0 / 3.0);
  EXPECT_EQ(mask_iou(std::vector<std::uint8_t>(4, 0), std::vector<std::uint8_t>(4, 0)), 0.0);
  EXPECT_THROW(mask_iou(a, std::vector<std::uint8_t>(3)), ArgumentError);
}

}  // namespace
}  // namespace edda
