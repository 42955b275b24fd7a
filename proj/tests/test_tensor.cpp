#include <gtest/gtest.h>

#include <cmath>

#include "edda/classifier.hpp"
#include "edda/errors.hpp"
#include "edda/tensor.hpp"

namespace edda {
namespace {

TEST(ImageTensor, ChannelPlanarIndexing) {
  ImageTensor img(3, 2, 2);
  img.at(1, 1, 2) = 0.5;
  // (c * H + y) * W + x = (1 * 2 + 1) * 3 + 2
  EXPECT_DOUBLE_EQ(img.data()[11], 0.5);
  EXPECT_EQ(img.size(), 12u);
  EXPECT_EQ(img.shape(), (Shape{2, 2, 3}));
}

TEST(ImageTensor, RejectsBadDimensions) {
  EXPECT_THROW(ImageTensor(0, 2, 1), InputShapeError);
  EXPECT_THROW(ImageTensor(2, 2, 1, std::vector<double>(3)), InputShapeError);
  EXPECT_NO_THROW(ImageTensor(2, 2, 1, std::vector<double>(4)));
}

TEST(ImageTensor, UnitRange) {
  ImageTensor img(2, 2, 1, 0.5);
  EXPECT_TRUE(img.in_unit_range());
  img.at(0, 0, 0) = 1.0001;
  EXPECT_FALSE(img.in_unit_range());
}

TEST(SaliencyMap, RowMajor) {
  SaliencyMap m(3, 2, std::vector<double>{0, 1, 2, 3, 4, 5});
  EXPECT_DOUBLE_EQ(m.at(1, 0), 3.0);
  EXPECT_THROW(SaliencyMap(3, 2, std::vector<double>(5)), InputShapeError);
}

TEST(NormalizeMinMax, MapsToUnitInterval) {
  std::vector<double> v{2.0, 4.0, 3.0};
  normalize_min_max(v);
  EXPECT_DOUBLE_EQ(v[0], 0.0);
  EXPECT_DOUBLE_EQ(v[1], 1.0);
  EXPECT_DOUBLE_EQ(v[2], 0.5);
}

TEST(NormalizeMinMax, ConstantBecomesZero) {
  std::vector<double> v(5, 0.7);
  normalize_min_max(v);
  for (double x : v) EXPECT_EQ(x, 0.0);
}

TEST(Target, Validation) {
  EXPECT_NO_THROW(Target::multiclass(2).validate(3));
  EXPECT_THROW(Target::multiclass(3).validate(3), ArgumentError);
  EXPECT_NO_THROW(Target::multiclass(3).validate(3, true));
  EXPECT_THROW(Target::multiclass(-1).validate(3), ArgumentError);
  EXPECT_NO_THROW(Target::multilabel({1, 0, 1}).validate(3));
  EXPECT_THROW(Target::multilabel({1, 0}).validate(3), ArgumentError);
  EXPECT_THROW(Target::multilabel({2, 0, 0}).validate(3), ArgumentError);
  EXPECT_THROW(Target::multilabel({1, 0}).class_index(), ArgumentError);
  EXPECT_THROW(Target::multiclass(0).labels(), ArgumentError);
}

TEST(TaskKind, RoundTrip) {
  EXPECT_EQ(task_from_string(to_string(TaskKind::kMultilabel)), TaskKind::kMultilabel);
  EXPECT_EQ(task_from_string(to_string(TaskKind::kMulticlass)), TaskKind::kMulticlass);
  EXPECT_THROW(task_from_string("regression"), ConfigError);
}

TEST(Activation, SoftmaxIsStableAndNormalized) {
  const auto p = softmax(std::vector<double>{1000.0, 1000.0, 0.0});
  EXPECT_NEAR(p[0], 0.5, 1e-12);
  EXPECT_NEAR(p[1], 0.5, 1e-12);
  EXPECT_NEAR(p[2], 0.0, 1e-12);
  const auto q = softmax(std::vector<double>{0.0, std::log(3.0)});
  EXPECT_NEAR(q[0], 0.25, 1e-12);
  EXPECT_NEAR(q[1], 0.75, 1e-12);
}

TEST(Activation, Sigmoid) {
  EXPECT_DOUBLE_EQ(sigmoid(0.0), 0.5);
  EXPECT_NEAR(sigmoid(-800.0), 0.0, 1e-300);
  EXPECT_DOUBLE_EQ(sigmoid(800.0), 1.0);
  EXPECT_NEAR(sigmoid(2.0), 1.0 / (1.0 + std::exp(-2.0)), 1e-15);
}

TEST(Activation, ArgmaxTiesAndLimit) {
  const std::vector<double> v{1.0, 3.0, 3.0, 9.0};
  EXPECT_EQ(argmax(v), 3);
  EXPECT_EQ(argmax(v, 3), 1);
  EXPECT_THROW(argmax(std::vector<double>{}), ArgumentError);
}

}  // namespace
}  // namespace edda
