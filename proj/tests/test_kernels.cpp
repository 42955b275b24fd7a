#include <gtest/gtest.h>
#include <omp.h>

#include <random>
#include <vector>

#include "edda/kernels.hpp"

namespace edda::kernels {
namespace {

std::vector<double> random_vector(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(n);
  for (double& x : v) x = u(rng);
  return v;
}

void expect_close(const std::vector<double>& a, const std::vector<double>& b, double tol) {
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) ASSERT_NEAR(a[i], b[i], tol) << "index " << i;
}

// Several OpenMP threads even on a single core, so the parallel path runs.
class KernelTest : public ::testing::TestWithParam<ConvGeometry> {
 protected:
  void SetUp() override {
    saved_ = omp_get_max_threads();
    omp_set_num_threads(4);
  }
  void TearDown() override { omp_set_num_threads(saved_); }
  int saved_ = 1;
};

TEST_P(KernelTest, ConvMatchesReference) {
  const ConvGeometry g = GetParam();
  std::mt19937_64 rng(7);
  const auto in = random_vector(g.in_size(), rng);
  const auto w = random_vector(g.weight_size(), rng);
  const auto b = random_vector(g.out_channels, rng);
  const auto gout = random_vector(g.out_size(), rng);

  std::vector<double> out(g.out_size()), out_ref(g.out_size());
  conv2d_forward(g, in, w, b, out);
  reference::conv2d_forward(g, in, w, b, out_ref);
  expect_close(out, out_ref, 1e-12);

  std::vector<double> gin(g.in_size(), 99.0), gin_ref(g.in_size(), -99.0);
  conv2d_backward_input(g, gout, w, gin);
  reference::conv2d_backward_input(g, gout, w, gin_ref);
  expect_close(gin, gin_ref, 1e-12);

  // Parameter gradients accumulate onto existing contents.
  std::vector<double> gw(g.weight_size(), 1.0), gb(g.out_channels, 1.0);
  std::vector<double> gw_ref(gw), gb_ref(gb);
  conv2d_backward_params(g, gout, in, gw, gb);
  reference::conv2d_backward_params(g, gout, in, gw_ref, gb_ref);
  expect_close(gw, gw_ref, 1e-10);
  expect_close(gb, gb_ref, 1e-12);
}

INSTANTIATE_TEST_SUITE_P(Geometries, KernelTest,
                         ::testing::Values(ConvGeometry{1, 1, 4, 4, 3, 1},
                                           ConvGeometry{3, 8, 32, 32, 3, 1},
                                           ConvGeometry{16, 16, 8, 8, 3, 1},
                                           ConvGeometry{2, 3, 5, 7, 3, 0},
                                           ConvGeometry{4, 2, 6, 6, 1, 0},
                                           ConvGeometry{3, 5, 9, 6, 5, 2}));

TEST(Conv, HandComputedThreeByThree) {
  // Single channel 3x3 input, all-ones kernel, pad 1: each output is the sum
  // of its in-bounds neighbourhood plus the bias.
  const ConvGeometry g{1, 1, 3, 3, 3, 1};
  const std::vector<double> in{1, 2, 3, 4, 5, 6, 7, 8, 9};
  const std::vector<double> w(9, 1.0), b{0.5};
  std::vector<double> out(9);
  conv2d_forward(g, in, w, b, out);
  const std::vector<double> expected{12.5, 21.5, 16.5, 27.5, 45.5, 33.5, 24.5, 39.5, 28.5};
  expect_close(out, expected, 1e-12);
}

TEST(Linear, MatchesReference) {
  std::mt19937_64 rng(3);
  for (auto [in_f, out_f] : {std::pair{5, 3}, std::pair{300, 200}}) {
    const auto in = random_vector(in_f, rng);
    const auto w = random_vector(static_cast<std::size_t>(in_f) * out_f, rng);
    const auto b = random_vector(out_f, rng);
    const auto gout = random_vector(out_f, rng);
    std::vector<double> out(out_f), out_ref(out_f);
    linear_forward(in_f, out_f, in, w, b, out);
    reference::linear_forward(in_f, out_f, in, w, b, out_ref);
    expect_close(out, out_ref, 1e-12);

    std::vector<double> gin(in_f), gin_ref(in_f);
    linear_backward_input(in_f, out_f, gout, w, gin);
    reference::linear_backward_input(in_f, out_f, gout, w, gin_ref);
    expect_close(gin, gin_ref, 1e-12);

    std::vector<double> gw(w.size(), 0.25), gb(out_f, 0.25);
    std::vector<double> gw_ref(gw), gb_ref(gb);
    linear_backward_params(in_f, out_f, gout, in, gw, gb);
    reference::linear_backward_params(in_f, out_f, gout, in, gw_ref, gb_ref);
    expect_close(gw, gw_ref, 1e-12);
    expect_close(gb, gb_ref, 1e-12);
  }
}

TEST(MaxPool, ForwardBackwardOracle) {
  // 1 channel, 3x4 input; the odd last row is dropped.
  const std::vector<double> in{1, 5, 2, 0,   //
                               3, 4, 8, 7,   //
                               9, 9, 9, 9};
  std::vector<double> out(2);
  std::vector<std::size_t> idx(2);
  maxpool2_forward(1, 3, 4, in, out, idx);
  EXPECT_EQ(out, (std::vector<double>{5, 8}));
  EXPECT_EQ(idx, (std::vector<std::size_t>{1, 6}));

  std::vector<double> gin(in.size(), 3.0);
  maxpool2_backward(std::vector<double>{2.0, -1.0}, idx, gin);
  std::vector<double> expected(in.size(), 0.0);
  expected[1] = 2.0;
  expected[6] = -1.0;
  EXPECT_EQ(gin, expected);
}

}  // namespace
}  // namespace edda::kernels
