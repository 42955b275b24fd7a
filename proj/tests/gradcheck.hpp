#pragma once

// Central finite-difference checks shared by the unit and acceptance tests.

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "edda/network.hpp"

namespace edda::testing {

// Relative error with a floor on the denominator so coordinates whose true
// derivative is zero compare on an absolute 1e-6 scale.
inline double relative_error(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-6});
}

// One-sided slopes of f along coordinate i. ReLU and max pooling make f
// piecewise linear, so a one-sided slope is exact once the step is below the
// distance to the nearest kink; the step is halved from h until two
// successive estimates agree. Their mean is the central difference.
struct SlopeEstimate {
  double left = 0.0;
  double right = 0.0;
  double central() const { return 0.5 * (left + right); }
  // False at a kink, where only a subgradient in [left, right] exists.
  bool differentiable() const { return relative_error(left, right) <= 1e-6; }
};

inline SlopeEstimate estimate_slopes(const std::function<double(std::span<const double>)>& f,
                                     std::vector<double>& x, std::size_t i, double h) {
  const double saved = x[i];
  const double f0 = f(x);
  auto side = [&](double sign) {
    auto at = [&](double step) {
      x[i] = saved + sign * step;
      const double v = f(x);
      x[i] = saved;
      return sign * (v - f0) / step;
    };
    double prev = at(h);
    for (double step = h / 2; step >= 1e-7; step /= 2) {
      const double cur = at(step);
      if (relative_error(prev, cur) <= 1e-7) return cur;
      prev = cur;
    }
    return prev;
  };
  SlopeEstimate e;
  e.right = side(1.0);
  e.left = side(-1.0);
  return e;
}

struct GradCheckResult {
  double max_rel_error = 0.0;  // over differentiable coordinates
  std::size_t checked = 0;
  std::size_t kinks = 0;          // coordinates sitting exactly on a kink
  std::size_t bad_subgradients = 0;  // kinks where analytic is outside [left, right]
};

// Compares `analytic` against finite differences of f at `x`.
inline GradCheckResult check_gradient(const std::function<double(std::span<const double>)>& f,
                                      std::vector<double> x, std::span<const double> analytic,
                                      double h = 1e-3) {
  GradCheckResult r;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const SlopeEstimate e = estimate_slopes(f, x, i, h);
    ++r.checked;
    if (e.differentiable()) {
      r.max_rel_error = std::max(r.max_rel_error, relative_error(analytic[i], e.central()));
      continue;
    }
    ++r.kinks;
    const double lo = std::min(e.left, e.right);
    const double hi = std::max(e.left, e.right);
    const double tol = 1e-6 * std::max({std::abs(lo), std::abs(hi), 1.0});
    if (analytic[i] < lo - tol || analytic[i] > hi + tol) ++r.bad_subgradients;
  }
  return r;
}

// Three conv layers with max pooling in the middle, for 8x8 inputs.
inline Network make_gradcheck_cnn(int channels, std::uint64_t seed) {
  Network net(Shape{channels, 8, 8}, 3, TaskKind::kMulticlass);
  net.conv(4, 3, 1).relu("c1");
  net.conv(5, 3, 1).relu("c2").maxpool2();
  net.conv(4, 3, 1).relu("c3");
  net.global_avg_pool().linear(3);
  net.init_parameters(seed);
  // Non-zero biases so no unit sits exactly at its kink by construction.
  std::mt19937_64 rng(seed + 1);
  std::normal_distribution<double> noise(0.0, 0.05);
  for (double& p : net.parameters()) p += noise(rng);
  return net;
}

inline std::vector<double> random_image_values(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> v(n);
  for (double& x : v) x = u(rng);
  return v;
}

}  // namespace edda::testing
