#include "edda/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "edda/errors.hpp"

namespace edda {

std::vector<double> target_vector(const Target& target, int num_outputs) {
  std::vector<double> v(num_outputs, 0.0);
  if (target.kind() == TaskKind::kMulticlass) {
    const int c = target.class_index();
    if (c < 0 || c >= num_outputs) throw ArgumentError("class index outside target vector");
    v[c] = 1.0;
  } else {
    const auto& labels = target.labels();
    if (labels.size() != v.size()) throw ArgumentError("label vector length mismatch");
    for (std::size_t i = 0; i < labels.size(); ++i) v[i] = labels[i];
  }
  return v;
}

SoftExample mix_pair(const ImageTensor& a, std::span<const double> target_a, const ImageTensor& b,
                     std::span<const double> target_b, double lambda) {
  if (a.shape() != b.shape() || target_a.size() != target_b.size()) {
    throw ArgumentError("mixup partners differ in shape");
  }
  SoftExample out{a, std::vector<double>(target_a.size()), lambda, 0};
  auto dst = out.image.data();
  const auto src = b.data();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = lambda * dst[i] + (1.0 - lambda) * src[i];
  for (std::size_t i = 0; i < target_a.size(); ++i) {
    out.target[i] = lambda * target_a[i] + (1.0 - lambda) * target_b[i];
  }
  return out;
}

CutBox cutmix_box(int width, int height, double lambda, int cx, int cy) {
  const double ratio = std::sqrt(std::clamp(1.0 - lambda, 0.0, 1.0));
  const int cut_w = static_cast<int>(std::floor(width * ratio));
  const int cut_h = static_cast<int>(std::floor(height * ratio));
  return {std::clamp(cx - cut_w / 2, 0, width), std::clamp(cy - cut_h / 2, 0, height),
          std::clamp(cx + cut_w / 2 + cut_w % 2, 0, width),
          std::clamp(cy + cut_h / 2 + cut_h % 2, 0, height)};
}

SoftExample cut_pair(const ImageTensor& a, std::span<const double> target_a,
                     const ImageTensor& b, std::span<const double> target_b, const CutBox& box) {
  if (a.shape() != b.shape() || target_a.size() != target_b.size()) {
    throw ArgumentError("cutmix partners differ in shape");
  }
  SoftExample out{a, std::vector<double>(target_a.size()), 1.0, 0};
  for (int c = 0; c < a.channels(); ++c) {
    for (int y = box.y0; y < box.y1; ++y) {
      for (int x = box.x0; x < box.x1; ++x) out.image.at(c, y, x) = b.at(c, y, x);
    }
  }
  const double total = static_cast<double>(a.width()) * a.height();
  const double lambda_adj = 1.0 - static_cast<double>(box.area()) / total;
  out.lambda = lambda_adj;
  for (std::size_t i = 0; i < target_a.size(); ++i) {
    out.target[i] = lambda_adj * target_a[i] + (1.0 - lambda_adj) * target_b[i];
  }
  return out;
}

double sample_beta(double alpha, std::mt19937_64& rng) {
  if (!(alpha > 0.0)) throw ArgumentError("beta parameter alpha must be positive");
  std::gamma_distribution<double> gamma(alpha, 1.0);
  const double x = gamma(rng);
  const double y = gamma(rng);
  const double sum = x + y;
  return sum > 0.0 ? x / sum : 0.5;
}

namespace {

std::vector<std::size_t> partners(std::size_t n, std::mt19937_64& rng) {
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::shuffle(perm.begin(), perm.end(), rng);
  return perm;
}

}  // namespace

std::vector<SoftExample> mixup_batch(std::span<const Example> batch, int num_outputs,
                                     double alpha, std::mt19937_64& rng) {
  if (!(alpha > 0.0)) throw ArgumentError("mixup alpha must be positive");
  const auto perm = partners(batch.size(), rng);
  std::vector<SoftExample> out;
  out.reserve(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const double lambda = sample_beta(alpha, rng);
    const auto& a = batch[i];
    const auto& b = batch[perm[i]];
    out.push_back(mix_pair(a.image, target_vector(a.target, num_outputs), b.image,
                           target_vector(b.target, num_outputs), lambda));
    out.back().partner = perm[i];
  }
  return out;
}

std::vector<SoftExample> cutmix_batch(std::span<const Example> batch, int num_outputs,
                                      double alpha, std::mt19937_64& rng) {
  if (!(alpha > 0.0)) throw ArgumentError("cutmix alpha must be positive");
  const auto perm = partners(batch.size(), rng);
  std::vector<SoftExample> out;
  out.reserve(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const auto& a = batch[i];
    const auto& b = batch[perm[i]];
    const double lambda = sample_beta(alpha, rng);
    std::uniform_int_distribution<int> xs(0, a.image.width() - 1);
    std::uniform_int_distribution<int> ys(0, a.image.height() - 1);
    const int cx = xs(rng);
    const int cy = ys(rng);
    const CutBox box = cutmix_box(a.image.width(), a.image.height(), lambda, cx, cy);
    out.push_back(cut_pair(a.image, target_vector(a.target, num_outputs), b.image,
                           target_vector(b.target, num_outputs), box));
    out.back().partner = perm[i];
  }
  return out;
}

}  // namespace edda
