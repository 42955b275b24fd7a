#pragma once

#include <random>
#include <span>
#include <vector>

#include "edda/tensor.hpp"

namespace edda {

// A training example with a soft target vector over model outputs.
struct SoftExample {
  ImageTensor image;
  std::vector<double> target;
  double lambda = 1.0;  // weight of the example's own target (lambda_adj for CutMix)
  std::size_t partner = 0;
};

// One-hot (multiclass) or 0/1 (multilabel) vector of length `num_outputs`.
std::vector<double> target_vector(const Target& target, int num_outputs);

// Half-open pixel rectangle [x0, x1) x [y0, y1).
struct CutBox {
  int x0 = 0;
  int y0 = 0;
  int x1 = 0;
  int y1 = 0;

  long long area() const { return static_cast<long long>(x1 - x0) * (y1 - y0); }
};

// lambda * x_a + (1 - lambda) * x_b, and likewise for the targets.
SoftExample mix_pair(const ImageTensor& a, std::span<const double> target_a, const ImageTensor& b,
                     std::span<const double> target_b, double lambda);

// Box of side lengths floor(W sqrt(1 - lambda)), floor(H sqrt(1 - lambda))
// centred on (cx, cy) and clipped to the image.
CutBox cutmix_box(int width, int height, double lambda, int cx, int cy);

// Pastes b's pixels inside `box` onto a; target weight is
// lambda_adj = 1 - area(box) / (W H).
SoftExample cut_pair(const ImageTensor& a, std::span<const double> target_a,
                     const ImageTensor& b, std::span<const double> target_b, const CutBox& box);

// Beta(alpha, alpha) via two gamma draws.
double sample_beta(double alpha, std::mt19937_64& rng);

// Partner j for example i comes from one random permutation of the batch;
// lambda ~ Beta(alpha, alpha) per example.
std::vector<SoftExample> mixup_batch(std::span<const Example> batch, int num_outputs,
                                     double alpha, std::mt19937_64& rng);
std::vector<SoftExample> cutmix_batch(std::span<const Example> batch, int num_outputs,
                                      double alpha, std::mt19937_64& rng);

}  // namespace edda
