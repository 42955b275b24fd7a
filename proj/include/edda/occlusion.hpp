#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "edda/tensor.hpp"

namespace edda {

// Zeroes, on every channel, each pixel whose saliency exceeds `tau`. The
// input is not modified.
ImageTensor occlude_salient(const ImageTensor& image, const SaliencyMap& saliency, double tau);

// Keeps the ceil(fraction * W * H) most salient pixels and zeroes the rest on
// every channel. Ties are resolved in favour of the earlier pixel in
// row-major order. `fraction` must lie in (0, 1].
ImageTensor keep_top_fraction(const ImageTensor& image, const SaliencyMap& saliency,
                              double fraction);

// Row-major 0/1 mask of the pixels keep_top_fraction would retain.
std::vector<std::uint8_t> top_fraction_mask(const SaliencyMap& saliency, double fraction);

// Intersection over union of two 0/1 masks; 0 when both are empty.
double mask_iou(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b);

// Number of pixels keep_top_fraction retains for a map of `pixels` entries.
std::size_t kept_pixel_count(std::size_t pixels, double fraction);

}  // namespace edda
