#pragma once

#include <string>

#include "edda/tensor.hpp"

namespace edda {

// Binary Netpbm: P6 (RGB) loads as 3 channels, P5 (grey) as 1 channel.
// Only maxval 255 is supported.
ImageTensor read_pnm(const std::string& path);
// Writes P6 for 3-channel and P5 for 1-channel images; values are clamped to
// [0,1] and quantized to round(255 v).
void write_pnm(const std::string& path, const ImageTensor& image);

// Diverging blue-white-red colour for a value in [0,1] (0 blue, 0.5 white,
// 1 red), as RGB in [0,1].
struct Rgb {
  double r, g, b;
};
Rgb diverging_colour(double value);

// Blends the colour-mapped saliency over the image: out = (1 - alpha) * image
// + alpha * colour. Single-channel images are replicated to grey RGB; other
// channel counts other than 3 are averaged to grey first. Output is RGB.
ImageTensor render_overlay(const ImageTensor& image, const SaliencyMap& saliency,
                           double alpha = 0.5);

}  // namespace edda
