#include "edda/occlusion.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "edda/errors.hpp"

namespace edda {
namespace {

void check_sizes(const ImageTensor& image, const SaliencyMap& saliency) {
  if (image.width() != saliency.width() || image.height() != saliency.height()) {
    throw ArgumentError("saliency map " + std::to_string(saliency.width()) + "x" +
                        std::to_string(saliency.height()) + " does not match image " +
                        std::to_string(image.width()) + "x" + std::to_string(image.height()));
  }
}

void zero_pixel(ImageTensor& image, std::size_t pixel) {
  const std::size_t plane = image.shape().plane();
  auto data = image.data();
  for (int c = 0; c < image.channels(); ++c) data[c * plane + pixel] = 0.0;
}

}  // namespace

ImageTensor occlude_salient(const ImageTensor& image, const SaliencyMap& saliency, double tau) {
  check_sizes(image, saliency);
  ImageTensor out = image;
  const auto s = saliency.values();
  for (std::size_t p = 0; p < s.size(); ++p) {
    if (s[p] > tau) zero_pixel(out, p);
  }
  return out;
}

std::size_t kept_pixel_count(std::size_t pixels, double fraction) {
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw ArgumentError("keep fraction must lie in (0, 1]");
  }
  // Guard against products like 0.15 * 100 = 15.000000000000002.
  const double exact = fraction * static_cast<double>(pixels);
  const double rounded = std::round(exact);
  const double k = std::abs(exact - rounded) < 1e-9 ? rounded : std::ceil(exact);
  return std::min(pixels, static_cast<std::size_t>(k));
}

std::vector<std::uint8_t> top_fraction_mask(const SaliencyMap& saliency, double fraction) {
  const auto s = saliency.values();
  const std::size_t k = kept_pixel_count(s.size(), fraction);

  std::vector<std::size_t> order(s.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return s[a] > s[b]; });

  std::vector<std::uint8_t> keep(s.size(), 0);
  for (std::size_t i = 0; i < k; ++i) keep[order[i]] = 1;
  return keep;
}

ImageTensor keep_top_fraction(const ImageTensor& image, const SaliencyMap& saliency,
                              double fraction) {
  check_sizes(image, saliency);
  const auto keep = top_fraction_mask(saliency, fraction);
  ImageTensor out = image;
  for (std::size_t p = 0; p < keep.size(); ++p) {
    if (!keep[p]) zero_pixel(out, p);
  }
  return out;
}

double mask_iou(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) {
  if (a.size() != b.size()) throw ArgumentError("IoU masks differ in size");
  std::size_t inter = 0;
  std::size_t uni = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    inter += (a[i] && b[i]) ? 1 : 0;
    uni += (a[i] || b[i]) ? 1 : 0;
  }
  return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

}  // namespace edda
