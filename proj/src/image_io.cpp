#include "edda/image_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <vector>

#include "edda/errors.hpp"

namespace edda {
namespace {

// Skips whitespace and '#' comments in a Netpbm header.
void skip_separators(std::istream& in) {
  while (true) {
    const int c = in.peek();
    if (c == '#') {
      std::string comment;
      std::getline(in, comment);
    } else if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      in.get();
    } else {
      return;
    }
  }
}

int read_header_int(std::istream& in, const std::string& path) {
  skip_separators(in);
  int v = 0;
  if (!(in >> v) || v <= 0) throw FormatError(path + ": bad Netpbm header");
  return v;
}

}  // namespace

ImageTensor read_pnm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open image " + path);
  char magic[2] = {0, 0};
  in.read(magic, 2);
  if (magic[0] != 'P' || (magic[1] != '6' && magic[1] != '5')) {
    throw FormatError(path + ": not a binary PPM/PGM file");
  }
  const int channels = magic[1] == '6' ? 3 : 1;
  const int width = read_header_int(in, path);
  const int height = read_header_int(in, path);
  const int maxval = read_header_int(in, path);
  if (maxval != 255) throw FormatError(path + ": only 8-bit images are supported");
  in.get();  // single whitespace before the raster
  const std::size_t plane = static_cast<std::size_t>(width) * height;
  std::vector<unsigned char> raster(plane * channels);
  in.read(reinterpret_cast<char*>(raster.data()), static_cast<std::streamsize>(raster.size()));
  if (in.gcount() != static_cast<std::streamsize>(raster.size())) {
    throw FormatError(path + ": truncated raster");
  }
  ImageTensor image(width, height, channels);
  auto data = image.data();
  for (std::size_t p = 0; p < plane; ++p) {
    for (int c = 0; c < channels; ++c) data[c * plane + p] = raster[p * channels + c] / 255.0;
  }
  return image;
}

void write_pnm(const std::string& path, const ImageTensor& image) {
  if (image.channels() != 3 && image.channels() != 1) {
    throw ArgumentError("only 1- or 3-channel images can be written");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write image " + path);
  out << (image.channels() == 3 ? "P6" : "P5") << "\n"
      << image.width() << " " << image.height() << "\n255\n";
  const std::size_t plane = image.shape().plane();
  const auto data = image.data();
  std::vector<unsigned char> raster(plane * image.channels());
  for (std::size_t p = 0; p < plane; ++p) {
    for (int c = 0; c < image.channels(); ++c) {
      raster[p * image.channels() + c] = static_cast<unsigned char>(
          std::lround(std::clamp(data[c * plane + p], 0.0, 1.0) * 255.0));
    }
  }
  out.write(reinterpret_cast<const char*>(raster.data()),
            static_cast<std::streamsize>(raster.size()));
  if (!out) throw FormatError("failed writing image " + path);
}

Rgb diverging_colour(double value) {
  const double v = std::clamp(value, 0.0, 1.0);
  if (v < 0.5) {
    const double t = v / 0.5;
    return {t, t, 1.0};
  }
  const double t = (v - 0.5) / 0.5;
  return {1.0, 1.0 - t, 1.0 - t};
}

ImageTensor render_overlay(const ImageTensor& image, const SaliencyMap& saliency, double alpha) {
  if (image.width() != saliency.width() || image.height() != saliency.height()) {
    throw ArgumentError("overlay saliency map does not match the image size");
  }
  const std::size_t plane = image.shape().plane();
  ImageTensor out(image.width(), image.height(), 3);
  auto dst = out.data();
  const auto src = image.data();
  const auto s = saliency.values();
  for (std::size_t p = 0; p < plane; ++p) {
    double base[3];
    if (image.channels() == 3) {
      for (int c = 0; c < 3; ++c) base[c] = src[c * plane + p];
    } else {
      double grey = 0.0;
      for (int c = 0; c < image.channels(); ++c) grey += src[c * plane + p];
      grey /= image.channels();
      base[0] = base[1] = base[2] = grey;
    }
    const Rgb colour = diverging_colour(s[p]);
    const double tint[3] = {colour.r, colour.g, colour.b};
    for (int c = 0; c < 3; ++c) dst[c * plane + p] = (1.0 - alpha) * base[c] + alpha * tint[c];
  }
  return out;
}

}  // namespace edda
