// Copyright (c) 2026 matbake contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "matbake/vecmath.h"

namespace matbake {

// Interleaved float image, 1 or 3 channels. Pixel (0,0) is the top-left
// corner, rows run top to bottom.
struct Image {
  int width = 0;
  int height = 0;
  int channels = 0;
  std::vector<float> data;

  Image() = default;
  Image(int w, int h, int c) : width(w), height(h), channels(c), data(size_t(w) * h * c, 0.0f) {}

  size_t pixel_count() const { return size_t(width) * height; }
  float* pixel(int x, int y) { return data.data() + (size_t(y) * width + x) * channels; }
  const float* pixel(int x, int y) const {
    return data.data() + (size_t(y) * width + x) * channels;
  }

  Vec3f rgb(int x, int y) const {
    const float* p = pixel(x, y);
    return channels >= 3 ? Vec3f{p[0], p[1], p[2]} : Vec3f{p[0], p[0], p[0]};
  }
  void set_rgb(int x, int y, const Vec3f& c) {
    float* p = pixel(x, y);
    if (channels >= 3) { p[0] = c.x; p[1] = c.y; p[2] = c.z; }
    else { p[0] = mean(c); }
  }
  float gray(int x, int y) const {
    const float* p = pixel(x, y);
    return channels >= 3 ? (p[0] + p[1] + p[2]) / 3.0f : p[0];
  }
};

// sRGB transfer function and its inverse/derivative. Inputs are expected in
// [0,1]; values outside are handled by the caller (tonemap clamps first).
float linear_to_srgb(float x);
float srgb_to_linear(float s);
float linear_to_srgb_derivative(float x);

// PNG I/O through libpng. Reads return values in [0,1]; writes round to the
// requested bit depth. Gray and RGB only; alpha is dropped on read.
Image read_png(const std::string& path);
void write_png8(const std::string& path, const Image& img);
void write_png16(const std::string& path, const Image& img);

// Radiance RGBE (.hdr) equirectangular probes, linear float RGB.
// Decoding is (mantissa/256) * 2^(exponent-128), zero when exponent == 0.
Image read_hdr(const std::string& path);
void write_hdr(const std::string& path, const Image& img);

// Raw float dump: little-endian header {uint32 w, h, channels} + float32 data.
Image read_f32(const std::string& path);
void write_f32(const std::string& path, const Image& img);

}  // namespace matbake
