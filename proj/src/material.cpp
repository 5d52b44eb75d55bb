// Copyright (c) 2026 matbake contributors
// SPDX-License-Identifier: Apache-2.0

#include "matbake/material.h"

namespace matbake {

namespace {

float sample_bilinear(const Image& img, float u, float v, int channel) {
  // UV (0,0) maps to the bottom-left texel corner, matching the baker.
  float fx = clampf(u, 0.0f, 1.0f) * img.width - 0.5f;
  float fy = clampf(1.0f - v, 0.0f, 1.0f) * img.height - 0.5f;
  int x0 = int(std::floor(fx)), y0 = int(std::floor(fy));
  float tx = fx - x0, ty = fy - y0;
  auto cl = [](int i, int n) { return std::clamp(i, 0, n - 1); };
  float v00 = img.pixel(cl(x0, img.width), cl(y0, img.height))[channel];
  float v10 = img.pixel(cl(x0 + 1, img.width), cl(y0, img.height))[channel];
  float v01 = img.pixel(cl(x0, img.width), cl(y0 + 1, img.height))[channel];
  float v11 = img.pixel(cl(x0 + 1, img.width), cl(y0 + 1, img.height))[channel];
  return lerp(lerp(v00, v10, tx), lerp(v01, v11, tx), ty);
}

}  // namespace

PbrSample TextureMaterial::sample_at(const Vec3f&, const Vec2f& uv) const {
  PbrSample s;
  s.base_color = {sample_bilinear(maps_->base_color, uv.x, uv.y, 0),
                  sample_bilinear(maps_->base_color, uv.x, uv.y, 1),
                  sample_bilinear(maps_->base_color, uv.x, uv.y, 2)};
  s.roughness = sample_bilinear(maps_->roughness, uv.x, uv.y, 0);
  s.metallic = sample_bilinear(maps_->metallic, uv.x, uv.y, 0);
  return s.clamped();
}

PbrSample CheckerMaterial::sample_at(const Vec3f&, const Vec2f& uv) const {
  PbrSample s;
  int cx = int(std::floor(clampf(uv.x, 0.0f, 1.0f) * checks));
  int cy = int(std::floor(clampf(uv.y, 0.0f, 1.0f) * checks));
  s.base_color = ((cx + cy) & 1) ? color_b : color_a;
  s.roughness = uv.x < 0.5f ? rough_lo : rough_hi;
  s.metallic = (uv.y >= metal_v_min && uv.y < metal_v_max) ? 1.0f : 0.0f;
  return s.clamped();
}

}  // namespace matbake
