// Copyright (c) 2026 matbake contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "matbake/matfield.h"
#include "matbake/vecmath.h"

namespace matbake {

// Where the tracer gets its material parameters from: the neural field during
// optimization, baked textures for validation/relighting, or fixed values for
// furnace-style tests and guide renders.
class MaterialSource {
 public:
  virtual ~MaterialSource() = default;
  virtual PbrSample sample_at(const Vec3f& position, const Vec2f& uv) const = 0;
};

class ConstantMaterial final : public MaterialSource {
 public:
  explicit ConstantMaterial(const PbrSample& value) : value_(value.clamped()) {}
  PbrSample sample_at(const Vec3f&, const Vec2f&) const override { return value_; }

 private:
  PbrSample value_;
};

class FieldMaterial final : public MaterialSource {
 public:
  explicit FieldMaterial(const MaterialField& field) : field_(&field) {}
  PbrSample sample_at(const Vec3f& position, const Vec2f&) const override {
    return field_->query(position);
  }

 private:
  const MaterialField* field_;
};

// Bilinear lookup into baked maps by UV.
class TextureMaterial final : public MaterialSource {
 public:
  explicit TextureMaterial(const BakedTextures& maps) : maps_(&maps) {}
  PbrSample sample_at(const Vec3f&, const Vec2f& uv) const override;

 private:
  const BakedTextures* maps_;
};

// Procedural UV-space test pattern: checkerboard base color, a roughness
// split at u = 0.5 and a metallic stripe band in v. Doubles as the bundled
// example's ground truth.
class CheckerMaterial final : public MaterialSource {
 public:
  CheckerMaterial() = default;
  PbrSample sample_at(const Vec3f&, const Vec2f& uv) const override;

  Vec3f color_a{0.80f, 0.30f, 0.15f};
  Vec3f color_b{0.15f, 0.45f, 0.80f};
  int checks = 4;
  float rough_lo = 0.25f, rough_hi = 0.75f;
  float metal_v_min = 0.40f, metal_v_max = 0.60f;
};

}  // namespace matbake
