// Copyright (c) 2026 matbake contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "matbake/bvh.h"
#include "matbake/camera.h"
#include "matbake/envlight.h"
#include "matbake/image.h"
#include "matbake/material.h"
#include "matbake/matfield.h"

namespace matbake {

enum class SamplingMode { kMis, kLightOnly, kBsdfOnly };

struct RenderConfig {
  int spp = 128;
  int spp_backward = 4;
  int bounces = 3;  // number of path vertices, >= 1
  uint64_t seed = 0;
  bool diffuse_only = false;
  SamplingMode sampling = SamplingMode::kMis;
  int workers = 0;  // 0 = hardware concurrency

  void validate() const;
};

// Linear HDR radiance plus per-pixel object coverage (fraction of primary
// samples that hit the mesh). Primary misses return probe radiance, so the
// probe doubles as the background.
struct RenderedImage {
  Image rgb;
  Image coverage;      // 1 channel
  int nan_samples = 0; // non-finite samples dropped by the trap
};

// Forward path tracer: next-event estimation against the probe plus a BSDF
// continuation ray, combined with the power heuristic. Paths terminate at the
// configured vertex count; no Russian roulette. Deterministic for a fixed
// seed, independent of worker count (per-pixel counter-based RNG streams).
RenderedImage render(const Scene& scene, const EnvironmentProbe& probe,
                     const MaterialSource& material, const Camera& camera,
                     const RenderConfig& config);

// Adjoint pass: retraces the first spp_backward sample streams of render()
// and accumulates d(loss)/d(field params) into grads, where `adjoint` holds
// d(loss)/d(linear rgb) per pixel. Sampling decisions are detached; gradients
// flow only through BSDF evaluation into the field. Geometry and lighting are
// fixed inputs and receive no gradients.
void render_backward(const Scene& scene, const EnvironmentProbe& probe,
                     const MaterialField& field, const Camera& camera,
                     const RenderConfig& config, const Image& adjoint, GradientBuffer& grads);

// Clamp to [0,1] followed by the sRGB transfer; the display transform used
// for losses and 8-bit output. The result is clamped too (the float transfer
// overshoots 1 by half an ulp at the top end).
inline Vec3f tonemap(const Vec3f& linear) {
  return {saturate(linear_to_srgb(saturate(linear.x))),
          saturate(linear_to_srgb(saturate(linear.y))),
          saturate(linear_to_srgb(saturate(linear.z)))};
}
// Derivative of tonemap per channel; zero outside the clamp range.
inline Vec3f tonemap_derivative(const Vec3f& linear) {
  auto d = [](float x) { return x > 0.0f && x < 1.0f ? linear_to_srgb_derivative(x) : 0.0f; };
  return {d(linear.x), d(linear.y), d(linear.z)};
}
Image tonemap_image(const Image& linear);

// Deterministic single-sample rasterization of the field's intrinsic
// channels at primary hits: base color in display (sRGB) space, roughness and
// metallic linear. hit_mask is 1 where the center ray hit the mesh.
struct IntrinsicImages {
  Image base_display;  // 3 channels
  Image roughness;     // 1
  Image metallic;      // 1
  Image hit_mask;      // 1
};
IntrinsicImages render_intrinsics(const Scene& scene, const MaterialField& field,
                                  const Camera& camera, int workers = 0);

// Adjoint of render_intrinsics; each adjoint image matches its forward
// counterpart (base adjoint is with respect to the displayed sRGB values).
void render_intrinsics_backward(const Scene& scene, const MaterialField& field,
                                const Camera& camera, const Image& d_base_display,
                                const Image& d_roughness, const Image& d_metallic,
                                GradientBuffer& grads, int workers = 0);

}  // namespace matbake
