// Copyright (c) 2026 matbake contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "matbake/vecmath.h"

namespace matbake {

// Material parameters at one shading point: base color, perceptual roughness
// and metallic, each in [0,1]. GGX alpha is roughness squared, clamped away
// from zero so the specular lobe stays finite.
struct PbrSample {
  Vec3f base_color{0.5f, 0.5f, 0.5f};
  float roughness = 0.5f;
  float metallic = 0.0f;

  static constexpr float kAlphaMin = 1e-3f;

  float alpha() const { return clampf(roughness * roughness, kAlphaMin, 1.0f); }
  PbrSample clamped() const {
    return {clamp(base_color, 0.0f, 1.0f), saturate(roughness), saturate(metallic)};
  }
};

struct LobeWeights {
  Vec3f k_d;  // diffuse albedo
  Vec3f k_s;  // specular F0
};

// k_d = c_base * (1 - m), k_s = 0.04 * (1 - m) + c_base * m.
LobeWeights derive_lobes(const PbrSample& s);

// GGX normal distribution, evaluated from cos(theta_h). Zero below the
// horizon; at cos_nh = 0 the formula value alpha^2/pi is returned.
float ggx_ndf(float cos_nh, float alpha);

// Height-correlated Smith masking-shadowing for GGX.
float smith_g(float cos_ni, float cos_no, float alpha);
float smith_g1(float cos_n, float alpha);
float smith_g_separable(float cos_ni, float cos_no, float alpha);

// Schlick: F = f0 + (1 - f0) (1 - cos_vh)^5.
Vec3f fresnel_schlick(const Vec3f& f0, float cos_vh);

enum class Lobe { kDiffuse, kSpecular };

struct BsdfSample {
  Vec3f wi;
  float pdf = 0;  // mixture density; 0 marks a failed sample
  Lobe lobe = Lobe::kDiffuse;
};

// Lambertian diffuse + Cook-Torrance GGX specular:
//   f = k_d/pi + D*G*F / (4 (wo.n)(wi.n)).
// Directions are world-space unit vectors on the shading-normal hemisphere;
// returns zero when wi or wo is below it. diffuse_only drops the specular
// term (and makes sampling material-independent, which the gradient
// finite-difference tests rely on).
Vec3f eval_bsdf(const PbrSample& s, const Vec3f& wi, const Vec3f& wo, const Vec3f& n,
                bool diffuse_only = false);

// f plus its derivatives with respect to the material parameters. df_dc is
// the per-channel diagonal d f[ch] / d base_color[ch].
struct BsdfEval {
  Vec3f f;
  Vec3f df_dc;
  Vec3f df_dr;
  Vec3f df_dm;
};
BsdfEval eval_bsdf_grad(const PbrSample& s, const Vec3f& wi, const Vec3f& wo, const Vec3f& n,
                        bool diffuse_only = false);

// Cosine-hemisphere for the diffuse lobe, visible-normal GGX for the
// specular lobe, mixed by mean albedo. A specular sample reflected below the
// hemisphere is returned with its pdf; the caller sees f = 0 there.
BsdfSample sample_bsdf(const PbrSample& s, const Vec3f& wo, const Vec3f& n, float u_lobe,
                       float u1, float u2, bool diffuse_only = false);

// Density of sample_bsdf at wi; matches the returned pdf for its own samples.
float pdf_bsdf(const PbrSample& s, const Vec3f& wi, const Vec3f& wo, const Vec3f& n,
               bool diffuse_only = false);

// Power heuristic, beta = 2.
inline float mis_weight(float pdf_a, float pdf_b) {
  double a = double(pdf_a) * pdf_a;
  double b = double(pdf_b) * pdf_b;
  return a + b > 0.0 ? float(a / (a + b)) : 0.0f;
}

}  // namespace matbake
