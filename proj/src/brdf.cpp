// Copyright (c) 2026 matbake contributors
// SPDX-License-Identifier: Apache-2.0

#include "matbake/brdf.h"

namespace matbake {

LobeWeights derive_lobes(const PbrSample& s) {
  float one_minus_m = 1.0f - s.metallic;
  return {s.base_color * one_minus_m,
          Vec3f{0.04f, 0.04f, 0.04f} * one_minus_m + s.base_color * s.metallic};
}

float ggx_ndf(float cos_nh, float alpha) {
  if (cos_nh < 0.0f) return 0.0f;
  float a2 = alpha * alpha;
  float t = cos_nh * cos_nh * (a2 - 1.0f) + 1.0f;
  return a2 / (kPi * t * t);
}

namespace {

// Smith Lambda for GGX; mu = cos(theta) > 0.
inline float smith_lambda(float mu, float alpha) {
  float a2 = alpha * alpha;
  return 0.5f * (std::sqrt(a2 + (1.0f - a2) * mu * mu) / mu - 1.0f);
}

inline float dlambda_dalpha(float mu, float alpha) {
  float a2 = alpha * alpha;
  float root = std::sqrt(a2 + (1.0f - a2) * mu * mu);
  return 0.5f * alpha * (1.0f - mu * mu) / (mu * root);
}

}  // namespace

float smith_g1(float cos_n, float alpha) { return 1.0f / (1.0f + smith_lambda(cos_n, alpha)); }

float smith_g(float cos_ni, float cos_no, float alpha) {
  return 1.0f / (1.0f + smith_lambda(cos_ni, alpha) + smith_lambda(cos_no, alpha));
}

float smith_g_separable(float cos_ni, float cos_no, float alpha) {
  return smith_g1(cos_ni, alpha) * smith_g1(cos_no, alpha);
}

Vec3f fresnel_schlick(const Vec3f& f0, float cos_vh) {
  float q = 1.0f - saturate(cos_vh);
  float q2 = q * q;
  float q5 = q2 * q2 * q;
  return f0 + (Vec3f{1, 1, 1} - f0) * q5;
}

Vec3f eval_bsdf(const PbrSample& s, const Vec3f& wi, const Vec3f& wo, const Vec3f& n,
                bool diffuse_only) {
  return eval_bsdf_grad(s, wi, wo, n, diffuse_only).f;
}

BsdfEval eval_bsdf_grad(const PbrSample& s, const Vec3f& wi, const Vec3f& wo, const Vec3f& n,
                        bool diffuse_only) {
  BsdfEval out{};
  float cos_ni = dot(n, wi);
  float cos_no = dot(n, wo);
  if (cos_ni <= 0.0f || cos_no <= 0.0f) return out;

  LobeWeights lobes = derive_lobes(s);
  float one_minus_m = 1.0f - s.metallic;
  out.f = lobes.k_d * kInvPi;
  out.df_dc = Vec3f{one_minus_m, one_minus_m, one_minus_m} * kInvPi;
  out.df_dm = -s.base_color * kInvPi;
  if (diffuse_only) return out;

  Vec3f h = wi + wo;
  float hlen = length(h);
  if (hlen < 1e-12f) return out;
  h = h / hlen;
  float cos_nh = dot(n, h);
  float cos_vh = dot(h, wi);  // == dot(h, wo) up to rounding
  if (cos_nh <= 0.0f || cos_vh <= 0.0f) return out;

  float alpha = s.alpha();
  float d = ggx_ndf(cos_nh, alpha);
  float g = smith_g(cos_ni, cos_no, alpha);
  Vec3f fr = fresnel_schlick(lobes.k_s, cos_vh);
  float k = 1.0f / (4.0f * cos_no * cos_ni);
  Vec3f spec = fr * (d * g * k);
  out.f += spec;

  // Fresnel derivative wrt F0 is (1 - q^5); chain through k_s.
  float q = 1.0f - saturate(cos_vh);
  float q2 = q * q;
  float one_minus_q5 = 1.0f - q2 * q2 * q;
  float dgk = d * g * k * one_minus_q5;
  out.df_dc += Vec3f{dgk, dgk, dgk} * s.metallic;
  out.df_dm += (s.base_color - Vec3f{0.04f, 0.04f, 0.04f}) * dgk;

  // Roughness gradient through alpha = r^2 (zero inside the alpha clamp).
  float r2 = s.roughness * s.roughness;
  if (r2 > PbrSample::kAlphaMin && r2 < 1.0f) {
    float a2 = alpha * alpha;
    float t = cos_nh * cos_nh * (a2 - 1.0f) + 1.0f;
    float dd_da = (2.0f * alpha * t - 4.0f * alpha * a2 * cos_nh * cos_nh) / (kPi * t * t * t);
    float dg_da = -g * g * (dlambda_dalpha(cos_ni, alpha) + dlambda_dalpha(cos_no, alpha));
    float da_dr = 2.0f * s.roughness;
    out.df_dr = fr * ((dd_da * g + d * dg_da) * k * da_dr);
  }
  return out;
}

namespace {

inline Vec3f cosine_sample_local(float u1, float u2) {
  float phi = kTwoPi * u1;
  float sr = std::sqrt(u2);
  return {sr * std::cos(phi), sr * std::sin(phi), std::sqrt(std::max(0.0f, 1.0f - u2))};
}

// Dupuy & Benyoub spherical-cap formulation of visible-normal GGX sampling;
// wo_l is the local outgoing direction with z up, wo_l.z > 0.
inline Vec3f sample_vndf_local(const Vec3f& wo_l, float alpha, float u1, float u2) {
  Vec3f vh = normalize(Vec3f{alpha * wo_l.x, alpha * wo_l.y, wo_l.z});
  float phi = kTwoPi * u1;
  float z = (1.0f - u2) * (1.0f + vh.z) - vh.z;
  float sin_theta = std::sqrt(clampf(1.0f - z * z, 0.0f, 1.0f));
  Vec3f cap{sin_theta * std::cos(phi), sin_theta * std::sin(phi), z};
  Vec3f h_std = cap + vh;
  return normalize(Vec3f{alpha * h_std.x, alpha * h_std.y, h_std.z});
}

// pdf of the reflected direction under VNDF half-vector sampling:
// G1(wo) * D(h) / (4 cos_no), valid when dot(wo, h) > 0.
inline float vndf_reflect_pdf(const Vec3f& wi_l, const Vec3f& wo_l, float alpha) {
  Vec3f h = wi_l + wo_l;
  float hlen = length(h);
  if (hlen < 1e-12f) return 0.0f;
  h = h / hlen;
  if (h.z <= 0.0f || dot(h, wo_l) <= 0.0f) return 0.0f;
  return smith_g1(wo_l.z, alpha) * ggx_ndf(h.z, alpha) / (4.0f * wo_l.z);
}

// Probability of picking the diffuse lobe, proportional to mean albedo.
inline float diffuse_select_probability(const PbrSample& s, bool diffuse_only) {
  if (diffuse_only) return 1.0f;
  LobeWeights lobes = derive_lobes(s);
  float wd = mean(lobes.k_d);
  float ws = mean(lobes.k_s);
  float sum = wd + ws;
  return sum > 1e-9f ? wd / sum : 0.5f;
}

}  // namespace

BsdfSample sample_bsdf(const PbrSample& s, const Vec3f& wo, const Vec3f& n, float u_lobe,
                       float u1, float u2, bool diffuse_only) {
  BsdfSample out;
  float cos_no = dot(n, wo);
  if (cos_no <= 0.0f) return out;

  Onb frame(n);
  Vec3f wo_l = frame.to_local(wo);
  float q_d = diffuse_select_probability(s, diffuse_only);
  float alpha = s.alpha();

  Vec3f wi_l;
  if (u_lobe < q_d) {
    out.lobe = Lobe::kDiffuse;
    wi_l = cosine_sample_local(u1, u2);
  } else {
    out.lobe = Lobe::kSpecular;
    Vec3f h = sample_vndf_local(wo_l, alpha, u1, u2);
    wi_l = reflect(wo_l, h);
  }

  out.wi = frame.to_world(wi_l);
  // Evaluate through pdf_bsdf so the returned density matches a later lookup
  // bit for bit (identical world-to-local rounding).
  out.pdf = pdf_bsdf(s, out.wi, wo, n, diffuse_only);
  return out;
}

float pdf_bsdf(const PbrSample& s, const Vec3f& wi, const Vec3f& wo, const Vec3f& n,
               bool diffuse_only) {
  float cos_no = dot(n, wo);
  if (cos_no <= 0.0f) return 0.0f;
  Onb frame(n);
  Vec3f wo_l = frame.to_local(wo);
  Vec3f wi_l = frame.to_local(wi);
  float q_d = diffuse_select_probability(s, diffuse_only);
  float pdf = q_d * std::max(wi_l.z, 0.0f) * kInvPi;
  if (q_d < 1.0f) pdf += (1.0f - q_d) * vndf_reflect_pdf(wi_l, wo_l, s.alpha());
  return pdf;
}

}  // namespace matbake
