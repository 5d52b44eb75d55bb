// Copyright (c) 2026 matbake contributors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include "matbake/brdf.h"
#include "matbake/rng.h"
#include "testutil.h"

using namespace matbake;
using namespace matbake::testutil;

namespace {

Vec3f random_hemisphere_dir(Rng& rng, const Vec3f& n) {
  while (true) {
    Vec3f v{rng.next_float() * 2 - 1, rng.next_float() * 2 - 1, rng.next_float() * 2 - 1};
    float l = length(v);
    if (l < 1e-3f || l > 1.0f) continue;
    v = v / l;
    if (dot(v, n) > 1e-3f) return v;
  }
}

PbrSample random_material(Rng& rng) {
  PbrSample s;
  s.base_color = {rng.next_float(), rng.next_float(), rng.next_float()};
  s.roughness = 0.1f + 0.85f * rng.next_float();
  s.metallic = rng.next_float();
  return s;
}

}  // namespace

TEST(Lobes, SpecFormulaCases) {
  {
    LobeWeights l = derive_lobes({{0.5f, 0.5f, 0.5f}, 1.0f, 0.0f});
    EXPECT_NEAR(l.k_d.x, 0.5f, 1e-7f);
    EXPECT_NEAR(l.k_s.x, 0.04f, 1e-7f);
  }
  {
    LobeWeights l = derive_lobes({{0.3f, 0.6f, 0.9f}, 0.5f, 1.0f});
    EXPECT_EQ(l.k_d.x, 0.0f);
    EXPECT_NEAR(l.k_s.y, 0.6f, 1e-7f);
  }
  {
    LobeWeights l = derive_lobes({{1.0f, 0.0f, 0.0f}, 0.5f, 0.5f});
    EXPECT_NEAR(l.k_d.x, 0.5f, 1e-7f);
    EXPECT_NEAR(l.k_d.y, 0.0f, 1e-7f);
    EXPECT_NEAR(l.k_s.x, 0.52f, 1e-7f);
    EXPECT_NEAR(l.k_s.y, 0.02f, 1e-7f);
    EXPECT_NEAR(l.k_s.z, 0.02f, 1e-7f);
  }
}

TEST(Ggx, PointValues) {
  EXPECT_NEAR(ggx_ndf(1.0f, 1.0f), 1.0f / kPi, 1e-5f);
  // At the horizon the formula reduces to alpha^2/pi.
  EXPECT_NEAR(ggx_ndf(0.0f, 0.5f), 0.25f / kPi, 1e-5f);
  EXPECT_NEAR(ggx_ndf(0.0f, 0.5f), 0.0796f, 1e-4f);
  EXPECT_EQ(ggx_ndf(-0.1f, 0.5f), 0.0f);
}

TEST(Ggx, NdfNormalization) {
  // integral over the hemisphere of D(h) (n.h) dw == 1; 1e6-node quadrature.
  for (float alpha : {0.1f, 0.5f, 1.0f}) {
    const int n = 1000000;
    double dt = 0.5 * kPi / n;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
      double theta = (i + 0.5) * dt;
      double c = std::cos(theta);
      sum += double(ggx_ndf(float(c), alpha)) * c * std::sin(theta);
    }
    sum *= dt * 2.0 * kPi;
    EXPECT_NEAR(sum, 1.0, 1e-3) << "alpha " << alpha;
  }
}

TEST(Fresnel, SchlickEndpoints) {
  Vec3f f0{0.2f, 0.5f, 0.9f};
  Vec3f at1 = fresnel_schlick(f0, 1.0f);
  EXPECT_EQ(at1.x, f0.x);
  Vec3f at0 = fresnel_schlick(f0, 0.0f);
  EXPECT_NEAR(at0.x, 1.0f, 1e-6f);
  EXPECT_NEAR(at0.y, 1.0f, 1e-6f);
  EXPECT_NEAR(at0.z, 1.0f, 1e-6f);
}

TEST(Smith, MonotoneInAlphaAndNearSeparable) {
  float prev = 2.0f;
  for (float alpha : {0.1f, 0.3f, 0.5f, 0.8f, 1.0f}) {
    float g = smith_g(0.7f, 0.6f, alpha);
    EXPECT_LT(g, prev);
    prev = g;
  }
  // Height-correlated vs separable within 15% at alpha = 0.2.
  Rng rng(1, 2);
  for (int i = 0; i < 50; ++i) {
    float ci = 0.05f + 0.95f * rng.next_float();
    float co = 0.05f + 0.95f * rng.next_float();
    float g_corr = smith_g(ci, co, 0.2f);
    float g_sep = smith_g_separable(ci, co, 0.2f);
    EXPECT_NEAR(g_corr, g_sep, 0.15f * g_corr);
  }
}

TEST(Bsdf, LambertianDiffuseOnly) {
  PbrSample s{{1, 1, 1}, 1.0f, 0.0f};
  Vec3f n{0, 0, 1};
  Rng rng(5, 6);
  for (int i = 0; i < 20; ++i) {
    Vec3f wi = random_hemisphere_dir(rng, n);
    Vec3f wo = random_hemisphere_dir(rng, n);
    Vec3f f = eval_bsdf(s, wi, wo, n, /*diffuse_only=*/true);
    EXPECT_NEAR(f.x, kInvPi, 1e-6f);
    EXPECT_NEAR(f.y, kInvPi, 1e-6f);
    EXPECT_NEAR(f.z, kInvPi, 1e-6f);
  }
}

TEST(Bsdf, ZeroBelowHemisphere) {
  PbrSample s{{0.8f, 0.7f, 0.6f}, 0.4f, 0.3f};
  Vec3f n{0, 0, 1};
  Vec3f f = eval_bsdf(s, Vec3f{0, 0.3f, -0.95f}, Vec3f{0, 0, 1}, n);
  EXPECT_EQ(f.x, 0.0f);
  EXPECT_EQ(f.y, 0.0f);
  EXPECT_EQ(f.z, 0.0f);
}

TEST(Bsdf, Reciprocity100Random) {
  Rng rng(13, 17);
  Vec3f n{0, 0, 1};
  for (int i = 0; i < 100; ++i) {
    PbrSample s = random_material(rng);
    Vec3f wi = random_hemisphere_dir(rng, n);
    Vec3f wo = random_hemisphere_dir(rng, n);
    Vec3f a = eval_bsdf(s, wi, wo, n);
    Vec3f b = eval_bsdf(s, wo, wi, n);
    for (int c = 0; c < 3; ++c) EXPECT_NEAR(a[c], b[c], 1e-6f * std::max(1.0f, a[c]));
  }
}

TEST(Bsdf, FiniteAtGrazing) {
  PbrSample s{{1, 1, 1}, 0.3f, 1.0f};
  Vec3f n{0, 0, 1};
  for (float mu : {1e-6f, 1e-4f, 1e-2f}) {
    float st = std::sqrt(1.0f - mu * mu);
    Vec3f wi{st, 0, mu};
    Vec3f wo{-st * 0.5f, st * 0.8660254f, mu};
    Vec3f f = eval_bsdf(s, wi, normalize(wo), n);
    EXPECT_TRUE(all_finite(f)) << mu;
    EXPECT_GE(f.x, 0.0f);
  }
}

TEST(Bsdf, WhiteFurnaceEnergyBounded) {
  // Hemispherical reflectance by quadrature for a grid of (r, m). Metals
  // (pure microfacet lobe) stay under 1 + 2%. The dielectric/diffuse cases
  // stack the full F0 = 0.04 specular lobe on top of an already-unit
  // Lambertian term (k_d is deliberately not scaled by 1 - F), so their true
  // envelope measured by this oracle is ~1.07 at mu_o = 0.5; bound them at
  // 1.08 and keep this as a gross-energy sanity check.
  for (float r : {0.25f, 0.5f, 1.0f}) {
    for (float m : {0.0f, 0.5f, 1.0f}) {
      for (float mu_o : {1.0f, 0.8f, 0.5f}) {
        PbrSample s{{1, 1, 1}, r, m};
        float so = std::sqrt(1.0f - mu_o * mu_o);
        Vec3f wo{so, 0, mu_o};
        Vec3f n{0, 0, 1};
        double albedo = integrate_sphere(
            [&](const Vec3f& wi) { return double(eval_bsdf(s, wi, wo, n).x) * wi.z; }, 256,
            512, /*hemi=*/true);
        double bound = m == 1.0f ? 1.02 : 1.08;
        EXPECT_LE(albedo, bound) << "r=" << r << " m=" << m << " mu=" << mu_o;
        EXPECT_GE(albedo, 0.0);
      }
    }
  }
}

TEST(Bsdf, SamplePdfRoundTrip) {
  Rng rng(19, 23);
  Vec3f n{0, 0, 1};
  int valid = 0;
  for (int i = 0; i < 10000; ++i) {
    PbrSample s = random_material(rng);
    Vec3f wo = random_hemisphere_dir(rng, n);
    BsdfSample bs = sample_bsdf(s, wo, n, rng.next_float(), rng.next_float(), rng.next_float());
    if (bs.pdf <= 0.0f) continue;
    float pdf = pdf_bsdf(s, bs.wi, wo, n);
    ASSERT_NEAR(pdf, bs.pdf, 1e-5f * bs.pdf);
    ++valid;
  }
  EXPECT_GT(valid, 9000);
}

TEST(Bsdf, ForcedDiffusePdfIsCosine) {
  PbrSample s{{0.9f, 0.9f, 0.9f}, 0.8f, 0.0f};
  Vec3f n{0, 0, 1};
  Rng rng(29, 31);
  Vec3f wo = random_hemisphere_dir(rng, n);
  for (int i = 0; i < 2000; ++i) {
    BsdfSample bs = sample_bsdf(s, wo, n, rng.next_float(), rng.next_float(),
                                rng.next_float(), /*diffuse_only=*/true);
    ASSERT_GT(bs.pdf, 0.0f);
    EXPECT_EQ(bs.lobe, Lobe::kDiffuse);
    EXPECT_NEAR(bs.pdf, std::max(0.0f, dot(bs.wi, n)) * kInvPi, 1e-6f);
  }
}

TEST(Bsdf, PdfIntegratesToOne) {
  // The mixture pdf is a density over its full support (specular reflections
  // can land below the shading hemisphere, where eval is zero but the
  // density is not); quadrature over the whole sphere must give 1 within 1%.
  Vec3f n{0, 0, 1};
  struct Case {
    PbrSample s;
    float mu_o;
  };
  Case cases[] = {
      {{{0.8f, 0.4f, 0.2f}, 0.6f, 0.0f}, 0.9f},
      {{{0.9f, 0.9f, 0.9f}, 0.3f, 1.0f}, 0.7f},
      {{{0.5f, 0.5f, 0.5f}, 0.9f, 0.5f}, 0.4f},
  };
  for (const Case& c : cases) {
    float so = std::sqrt(1.0f - c.mu_o * c.mu_o);
    Vec3f wo{so, 0, c.mu_o};
    double integral = integrate_sphere(
        [&](const Vec3f& wi) { return double(pdf_bsdf(c.s, wi, wo, n)); }, 512, 1024, false);
    EXPECT_NEAR(integral, 1.0, 0.01) << "mu_o " << c.mu_o;
  }
}

TEST(Bsdf, GgxChiSquare) {
  // 1e5 specular samples at normal incidence vs the D(h)(n.h)-derived
  // analytic reflected density (they coincide exactly when wo == n).
  const float alpha_target = 0.3f;
  PbrSample s{{1, 1, 1}, std::sqrt(alpha_target), 1.0f};  // metal: always specular
  ASSERT_NEAR(s.alpha(), alpha_target, 1e-6f);
  Vec3f n{0, 0, 1};
  Vec3f wo = n;

  const int theta_bins = 20, phi_bins = 16;
  const int n_samples = 100000;
  std::vector<double> observed(theta_bins * phi_bins, 0.0);
  Rng rng(37, 41);
  for (int i = 0; i < n_samples; ++i) {
    BsdfSample bs = sample_bsdf(s, wo, n, rng.next_float(), rng.next_float(), rng.next_float());
    ASSERT_GT(bs.pdf, 0.0f);
    float az, pol;
    dir_to_spherical(Vec3f{bs.wi.x, bs.wi.z, bs.wi.y}, &az, &pol);  // z-up to y-up swap
    int tb = std::min(int(pol / kPi * theta_bins), theta_bins - 1);
    int pb = std::min(int(az / kTwoPi * phi_bins), phi_bins - 1);
    observed[tb * phi_bins + pb] += 1.0;
  }

  // Expected frequency per bin: integrate D(theta/2)/4 over the bin.
  std::vector<double> expected(theta_bins * phi_bins, 0.0);
  const int sub = 64;
  for (int tb = 0; tb < theta_bins; ++tb) {
    double t0 = kPi * tb / theta_bins, t1 = kPi * (tb + 1) / theta_bins;
    double dt = (t1 - t0) / sub;
    double mass = 0.0;
    for (int i = 0; i < sub; ++i) {
      double theta = t0 + (i + 0.5) * dt;
      double density = ggx_ndf(float(std::cos(0.5 * theta)), alpha_target) / 4.0;
      mass += density * std::sin(theta) * dt;
    }
    mass *= (2.0 * kPi / phi_bins) * n_samples;
    for (int pb = 0; pb < phi_bins; ++pb) expected[tb * phi_bins + pb] = mass;
  }

  // Merge low-frequency cells (< 5 expected) into one pooled cell.
  double stat = 0.0;
  int cells = 0;
  double pool_obs = 0.0, pool_exp = 0.0;
  for (size_t i = 0; i < expected.size(); ++i) {
    if (expected[i] < 5.0) {
      pool_obs += observed[i];
      pool_exp += expected[i];
    } else {
      double d = observed[i] - expected[i];
      stat += d * d / expected[i];
      ++cells;
    }
  }
  if (pool_exp > 5.0) {
    double d = pool_obs - pool_exp;
    stat += d * d / pool_exp;
    ++cells;
  }
  double p = chi2_p_value(stat, cells - 1);
  EXPECT_GT(p, 0.01) << "chi2 stat " << stat << " over " << cells << " cells";
}

TEST(Mis, PowerHeuristic) {
  EXPECT_NEAR(mis_weight(2.0f, 2.0f), 0.5f, 1e-7f);
  EXPECT_NEAR(mis_weight(1.0f, 0.0f), 1.0f, 1e-7f);
  EXPECT_NEAR(mis_weight(1.0f, 3.0f), 0.1f, 1e-7f);
  Rng rng(43, 47);
  for (int i = 0; i < 100; ++i) {
    float a = rng.next_float() * 10.0f + 1e-4f;
    float b = rng.next_float() * 10.0f;
    EXPECT_NEAR(mis_weight(a, b) + mis_weight(b, a), 1.0f, 1e-6f);
    EXPECT_GE(mis_weight(a, b), 0.0f);
    EXPECT_LE(mis_weight(a, b), 1.0f);
  }
}

TEST(BsdfGrad, MatchesFiniteDifferences) {
  // The analytic material derivatives drive the adjoint pass; check them
  // against central differences on the closed-form BSDF.
  Rng rng(53, 59);
  Vec3f n{0, 0, 1};
  for (int i = 0; i < 40; ++i) {
    PbrSample s = random_material(rng);
    s.roughness = 0.15f + 0.75f * rng.next_float();  // keep clear of the alpha clamp
    Vec3f wi = random_hemisphere_dir(rng, n);
    Vec3f wo = random_hemisphere_dir(rng, n);
    BsdfEval eval = eval_bsdf_grad(s, wi, wo, n);

    const float eps = 1e-3f;
    for (int ch = 0; ch < 3; ++ch) {
      PbrSample sp = s, sm = s;
      sp.base_color[ch] += eps;
      sm.base_color[ch] -= eps;
      float fd = (eval_bsdf(sp, wi, wo, n)[ch] - eval_bsdf(sm, wi, wo, n)[ch]) / (2 * eps);
      EXPECT_NEAR(eval.df_dc[ch], fd, 1e-2f * std::max(0.05f, std::abs(fd)));
    }
    {
      PbrSample sp = s, sm = s;
      sp.roughness += eps;
      sm.roughness -= eps;
      Vec3f fp = eval_bsdf(sp, wi, wo, n), fm = eval_bsdf(sm, wi, wo, n);
      for (int ch = 0; ch < 3; ++ch) {
        float fd = (fp[ch] - fm[ch]) / (2 * eps);
        EXPECT_NEAR(eval.df_dr[ch], fd, 2e-2f * std::max(0.05f, std::abs(fd)));
      }
    }
    {
      PbrSample sp = s, sm = s;
      sp.metallic = std::min(1.0f, s.metallic + eps);
      sm.metallic = std::max(0.0f, s.metallic - eps);
      float scale = sp.metallic - sm.metallic;
      Vec3f fp = eval_bsdf(sp, wi, wo, n), fm = eval_bsdf(sm, wi, wo, n);
      for (int ch = 0; ch < 3; ++ch) {
        float fd = (fp[ch] - fm[ch]) / scale;
        EXPECT_NEAR(eval.df_dm[ch], fd, 2e-2f * std::max(0.05f, std::abs(fd)));
      }
    }
  }
}
