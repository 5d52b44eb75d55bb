// Copyright (c) 2026 matbake contributors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include "matbake/error.h"
#include "matbake/tracer.h"
#include "testutil.h"

using namespace matbake;
using namespace matbake::testutil;

namespace {

Camera sphere_camera(int res = 32, float dist = 3.0f) {
  return make_look_at(Vec3f{0, 0, dist}, Vec3f{0, 0, 0}, Vec3f{0, 1, 0}, 0.8f, res, res);
}

// Mean radiance over pixels whose every primary sample hit the object.
Vec3f covered_mean(const RenderedImage& img, int* count_out = nullptr) {
  Vec3f acc{0, 0, 0};
  int count = 0;
  for (int y = 0; y < img.rgb.height; ++y)
    for (int x = 0; x < img.rgb.width; ++x)
      if (img.coverage.pixel(x, y)[0] == 1.0f) {
        acc += img.rgb.rgb(x, y);
        ++count;
      }
  if (count_out) *count_out = count;
  return count > 0 ? acc / float(count) : acc;
}

}  // namespace

TEST(Tonemap, SrgbPipeline) {
  EXPECT_EQ(tonemap(Vec3f{0, 0, 0}).x, 0.0f);
  EXPECT_NEAR(tonemap(Vec3f{1, 1, 1}).x, 1.0f, 1e-6f);
  EXPECT_NEAR(tonemap(Vec3f{0.18f, 0.18f, 0.18f}).x, 0.4613f, 5e-4f);
  EXPECT_EQ(tonemap(Vec3f{2.0f, 2.0f, 2.0f}).x, 1.0f);  // clamped
  // Subgradient zero at the clamp boundary and beyond.
  EXPECT_EQ(tonemap_derivative(Vec3f{2.0f, 2.0f, 2.0f}).x, 0.0f);
  EXPECT_GT(tonemap_derivative(Vec3f{0.5f, 0.5f, 0.5f}).x, 0.0f);
}

TEST(Render, FurnaceIdentityDiffuseSphere) {
  // Convex diffuse sphere, constant unit probe, d=1: every covered pixel
  // equals the albedo (integral of (a/pi) cos over the hemisphere is a).
  Scene scene(make_sphere(1.0f, 128, 64));
  EnvironmentProbe probe = make_constant_probe(1.0f, 8, 4);
  RenderConfig rc;
  rc.spp = 1024;
  rc.bounces = 1;
  rc.diffuse_only = true;
  rc.seed = 11;

  for (float albedo : {0.2f, 0.7f}) {
    ConstantMaterial mat(PbrSample{{albedo, albedo, albedo}, 1.0f, 0.0f});
    RenderedImage img = render(scene, probe, mat, sphere_camera(24), rc);
    EXPECT_EQ(img.nan_samples, 0);
    int checked = 0;
    for (int y = 0; y < 24; ++y)
      for (int x = 0; x < 24; ++x) {
        if (img.coverage.pixel(x, y)[0] != 1.0f) continue;
        Vec3f c = img.rgb.rgb(x, y);
        EXPECT_NEAR(c.x, albedo, 0.01f * albedo) << x << "," << y;
        EXPECT_NEAR(c.y, albedo, 0.01f * albedo);
        EXPECT_NEAR(c.z, albedo, 0.01f * albedo);
        ++checked;
      }
    EXPECT_GT(checked, 100);
  }
}

TEST(Render, ExtraBouncesAddNothingOnConvex) {
  // d=1 vs d=3 renders of the furnace sphere agree in expectation; a convex
  // diffuse object cannot see itself.
  Scene scene(make_sphere(1.0f, 128, 64));
  EnvironmentProbe probe = make_constant_probe(1.0f, 8, 4);
  RenderConfig rc;
  rc.spp = 512;
  rc.diffuse_only = true;
  ConstantMaterial mat(PbrSample{{0.7f, 0.7f, 0.7f}, 1.0f, 0.0f});

  rc.bounces = 1;
  rc.seed = 21;
  RenderedImage d1 = render(scene, probe, mat, sphere_camera(24), rc);
  rc.bounces = 3;
  rc.seed = 22;
  RenderedImage d3 = render(scene, probe, mat, sphere_camera(24), rc);
  Vec3f m1 = covered_mean(d1);
  Vec3f m3 = covered_mean(d3);
  EXPECT_NEAR(m1.x, m3.x, 0.01f * m1.x);
  EXPECT_NEAR(m1.y, m3.y, 0.01f * m1.y);
}

TEST(Render, MirrorSphereReflectsProbe) {
  // Near-delta specular metal: pixels equal the probe looked up along the
  // analytically reflected camera ray.
  Scene scene(make_sphere(1.0f, 256, 128));
  EnvironmentProbe probe = make_gradient_probe(64, 32);
  RenderConfig rc;
  rc.spp = 1024;
  rc.bounces = 1;
  rc.seed = 31;
  float mirror_r = std::sqrt(PbrSample::kAlphaMin);  // alpha at the clamp floor
  ConstantMaterial mat(PbrSample{{1, 1, 1}, mirror_r, 1.0f});
  Camera cam = sphere_camera(33);
  RenderedImage img = render(scene, probe, mat, cam, rc);

  int checked = 0;
  for (int y = 12; y <= 20; ++y)
    for (int x = 12; x <= 20; ++x) {
      if (img.coverage.pixel(x, y)[0] != 1.0f) continue;
      // Analytic unit-sphere reflection, averaged over a 4x4 subpixel grid:
      // the reflected direction sweeps several degrees across one pixel, so
      // a pixel-center oracle would carry an O(curvature) bias.
      Vec3f expect{0, 0, 0};
      int sub = 0;
      for (int sy = 0; sy < 4; ++sy)
        for (int sx = 0; sx < 4; ++sx) {
          Vec3f d = cam.ray_direction(x + (sx + 0.5f) / 4.0f, y + (sy + 0.5f) / 4.0f);
          float b = dot(d, -cam.origin());
          float disc = b * b - (dot(cam.origin(), cam.origin()) - 1.0f);
          if (disc <= 0) continue;
          float t = b - std::sqrt(disc);
          Vec3f n = normalize(cam.origin() + d * t);
          expect += probe.eval(reflect(-d, n));
          ++sub;
        }
      if (sub < 16) continue;  // silhouette pixel, footprint partly misses
      expect = expect / float(sub);
      Vec3f got = img.rgb.rgb(x, y);
      for (int c = 0; c < 3; ++c) EXPECT_NEAR(got[c], expect[c], 0.02f * expect[c] + 5e-3f);
      ++checked;
    }
  EXPECT_GT(checked, 30);
}

TEST(Render, BackgroundIsProbeWithZeroCoverage) {
  Scene scene(make_sphere(0.1f, 16, 8));
  EnvironmentProbe probe = make_constant_probe(2.5f, 8, 4);
  // Camera looking away from the sphere.
  Camera cam = make_look_at(Vec3f{0, 0, 3}, Vec3f{0, 0, 6}, Vec3f{0, 1, 0}, 0.6f, 8, 8);
  RenderConfig rc;
  rc.spp = 4;
  RenderedImage img = render(scene, probe, ConstantMaterial(PbrSample{}), cam, rc);
  for (int y = 0; y < 8; ++y)
    for (int x = 0; x < 8; ++x) {
      EXPECT_EQ(img.coverage.pixel(x, y)[0], 0.0f);
      EXPECT_NEAR(img.rgb.rgb(x, y).x, 2.5f, 1e-4f);
    }
}

TEST(Render, DeterministicAcrossWorkerCounts) {
  Scene scene(make_sphere(1.0f, 32, 16));
  EnvironmentProbe probe = make_gradient_probe();
  ConstantMaterial mat(PbrSample{{0.6f, 0.5f, 0.4f}, 0.4f, 0.3f});
  RenderConfig rc;
  rc.spp = 16;
  rc.bounces = 2;
  rc.seed = 77;

  rc.workers = 1;
  RenderedImage a = render(scene, probe, mat, sphere_camera(16), rc);
  rc.workers = 2;
  RenderedImage b = render(scene, probe, mat, sphere_camera(16), rc);
  rc.workers = 5;
  RenderedImage c = render(scene, probe, mat, sphere_camera(16), rc);
  for (size_t i = 0; i < a.rgb.data.size(); ++i) {
    ASSERT_EQ(a.rgb.data[i], b.rgb.data[i]);
    ASSERT_EQ(a.rgb.data[i], c.rgb.data[i]);
  }
  for (size_t i = 0; i < a.coverage.data.size(); ++i)
    ASSERT_EQ(a.coverage.data[i], b.coverage.data[i]);

  // Different seed must actually change the estimate.
  rc.seed = 78;
  RenderedImage d = render(scene, probe, mat, sphere_camera(16), rc);
  bool any_diff = false;
  for (size_t i = 0; i < a.rgb.data.size() && !any_diff; ++i)
    any_diff = a.rgb.data[i] != d.rgb.data[i];
  EXPECT_TRUE(any_diff);
}

TEST(Render, EnergyBounded) {
  // White base color under a constant probe: no pixel may exceed the probe
  // radiance by more than 5% for a pure-metal lobe at d=3. The dielectric
  // case stacks the 0.04 specular lobe on an unscaled unit Lambertian (see
  // the BRDF furnace test), so its bound is the measured 1.10 envelope.
  Scene scene(make_sphere(1.0f, 128, 64));
  EnvironmentProbe probe = make_constant_probe(1.0f, 8, 4);
  RenderConfig rc;
  rc.spp = 512;
  rc.bounces = 3;
  rc.seed = 41;

  struct Case {
    float r, m, bound;
  } cases[] = {{0.3f, 1.0f, 1.05f}, {1.0f, 0.0f, 1.10f}};
  for (const Case& cs : cases) {
    ConstantMaterial mat(PbrSample{{1, 1, 1}, cs.r, cs.m});
    RenderedImage img = render(scene, probe, mat, sphere_camera(24), rc);
    for (int y = 0; y < 24; ++y)
      for (int x = 0; x < 24; ++x) {
        if (img.coverage.pixel(x, y)[0] < 1.0f) continue;
        EXPECT_LE(max_component(img.rgb.rgb(x, y)), cs.bound) << x << "," << y;
      }
  }
}

TEST(Render, MisConsistencyAcrossTechniques) {
  // Light-only, BSDF-only and MIS estimators must agree in expectation on a
  // glossy sphere; MIS variance may not exceed 1.5x the best single
  // technique.
  Scene scene(make_sphere(1.0f, 128, 64));
  EnvironmentProbe probe = make_gradient_probe(32, 16);
  ConstantMaterial mat(PbrSample{{0.8f, 0.8f, 0.8f}, 0.3f, 0.5f});
  Camera cam = sphere_camera(16);

  auto image_mean = [&](SamplingMode mode, int spp, uint64_t seed) {
    RenderConfig rc;
    rc.spp = spp;
    rc.bounces = 1;
    rc.seed = seed;
    rc.sampling = mode;
    RenderedImage img = render(scene, probe, mat, cam, rc);
    return mean(covered_mean(img));
  };

  double mis = image_mean(SamplingMode::kMis, 4096, 51);
  double light = image_mean(SamplingMode::kLightOnly, 4096, 52);
  double bsdf = image_mean(SamplingMode::kBsdfOnly, 4096, 53);
  EXPECT_NEAR(light, mis, 0.02 * mis);
  EXPECT_NEAR(bsdf, mis, 0.02 * mis);

  // Per-pixel variance across independent low-spp repeats.
  auto variance = [&](SamplingMode mode) {
    const int k = 16, spp = 32;
    std::vector<RenderedImage> runs;
    for (int i = 0; i < k; ++i) {
      RenderConfig rc;
      rc.spp = spp;
      rc.bounces = 1;
      rc.seed = 100 + uint64_t(i) + (uint64_t(mode) << 8);
      rc.sampling = mode;
      runs.push_back(render(scene, probe, mat, cam, rc));
    }
    double acc = 0;
    int count = 0;
    for (int y = 0; y < 16; ++y)
      for (int x = 0; x < 16; ++x) {
        if (runs[0].coverage.pixel(x, y)[0] != 1.0f) continue;
        double m = 0, m2 = 0;
        for (int i = 0; i < k; ++i) {
          double v = mean(runs[i].rgb.rgb(x, y));
          m += v;
          m2 += v * v;
        }
        m /= k;
        acc += std::max(0.0, m2 / k - m * m);
        ++count;
      }
    return acc / count;
  };
  double var_mis = variance(SamplingMode::kMis);
  double var_light = variance(SamplingMode::kLightOnly);
  double var_bsdf = variance(SamplingMode::kBsdfOnly);
  EXPECT_LE(var_mis, 1.5 * std::min(var_light, var_bsdf));
}

TEST(Render, ErrorDecaysAsInverseSqrtSamples) {
  // Mean of N independent 1-spp renders vs a 4096-spp reference: log-log
  // regression slope of the RMSE must be -0.5 +/- 0.1.
  Scene scene(make_sphere(1.0f, 32, 16));
  EnvironmentProbe probe = make_gradient_probe(32, 16);
  ConstantMaterial mat(PbrSample{{0.8f, 0.6f, 0.4f}, 0.5f, 0.2f});
  Camera cam = sphere_camera(12);

  RenderConfig ref_rc;
  ref_rc.spp = 4096;
  ref_rc.bounces = 1;
  ref_rc.seed = 999;
  RenderedImage ref = render(scene, probe, mat, cam, ref_rc);

  const int max_n = 256;
  std::vector<Image> singles;
  for (int i = 0; i < max_n; ++i) {
    RenderConfig rc;
    rc.spp = 1;
    rc.bounces = 1;
    rc.seed = 2000 + uint64_t(i);
    singles.push_back(render(scene, probe, mat, cam, rc).rgb);
  }

  std::vector<double> log_n, log_err;
  Image running(12, 12, 3);
  int used = 0;
  for (int i = 0; i < max_n; ++i) {
    for (size_t j = 0; j < running.data.size(); ++j) running.data[j] += singles[i].data[j];
    ++used;
    if ((used & (used - 1)) != 0) continue;  // powers of two only
    double se = 0;
    int count = 0;
    for (int y = 0; y < 12; ++y)
      for (int x = 0; x < 12; ++x) {
        if (ref.coverage.pixel(x, y)[0] != 1.0f) continue;
        Vec3f d = running.rgb(x, y) / float(used) - ref.rgb.rgb(x, y);
        se += dot(d, d);
        count += 3;
      }
    log_n.push_back(std::log(double(used)));
    log_err.push_back(0.5 * std::log(se / count));
  }
  // Least-squares slope.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = int(log_n.size());
  for (int i = 0; i < n; ++i) {
    sx += log_n[i];
    sy += log_err[i];
    sxx += log_n[i] * log_n[i];
    sxy += log_n[i] * log_err[i];
  }
  double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  EXPECT_NEAR(slope, -0.5, 0.1);
}

TEST(Render, ConfigValidation) {
  RenderConfig rc;
  rc.spp = 0;
  EXPECT_THROW(rc.validate(), ConfigError);
  rc.spp = 1;
  rc.bounces = 0;
  EXPECT_THROW(rc.validate(), ConfigError);
}
