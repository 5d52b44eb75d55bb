// Copyright (c) 2026 matbake contributors
// SPDX-License-Identifier: Apache-2.0

#include "matbake/tracer.h"

#include <atomic>
#include <cmath>

#include "matbake/error.h"
#include "matbake/parallel.h"
#include "matbake/rng.h"

namespace matbake {

void RenderConfig::validate() const {
  if (spp < 1 || spp_backward < 1) throw ConfigError("samples per pixel must be >= 1");
  if (bounces < 1 || bounces > 8) throw ConfigError("bounces must be in [1, 8]");
}

Image tonemap_image(const Image& linear) {
  Image out(linear.width, linear.height, 3);
  for (int y = 0; y < linear.height; ++y)
    for (int x = 0; x < linear.width; ++x) out.set_rgb(x, y, tonemap(linear.rgb(x, y)));
  return out;
}

namespace {

constexpr int kMaxBounces = 8;

struct VertexRecord {
  Vec3f pos;
  Vec2f uv;
  Vec3f n;
  Vec3f wo;
  bool nee_valid = false;
  Vec3f wl;
  Vec3f nee_weight;  // probe radiance * cos_l * mis / pdf_l
  bool cont_valid = false;
  Vec3f wi;
  float cont_weight = 0;  // cos_i / pdf
};

struct PathRecord {
  int count = 0;
  VertexRecord v[kMaxBounces];
  bool escaped = false;
  Vec3f escape_radiance;  // env radiance * mis, applied to the last throughput
};

// One path sample. Returns the sample radiance including the background on a
// primary miss; *primary_hit reports coverage. When rec is non-null the data
// needed by the adjoint sweep is captured. The RNG consumption pattern is
// identical with and without rec, so the backward pass retraces the forward
// sample streams exactly.
Vec3f trace_path(const Scene& scene, const EnvironmentProbe& probe,
                 const MaterialSource& material, Ray ray, Rng& rng, const RenderConfig& config,
                 const Vec2f& nee_stratum, const Vec2f& bsdf_stratum, bool* primary_hit,
                 PathRecord* rec) {
  Vec3f radiance{0, 0, 0};
  Vec3f throughput{1, 1, 1};
  *primary_hit = false;

  auto hit = scene.intersect(ray);
  if (!hit) return probe.eval(ray.dir);  // background
  *primary_hit = true;

  for (int bounce = 0; bounce < config.bounces; ++bounce) {
    ShadePoint sp = shade_point_from(*hit, scene.mesh, ray);
    PbrSample mat = material.sample_at(sp.position, sp.uv);

    VertexRecord* vrec = nullptr;
    if (rec) {
      vrec = &rec->v[rec->count++];
      vrec->pos = sp.position;
      vrec->uv = sp.uv;
      vrec->n = sp.normal;
      vrec->wo = sp.wo;
    }

    // Next-event estimation toward the probe. The random numbers are drawn
    // unconditionally to keep the stream layout fixed; the primary vertex
    // uses the caller's stratified pair for lower direct-light variance.
    float u1 = rng.next_float(), u2 = rng.next_float();
    if (bounce == 0) {
      u1 = nee_stratum.x;
      u2 = nee_stratum.y;
    }
    if (config.sampling != SamplingMode::kBsdfOnly) {
      ProbeSample ls = probe.sample(u1, u2);
      float cos_l = dot(sp.normal, ls.direction);
      if (ls.pdf > 0.0f && cos_l > 0.0f) {
        Vec3f offset_n = dot(sp.geom_normal, ls.direction) >= 0.0f ? sp.geom_normal
                                                                   : -sp.geom_normal;
        if (!scene.occluded(sp.position, offset_n, ls.direction)) {
          float w = 1.0f;
          if (config.sampling == SamplingMode::kMis)
            w = mis_weight(ls.pdf, pdf_bsdf(mat, ls.direction, sp.wo, sp.normal,
                                            config.diffuse_only));
          Vec3f f = eval_bsdf(mat, ls.direction, sp.wo, sp.normal, config.diffuse_only);
          Vec3f weight = ls.radiance * (cos_l * w / ls.pdf);
          radiance += throughput * f * weight;
          if (vrec) {
            vrec->nee_valid = true;
            vrec->wl = ls.direction;
            vrec->nee_weight = weight;
          }
        }
      }
    }

    // BSDF continuation ray; the primary vertex reuses the caller's second
    // stratified pair for the directional draws.
    float ul = rng.next_float(), ua = rng.next_float(), ub = rng.next_float();
    if (bounce == 0) {
      ua = bsdf_stratum.x;
      ub = bsdf_stratum.y;
    }
    BsdfSample bs = sample_bsdf(mat, sp.wo, sp.normal, ul, ua, ub, config.diffuse_only);
    float cos_i = dot(sp.normal, bs.wi);
    if (bs.pdf <= 0.0f || cos_i <= 0.0f) break;

    Vec3f f = eval_bsdf(mat, bs.wi, sp.wo, sp.normal, config.diffuse_only);
    float cont_weight = cos_i / bs.pdf;
    throughput *= f * cont_weight;
    if (vrec) {
      vrec->cont_valid = true;
      vrec->wi = bs.wi;
      vrec->cont_weight = cont_weight;
    }

    Vec3f offset_n = dot(sp.geom_normal, bs.wi) >= 0.0f ? sp.geom_normal : -sp.geom_normal;
    ray.origin = sp.position + offset_n * scene.ray_epsilon;
    ray.dir = bs.wi;
    ray.t_min = 0.0f;
    ray.t_max = kInf;

    hit = scene.intersect(ray);
    if (!hit) {
      if (config.sampling != SamplingMode::kLightOnly) {
        float w = 1.0f;
        if (config.sampling == SamplingMode::kMis) w = mis_weight(bs.pdf, probe.pdf(bs.wi));
        Vec3f env = probe.eval(bs.wi) * w;
        radiance += throughput * env;
        if (rec) {
          rec->escaped = true;
          rec->escape_radiance = env;
        }
      }
      break;
    }
  }
  return radiance;
}

// Stratified pair: the first floor(sqrt(spp))^2 samples sit on a jittered
// grid, the rest are uniform. Used for the pixel jitter and again (fresh
// random offsets, same cell) for the primary-vertex light sample.
inline Vec2f sample_stratum(int s, int spp, Rng& rng) {
  int n = int(std::sqrt(float(spp)));
  float jx = rng.next_float(), jy = rng.next_float();
  if (n >= 2 && s < n * n) {
    int sx = s % n, sy = s / n;
    return {(float(sx) + jx) / float(n), (float(sy) + jy) / float(n)};
  }
  return {jx, jy};
}

constexpr uint64_t kPathSalt = 0x70617468u;  // shared by forward and backward

}  // namespace

RenderedImage render(const Scene& scene, const EnvironmentProbe& probe,
                     const MaterialSource& material, const Camera& camera,
                     const RenderConfig& config) {
  config.validate();
  camera.validate();
  const int w = camera.width, h = camera.height;

  RenderedImage out;
  out.rgb = Image(w, h, 3);
  out.coverage = Image(w, h, 1);
  std::atomic<int> nan_samples{0};

  parallel_for(h, config.workers, [&](int64_t y) {
    int dropped = 0;
    for (int x = 0; x < w; ++x) {
      uint64_t pixel_index = uint64_t(y) * w + x;
      double acc[3] = {0, 0, 0};
      int hits = 0;
      for (int s = 0; s < config.spp; ++s) {
        Rng rng = make_stream(config.seed, pixel_index, uint64_t(s), kPathSalt);
        Vec2f jitter = sample_stratum(s, config.spp, rng);
        Vec2f nee_stratum = sample_stratum(s, config.spp, rng);
        Vec2f bsdf_stratum = sample_stratum(s, config.spp, rng);
        Ray ray;
        ray.origin = camera.origin();
        ray.dir = camera.ray_direction(float(x) + jitter.x, float(int(y)) + jitter.y);

        bool primary_hit = false;
        Vec3f sample = trace_path(scene, probe, material, ray, rng, config, nee_stratum,
                                  bsdf_stratum, &primary_hit, nullptr);
        if (!all_finite(sample)) {
          ++dropped;
          continue;
        }
        acc[0] += sample.x;
        acc[1] += sample.y;
        acc[2] += sample.z;
        if (primary_hit) ++hits;
      }
      float inv = 1.0f / float(config.spp);
      out.rgb.set_rgb(x, int(y),
                      Vec3f{float(acc[0]), float(acc[1]), float(acc[2])} * inv);
      out.coverage.pixel(x, int(y))[0] = float(hits) * inv;
    }
    if (dropped) nan_samples.fetch_add(dropped, std::memory_order_relaxed);
  });

  out.nan_samples = nan_samples.load();
  return out;
}

void render_backward(const Scene& scene, const EnvironmentProbe& probe,
                     const MaterialField& field, const Camera& camera,
                     const RenderConfig& config, const Image& adjoint, GradientBuffer& grads) {
  config.validate();
  if (adjoint.width != camera.width || adjoint.height != camera.height ||
      adjoint.channels != 3)
    throw ConfigError("adjoint image does not match the render resolution");

  const int w = camera.width, h = camera.height;
  FieldMaterial material(field);

  parallel_for(h, config.workers, [&](int64_t y) {
    PathRecord rec;
    for (int x = 0; x < w; ++x) {
      Vec3f a = adjoint.rgb(x, int(y));
      if (a.x == 0.0f && a.y == 0.0f && a.z == 0.0f) continue;
      a *= 1.0f / float(config.spp_backward);

      uint64_t pixel_index = uint64_t(y) * w + x;
      for (int s = 0; s < config.spp_backward; ++s) {
        Rng rng = make_stream(config.seed, pixel_index, uint64_t(s), kPathSalt);
        Vec2f jitter = sample_stratum(s, config.spp, rng);
        Vec2f nee_stratum = sample_stratum(s, config.spp, rng);
        Vec2f bsdf_stratum = sample_stratum(s, config.spp, rng);
        Ray ray;
        ray.origin = camera.origin();
        ray.dir = camera.ray_direction(float(x) + jitter.x, float(int(y)) + jitter.y);

        rec = PathRecord{};
        bool primary_hit = false;
        Vec3f sample = trace_path(scene, probe, material, ray, rng, config, nee_stratum,
                                  bsdf_stratum, &primary_hit, &rec);
        if (!primary_hit || rec.count == 0 || !all_finite(sample)) continue;

        // Per-vertex material evaluations and throughput factors.
        PbrSample mats[kMaxBounces];
        BsdfEval nee_eval[kMaxBounces], cont_eval[kMaxBounces];
        FieldQueryContext ctxs[kMaxBounces];
        Vec3f big_f[kMaxBounces];
        for (int v = 0; v < rec.count; ++v) {
          const VertexRecord& vr = rec.v[v];
          mats[v] = field.query_ctx(vr.pos, &ctxs[v]);
          if (vr.nee_valid)
            nee_eval[v] = eval_bsdf_grad(mats[v], vr.wl, vr.wo, vr.n, config.diffuse_only);
          if (vr.cont_valid) {
            cont_eval[v] = eval_bsdf_grad(mats[v], vr.wi, vr.wo, vr.n, config.diffuse_only);
            big_f[v] = cont_eval[v].f * vr.cont_weight;
          } else {
            big_f[v] = Vec3f{0, 0, 0};
          }
        }

        // Suffix radiance arriving along each vertex's continuation ray.
        Vec3f suffix_after[kMaxBounces];
        suffix_after[rec.count - 1] = rec.escaped ? rec.escape_radiance : Vec3f{0, 0, 0};
        for (int v = rec.count - 2; v >= 0; --v) {
          const VertexRecord& nxt = rec.v[v + 1];
          Vec3f s_next = nxt.nee_valid ? nee_eval[v + 1].f * nxt.nee_weight : Vec3f{0, 0, 0};
          if (nxt.cont_valid) s_next += big_f[v + 1] * suffix_after[v + 1];
          suffix_after[v] = s_next;
        }

        Vec3f prefix{1, 1, 1};  // product of throughput factors before vertex v
        for (int v = 0; v < rec.count; ++v) {
          const VertexRecord& vr = rec.v[v];
          float up[5] = {0, 0, 0, 0, 0};
          if (vr.nee_valid) {
            Vec3f wgt = a * prefix * vr.nee_weight;
            up[0] += wgt.x * nee_eval[v].df_dc.x;
            up[1] += wgt.y * nee_eval[v].df_dc.y;
            up[2] += wgt.z * nee_eval[v].df_dc.z;
            up[3] += dot(wgt, nee_eval[v].df_dr);
            up[4] += dot(wgt, nee_eval[v].df_dm);
          }
          if (vr.cont_valid) {
            Vec3f wgt = a * prefix * suffix_after[v] * vr.cont_weight;
            up[0] += wgt.x * cont_eval[v].df_dc.x;
            up[1] += wgt.y * cont_eval[v].df_dc.y;
            up[2] += wgt.z * cont_eval[v].df_dc.z;
            up[3] += dot(wgt, cont_eval[v].df_dr);
            up[4] += dot(wgt, cont_eval[v].df_dm);
          }
          if (up[0] != 0 || up[1] != 0 || up[2] != 0 || up[3] != 0 || up[4] != 0)
            field.query_backward(ctxs[v], up, grads);
          if (!vr.cont_valid) break;
          prefix *= big_f[v];
        }
      }
    }
  });
}

IntrinsicImages render_intrinsics(const Scene& scene, const MaterialField& field,
                                  const Camera& camera, int workers) {
  const int w = camera.width, h = camera.height;
  IntrinsicImages out;
  out.base_display = Image(w, h, 3);
  out.roughness = Image(w, h, 1);
  out.metallic = Image(w, h, 1);
  out.hit_mask = Image(w, h, 1);

  parallel_for(h, workers, [&](int64_t y) {
    for (int x = 0; x < w; ++x) {
      Ray ray;
      ray.origin = camera.origin();
      ray.dir = camera.ray_direction(float(x) + 0.5f, float(int(y)) + 0.5f);
      auto hit = scene.intersect(ray);
      if (!hit) continue;
      ShadePoint sp = shade_point_from(*hit, scene.mesh, ray);
      PbrSample s = field.query(sp.position);
      out.base_display.set_rgb(x, int(y),
                               Vec3f{linear_to_srgb(s.base_color.x),
                                     linear_to_srgb(s.base_color.y),
                                     linear_to_srgb(s.base_color.z)});
      out.roughness.pixel(x, int(y))[0] = s.roughness;
      out.metallic.pixel(x, int(y))[0] = s.metallic;
      out.hit_mask.pixel(x, int(y))[0] = 1.0f;
    }
  });
  return out;
}

void render_intrinsics_backward(const Scene& scene, const MaterialField& field,
                                const Camera& camera, const Image& d_base_display,
                                const Image& d_roughness, const Image& d_metallic,
                                GradientBuffer& grads, int workers) {
  const int w = camera.width, h = camera.height;
  if (d_base_display.width != w || d_base_display.height != h)
    throw ConfigError("intrinsic adjoint does not match the camera resolution");

  parallel_for(h, workers, [&](int64_t y) {
    FieldQueryContext ctx;
    for (int x = 0; x < w; ++x) {
      Vec3f db = d_base_display.rgb(x, int(y));
      float dr = d_roughness.pixel(x, int(y))[0];
      float dm = d_metallic.pixel(x, int(y))[0];
      if (db.x == 0 && db.y == 0 && db.z == 0 && dr == 0 && dm == 0) continue;

      Ray ray;
      ray.origin = camera.origin();
      ray.dir = camera.ray_direction(float(x) + 0.5f, float(int(y)) + 0.5f);
      auto hit = scene.intersect(ray);
      if (!hit) continue;
      ShadePoint sp = shade_point_from(*hit, scene.mesh, ray);
      PbrSample s = field.query_ctx(sp.position, &ctx);

      float up[5] = {db.x * linear_to_srgb_derivative(s.base_color.x),
                     db.y * linear_to_srgb_derivative(s.base_color.y),
                     db.z * linear_to_srgb_derivative(s.base_color.z), dr, dm};
      field.query_backward(ctx, up, grads);
    }
  });
}

}  // namespace matbake
