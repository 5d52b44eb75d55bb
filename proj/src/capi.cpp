// Copyright (c) 2026 matbake contributors
// SPDX-License-Identifier: Apache-2.0

#include "matbake/capi.h"

#include <cmath>
#include <cstring>
#include <functional>
#include <memory>
#include <string>

#include "matbake/error.h"
#include "matbake/pipeline.h"

using namespace matbake;

namespace {

thread_local std::string g_last_error;

mb_status set_error(mb_status code, const std::string& message) {
  g_last_error = message;
  return code;
}

mb_status run_guarded(const std::function<void()>& body) {
  try {
    body();
    g_last_error.clear();
    return MB_OK;
  } catch (const ConfigError& e) {
    return set_error(MB_ERROR_CONFIG, e.what());
  } catch (const IoError& e) {
    return set_error(MB_ERROR_IO, e.what());
  } catch (const NumericError& e) {
    return set_error(MB_ERROR_NUMERIC, e.what());
  } catch (const std::exception& e) {
    return set_error(MB_ERROR, e.what());
  } catch (...) {
    return set_error(MB_ERROR, "unknown error");
  }
}

}  // namespace

struct mb_session {
  PipelineConfig config;
};

struct mb_scene {
  Scene scene;
  explicit mb_scene(TriangleMesh mesh) : scene(std::move(mesh)) {}
};

struct mb_probe {
  EnvironmentProbe probe;
  explicit mb_probe(EnvironmentProbe p) : probe(std::move(p)) {}
};

extern "C" {

const char* mb_last_error(void) { return g_last_error.c_str(); }

const char* mb_version(void) { return "0.1.0"; }

mb_status mb_session_create(const char* config_path, mb_session** out_session) {
  if (!config_path || !out_session)
    return set_error(MB_ERROR_CONFIG, "null argument to mb_session_create");
  *out_session = nullptr;
  return run_guarded([&] {
    auto session = std::make_unique<mb_session>();
    session->config = PipelineConfig::from_file(config_path);
    *out_session = session.release();
  });
}

void mb_session_destroy(mb_session* session) { delete session; }

mb_status mb_session_set_output_dir(mb_session* session, const char* dir) {
  if (!session || !dir) return set_error(MB_ERROR_CONFIG, "null argument");
  session->config.output_dir = dir;
  g_last_error.clear();
  return MB_OK;
}

mb_status mb_session_set_workers(mb_session* session, int workers) {
  if (!session) return set_error(MB_ERROR_CONFIG, "null session");
  session->config.render.workers = workers;
  g_last_error.clear();
  return MB_OK;
}

mb_status mb_session_set_seed(mb_session* session, unsigned long long seed) {
  if (!session) return set_error(MB_ERROR_CONFIG, "null session");
  session->config.render.seed = seed;
  g_last_error.clear();
  return MB_OK;
}

mb_status mb_session_run(mb_session* session, const char* subcommand) {
  if (!session || !subcommand) return set_error(MB_ERROR_CONFIG, "null argument");
  return run_guarded([&] { run_pipeline(session->config, subcommand); });
}

mb_status mb_scene_load(const char* obj_path, int normalize, mb_scene** out_scene) {
  if (!obj_path || !out_scene) return set_error(MB_ERROR_CONFIG, "null argument");
  *out_scene = nullptr;
  return run_guarded([&] {
    TriangleMesh mesh = load_mesh(obj_path);
    if (normalize) mesh.normalize_to_unit_box();
    *out_scene = new mb_scene(std::move(mesh));
  });
}

void mb_scene_destroy(mb_scene* scene) { delete scene; }

mb_status mb_scene_bounds(const mb_scene* scene, float out_min[3], float out_max[3]) {
  if (!scene || !out_min || !out_max) return set_error(MB_ERROR_CONFIG, "null argument");
  const AABB& b = scene->scene.mesh.bounds;
  out_min[0] = b.lo.x; out_min[1] = b.lo.y; out_min[2] = b.lo.z;
  out_max[0] = b.hi.x; out_max[1] = b.hi.y; out_max[2] = b.hi.z;
  g_last_error.clear();
  return MB_OK;
}

mb_status mb_scene_triangle_count(const mb_scene* scene, size_t* out_count) {
  if (!scene || !out_count) return set_error(MB_ERROR_CONFIG, "null argument");
  *out_count = scene->scene.mesh.triangle_count();
  g_last_error.clear();
  return MB_OK;
}

mb_status mb_probe_load(const char* hdr_path, float rotation, mb_probe** out_probe) {
  if (!hdr_path || !out_probe) return set_error(MB_ERROR_CONFIG, "null argument");
  *out_probe = nullptr;
  return run_guarded([&] { *out_probe = new mb_probe(load_probe(hdr_path, rotation)); });
}

void mb_probe_destroy(mb_probe* probe) { delete probe; }

mb_status mb_probe_eval(const mb_probe* probe, const float dir[3], float out_rgb[3],
                        float* out_pdf) {
  if (!probe || !dir || !out_rgb) return set_error(MB_ERROR_CONFIG, "null argument");
  return run_guarded([&] {
    Vec3f d = normalize(Vec3f{dir[0], dir[1], dir[2]});
    Vec3f radiance = probe->probe.eval(d);
    out_rgb[0] = radiance.x;
    out_rgb[1] = radiance.y;
    out_rgb[2] = radiance.z;
    if (out_pdf) *out_pdf = probe->probe.pdf(d);
  });
}

mb_status mb_render_orbit_view(const mb_scene* scene, const mb_probe* probe,
                               const mb_render_params* params, float azimuth, float elevation,
                               float radius, float fov_y, float* out_rgb,
                               float* out_coverage) {
  if (!scene || !probe || !params || !out_rgb)
    return set_error(MB_ERROR_CONFIG, "null argument");
  return run_guarded([&] {
    RenderConfig rc;
    rc.spp = params->spp;
    rc.bounces = params->bounces;
    rc.seed = params->seed;
    rc.diffuse_only = params->diffuse_only != 0;
    rc.workers = params->workers;

    PbrSample mat;
    mat.base_color = {params->base_color[0], params->base_color[1], params->base_color[2]};
    mat.roughness = params->roughness;
    mat.metallic = params->metallic;

    // Orbit around the mesh bounds center; azimuth is a continuous angle, so
    // expose it through the cyclical single-frame generator.
    const Scene& s = scene->scene;
    Camera cam = make_look_at(
        s.mesh.bounds.center() + Vec3f{radius * std::cos(elevation) * std::cos(azimuth),
                                       radius * std::sin(elevation),
                                       radius * std::cos(elevation) * std::sin(azimuth)},
        s.mesh.bounds.center(), Vec3f{0, 1, 0}, fov_y, params->width, params->height);

    RenderedImage img = render(s, probe->probe, ConstantMaterial(mat), cam, rc);
    std::memcpy(out_rgb, img.rgb.data.data(), img.rgb.data.size() * sizeof(float));
    if (out_coverage)
      std::memcpy(out_coverage, img.coverage.data.data(),
                  img.coverage.data.size() * sizeof(float));
  });
}

}  // extern "C"
