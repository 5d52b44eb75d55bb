/* Copyright (c) 2026 matbake contributors
 * SPDX-License-Identifier: Apache-2.0
 *
 * C API for the matbake material-extraction toolkit. All functionality is
 * reachable through opaque handles and integer status codes so the library
 * can be driven from C, scripting FFIs, or the bundled CLI. Status values
 * mirror the CLI exit codes.
 */

#ifndef MATBAKE_CAPI_H
#define MATBAKE_CAPI_H

#include <stddef.h>

#if defined(_WIN32)
#  ifdef MATBAKE_EXPORTS
#    define MATBAKE_API __declspec(dllexport)
#  else
#    define MATBAKE_API __declspec(dllimport)
#  endif
#elif defined(__GNUC__) || defined(__clang__)
#  define MATBAKE_API __attribute__((visibility("default")))
#else
#  define MATBAKE_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mb_status {
  MB_OK = 0,
  MB_ERROR = 1,         /* unexpected failure */
  MB_ERROR_CONFIG = 2,  /* bad or missing configuration */
  MB_ERROR_IO = 3,      /* file missing/unreadable/unwritable */
  MB_ERROR_NUMERIC = 4  /* numerical divergence or invariant violation */
} mb_status;

/* Message for the most recent failing call on this thread; empty string when
 * the last call succeeded. The pointer stays valid until the next API call
 * from the same thread. */
MATBAKE_API const char* mb_last_error(void);

MATBAKE_API const char* mb_version(void);

/* ------------------------------------------------------------------------
 * Session: one config file, any number of subcommand runs.
 * ---------------------------------------------------------------------- */

typedef struct mb_session mb_session;

MATBAKE_API mb_status mb_session_create(const char* config_path, mb_session** out_session);
MATBAKE_API void mb_session_destroy(mb_session* session);

/* Overrides applied on top of the config file. */
MATBAKE_API mb_status mb_session_set_output_dir(mb_session* session, const char* dir);
MATBAKE_API mb_status mb_session_set_workers(mb_session* session, int workers);
MATBAKE_API mb_status mb_session_set_seed(mb_session* session, unsigned long long seed);

/* Runs "render", "guides", "reconstruct", "bake", "relight", "metrics" or
 * "warp"; outputs are written under the session's output directory. */
MATBAKE_API mb_status mb_session_run(mb_session* session, const char* subcommand);

/* ------------------------------------------------------------------------
 * Direct scene/probe/render access for embedding without a config file.
 * ---------------------------------------------------------------------- */

typedef struct mb_scene mb_scene;
typedef struct mb_probe mb_probe;

/* Loads a Wavefront mesh and builds the BVH; normalize != 0 rescales to a
 * unit-diagonal box at the origin. */
MATBAKE_API mb_status mb_scene_load(const char* obj_path, int normalize, mb_scene** out_scene);
MATBAKE_API void mb_scene_destroy(mb_scene* scene);
MATBAKE_API mb_status mb_scene_bounds(const mb_scene* scene, float out_min[3],
                                      float out_max[3]);
MATBAKE_API mb_status mb_scene_triangle_count(const mb_scene* scene, size_t* out_count);

MATBAKE_API mb_status mb_probe_load(const char* hdr_path, float rotation,
                                    mb_probe** out_probe);
MATBAKE_API void mb_probe_destroy(mb_probe* probe);
/* Bilinear radiance and the light-sampling pdf for a unit direction. */
MATBAKE_API mb_status mb_probe_eval(const mb_probe* probe, const float dir[3],
                                    float out_rgb[3], float* out_pdf);

typedef struct mb_render_params {
  int width;
  int height;
  int spp;
  int bounces;
  unsigned long long seed;
  int diffuse_only;
  int workers;
  /* constant material */
  float base_color[3];
  float roughness;
  float metallic;
} mb_render_params;

/* Renders one orbit view (azimuth/elevation/radius around the scene center)
 * with a constant material into caller-owned buffers: out_rgb is
 * width*height*3 linear floats, out_coverage (optional, may be NULL) is
 * width*height floats. */
MATBAKE_API mb_status mb_render_orbit_view(const mb_scene* scene, const mb_probe* probe,
                                           const mb_render_params* params, float azimuth,
                                           float elevation, float radius, float fov_y,
                                           float* out_rgb, float* out_coverage);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* MATBAKE_CAPI_H */
