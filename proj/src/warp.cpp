// Copyright (c) 2026 matbake contributors
// SPDX-License-Identifier: Apache-2.0

#include "matbake/warp.h"

#include <vector>

#include "matbake/error.h"
#include "matbake/parallel.h"

namespace matbake {

Image render_depth(const Scene& scene, const Camera& camera, int workers) {
  const int w = camera.width, h = camera.height;
  Image out(w, h, 1);
  parallel_for(h, workers, [&](int64_t y) {
    for (int x = 0; x < w; ++x) {
      Ray ray;
      ray.origin = camera.origin();
      ray.dir = camera.ray_direction(float(x) + 0.5f, float(int(y)) + 0.5f);
      auto hit = scene.intersect(ray);
      out.pixel(x, int(y))[0] = hit ? hit->t : kDepthMiss;
    }
  });
  return out;
}

WarpResult warp_image(const Image& src, const Image& src_depth, const Camera& src_cam,
                      const Camera& dst_cam) {
  if (src.width != src_depth.width || src.height != src_depth.height)
    throw ConfigError("source image and depth resolution mismatch");

  const int sw = src.width, sh = src.height;
  const int dw = dst_cam.width, dh = dst_cam.height;

  WarpResult out;
  out.rgb = Image(dw, dh, 3);
  out.mask = Image(dw, dh, 1);
  // Z-buffer keyed (depth, source index); lower source index wins ties.
  std::vector<float> zbuf(size_t(dw) * dh, kInf);

  for (int y = 0; y < sh; ++y) {
    for (int x = 0; x < sw; ++x) {
      float depth = src_depth.pixel(x, y)[0];
      if (!(depth > 0.0f)) continue;
      Vec3f dir = src_cam.ray_direction(float(x) + 0.5f, float(y) + 0.5f);
      Vec3f world = src_cam.origin() + dir * depth;

      float px, py, view_depth;
      if (!dst_cam.project(world, &px, &py, &view_depth)) continue;
      int dx = int(std::floor(px));
      int dy = int(std::floor(py));
      if (dx < 0 || dy < 0 || dx >= dw || dy >= dh) continue;

      size_t di = size_t(dy) * dw + dx;
      if (view_depth < zbuf[di]) {
        zbuf[di] = view_depth;
        out.rgb.set_rgb(dx, dy, src.rgb(x, y));
        out.mask.pixel(dx, dy)[0] = 1.0f;
      }
    }
  }
  return out;
}

}  // namespace matbake
