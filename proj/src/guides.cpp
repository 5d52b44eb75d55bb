// Copyright (c) 2026 matbake contributors
// SPDX-License-Identifier: Apache-2.0

#include "matbake/guides.h"

#include "matbake/parallel.h"

namespace matbake {

Image render_normal_guide(const Scene& scene, const Camera& camera, int workers) {
  const int w = camera.width, h = camera.height;
  Image out(w, h, 3);

  parallel_for(h, workers, [&](int64_t y) {
    for (int x = 0; x < w; ++x) {
      Ray ray;
      ray.origin = camera.origin();
      ray.dir = camera.ray_direction(float(x) + 0.5f, float(int(y)) + 0.5f);
      Vec3f n_cam{0, 0, 1};  // background faces the camera
      if (auto hit = scene.intersect(ray)) {
        ShadePoint sp = shade_point_from(*hit, scene.mesh, ray);
        n_cam = camera.world_from_camera.inverse_transform_vector(sp.normal);
      }
      out.set_rgb(x, int(y), (n_cam + Vec3f{1, 1, 1}) * 0.5f);
    }
  });
  return out;
}

Image render_shading_pass(const Scene& scene, const EnvironmentProbe& probe,
                          const Camera& camera, const RenderConfig& config, float roughness,
                          float metallic) {
  PbrSample mat;
  mat.base_color = {0.7f, 0.7f, 0.7f};
  mat.roughness = roughness;
  mat.metallic = metallic;
  RenderedImage pass = render(scene, probe, ConstantMaterial(mat), camera, config);
  return tonemap_image(pass.rgb);
}

Image render_shading_guide(const Scene& scene, const EnvironmentProbe& probe,
                           const Camera& camera, const RenderConfig& config) {
  // Diffuse, semi-specular, specular; pass order fixes the channel order.
  const float rough[3] = {1.0f, 0.5f, 0.0f};
  const float metal[3] = {0.0f, 0.5f, 1.0f};

  Image out(camera.width, camera.height, 3);
  for (int pass = 0; pass < 3; ++pass) {
    Image shaded = render_shading_pass(scene, probe, camera, config, rough[pass], metal[pass]);
    for (int y = 0; y < out.height; ++y)
      for (int x = 0; x < out.width; ++x)
        out.pixel(x, y)[pass] = luminance(shaded.rgb(x, y));
  }
  return out;
}

}  // namespace matbake
