// Copyright (c) 2026 matbake contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "matbake/vecmath.h"

namespace matbake {

// Pinhole camera. Camera space is right-handed, +X right, +Y up, looking
// along -Z; world_from_camera is rigid.
struct Camera {
  Mat4 world_from_camera;
  float fov_y = 0.7f;  // vertical field of view, radians
  int width = 0;
  int height = 0;

  Vec3f origin() const { return world_from_camera.translation(); }

  // Ray direction through pixel coordinates (px, py) measured in pixels from
  // the top-left corner (pixel centers at +0.5).
  Vec3f ray_direction(float px, float py) const {
    float tan_half = std::tan(0.5f * fov_y);
    float aspect = float(width) / float(height);
    float ndc_x = (2.0f * px / float(width) - 1.0f) * tan_half * aspect;
    float ndc_y = (1.0f - 2.0f * py / float(height)) * tan_half;
    return normalize(world_from_camera.transform_vector(Vec3f{ndc_x, ndc_y, -1.0f}));
  }

  // Projects a world point; returns false when behind the camera. Out pixel
  // coordinates follow the same convention as ray_direction.
  bool project(const Vec3f& world, float* px, float* py, float* view_depth) const;

  void validate() const;  // orthonormal rotation, fov in (0, pi), size >= 1
};

Camera make_look_at(const Vec3f& eye, const Vec3f& target, const Vec3f& up, float fov_y,
                    int width, int height);

// Camera i of an n-frame fixed-elevation orbit around `center`. Azimuth is
// 2*pi*i/n starting at +X; periodic in i, so i and i+n yield the same camera.
Camera orbit_camera(int i, int n_frames, const Vec3f& center, float elevation, float radius,
                    float fov_y, int width, int height);

std::vector<Camera> generate_orbit(int n_frames, const Vec3f& center, float elevation,
                                   float radius, float fov_y, int width, int height);

// Text serialization: one line per frame with 19 numbers, the row-major 4x4
// world-from-camera matrix followed by fov-y (radians), width, height.
// '#' starts a comment.
void save_cameras(const std::string& path, const std::vector<Camera>& cams);
std::vector<Camera> load_cameras(const std::string& path);

}  // namespace matbake
