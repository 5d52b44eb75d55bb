// Copyright (c) 2026 matbake contributors
// SPDX-License-Identifier: Apache-2.0

#include "matbake/camera.h"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "matbake/error.h"

namespace matbake {

bool Camera::project(const Vec3f& world, float* px, float* py, float* view_depth) const {
  Vec3f local = world_from_camera.inverse_transform_point(world);
  if (local.z >= -1e-9f) return false;  // behind or on the eye plane
  float tan_half = std::tan(0.5f * fov_y);
  float aspect = float(width) / float(height);
  float ndc_x = -local.x / local.z / (tan_half * aspect);
  float ndc_y = -local.y / local.z / tan_half;
  *px = (ndc_x + 1.0f) * 0.5f * float(width);
  *py = (1.0f - ndc_y) * 0.5f * float(height);
  *view_depth = -local.z;
  return true;
}

void Camera::validate() const {
  if (!(fov_y > 0.0f && fov_y < kPi)) throw NumericError("camera fov out of (0, pi)");
  if (width < 1 || height < 1) throw NumericError("camera resolution must be >= 1");
  Vec3f cx = world_from_camera.col3(0);
  Vec3f cy = world_from_camera.col3(1);
  Vec3f cz = world_from_camera.col3(2);
  float det = dot(cross(cx, cy), cz);
  if (std::abs(det - 1.0f) > 1e-5f)
    throw NumericError("camera rotation is not orthonormal (det = " + std::to_string(det) + ")");
}

Camera make_look_at(const Vec3f& eye, const Vec3f& target, const Vec3f& up, float fov_y,
                    int width, int height) {
  Vec3f forward = normalize(target - eye);
  Vec3f up_hint = up;
  if (length(cross(forward, up_hint)) < 1e-6f) up_hint = Vec3f{0, 0, 1};
  Vec3f right = normalize(cross(forward, up_hint));
  Vec3f true_up = cross(right, forward);

  Camera cam;
  cam.fov_y = fov_y;
  cam.width = width;
  cam.height = height;
  // Columns: +X = right, +Y = up, +Z = -forward (camera looks along -Z).
  Vec3f back = -forward;
  for (int r = 0; r < 3; ++r) {
    cam.world_from_camera.m[r][0] = right[r];
    cam.world_from_camera.m[r][1] = true_up[r];
    cam.world_from_camera.m[r][2] = back[r];
    cam.world_from_camera.m[r][3] = eye[r];
  }
  return cam;
}

Camera orbit_camera(int i, int n_frames, const Vec3f& center, float elevation, float radius,
                    float fov_y, int width, int height) {
  int wrapped = ((i % n_frames) + n_frames) % n_frames;
  float azimuth = kTwoPi * float(wrapped) / float(n_frames);
  Vec3f offset{radius * std::cos(elevation) * std::cos(azimuth), radius * std::sin(elevation),
               radius * std::cos(elevation) * std::sin(azimuth)};
  return make_look_at(center + offset, center, Vec3f{0, 1, 0}, fov_y, width, height);
}

std::vector<Camera> generate_orbit(int n_frames, const Vec3f& center, float elevation,
                                   float radius, float fov_y, int width, int height) {
  if (n_frames < 1) throw ConfigError("orbit needs at least one frame");
  if (!(radius > 0.0f)) throw ConfigError("orbit radius must be positive");
  std::vector<Camera> cams;
  cams.reserve(n_frames);
  for (int i = 0; i < n_frames; ++i)
    cams.push_back(orbit_camera(i, n_frames, center, elevation, radius, fov_y, width, height));
  return cams;
}

void save_cameras(const std::string& path, const std::vector<Camera>& cams) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(path + ": cannot open for writing");
  out << "# world_from_camera (row-major 4x4), fov_y (radians), width, height\n";
  char buf[64];
  for (const Camera& c : cams) {
    for (int r = 0; r < 4; ++r)
      for (int col = 0; col < 4; ++col) {
        std::snprintf(buf, sizeof(buf), "%.9g ", c.world_from_camera.m[r][col]);
        out << buf;
      }
    std::snprintf(buf, sizeof(buf), "%.9g %d %d\n", c.fov_y, c.width, c.height);
    out << buf;
  }
  if (!out) throw IoError(path + ": write failed");
}

std::vector<Camera> load_cameras(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path + ": cannot open for reading");
  std::vector<Camera> cams;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::istringstream ls(line);
    Camera c;
    bool got_any = false;
    float first;
    if (!(ls >> first)) continue;  // blank/comment line
    got_any = true;
    c.world_from_camera.m[0][0] = first;
    for (int k = 1; k < 16; ++k)
      if (!(ls >> c.world_from_camera.m[k / 4][k % 4]))
        throw IoError(path + ":" + std::to_string(line_no) + ": truncated camera record");
    if (!(ls >> c.fov_y >> c.width >> c.height))
      throw IoError(path + ":" + std::to_string(line_no) + ": truncated camera record");
    if (got_any) {
      c.validate();
      cams.push_back(c);
    }
  }
  if (cams.empty()) throw IoError(path + ": no camera records found");
  return cams;
}

}  // namespace matbake
