// Copyright (c) 2026 matbake contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "matbake/mesh.h"
#include "matbake/vecmath.h"

namespace matbake {

struct Ray {
  Vec3f origin;
  Vec3f dir;  // unit length
  float t_min = 0.0f;
  float t_max = kInf;

  Vec3f at(float t) const { return origin + dir * t; }
};

struct Hit {
  uint32_t triangle = 0;
  float u = 0, v = 0;  // barycentric weights of vertices 1 and 2
  float t = kInf;
};

// Interpolated surface attributes at a hit point, ready for shading.
struct ShadePoint {
  Vec3f position;
  Vec3f normal;       // interpolated shading normal, unit, faces the ray
  Vec3f geom_normal;  // triangle plane normal, faces the ray
  Vec2f uv;
  Vec3f wo;  // unit direction toward the ray origin
};

// Moller-Trumbore; returns barycentrics/t on success. Degenerate triangles
// never report hits.
bool intersect_triangle(const Vec3f& p0, const Vec3f& p1, const Vec3f& p2, const Ray& ray,
                        float* t, float* u, float* v);

// Binary BVH, median split over the longest centroid axis. Immutable after
// construction; traversal is read-only and thread-safe.
class Bvh {
 public:
  explicit Bvh(const TriangleMesh& mesh);

  std::optional<Hit> intersect(const Ray& ray) const;
  bool intersect_any(const Ray& ray) const;  // occlusion query, early out

  const TriangleMesh& mesh() const { return *mesh_; }
  size_t node_count() const { return nodes_.size(); }

 private:
  struct Node {
    Vec3f lo;
    int32_t left;  // leaf: first index into prim order; inner: right child
    Vec3f hi;
    int32_t count;  // leaf: > 0, inner: 0
  };

  int32_t build(std::vector<uint32_t>& prims, int begin, int end,
                const std::vector<Vec3f>& centroids, const std::vector<AABB>& tri_bounds);

  const TriangleMesh* mesh_;
  std::vector<Node> nodes_;
  std::vector<uint32_t> prim_order_;
};

ShadePoint shade_point_from(const Hit& hit, const TriangleMesh& mesh, const Ray& ray);

// Mesh + acceleration structure + the self-intersection offset used when
// spawning secondary rays (1e-4 of the scene diagonal).
struct Scene {
  TriangleMesh mesh;
  Bvh bvh;
  float ray_epsilon;

  explicit Scene(TriangleMesh m)
      : mesh(std::move(m)), bvh(mesh), ray_epsilon(1e-4f * std::max(mesh.bounds.diagonal(), 1e-6f)) {}

  std::optional<Hit> intersect(const Ray& ray) const { return bvh.intersect(ray); }
  bool occluded(const Vec3f& from, const Vec3f& offset_normal, const Vec3f& dir) const {
    Ray shadow;
    shadow.origin = from + offset_normal * ray_epsilon;
    shadow.dir = dir;
    shadow.t_min = 0.0f;
    return bvh.intersect_any(shadow);
  }
};

}  // namespace matbake
