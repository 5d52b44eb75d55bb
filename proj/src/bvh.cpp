// Copyright (c) 2026 matbake contributors
// SPDX-License-Identifier: Apache-2.0

#include "matbake/bvh.h"

#include <algorithm>

#include "matbake/error.h"

namespace matbake {

bool intersect_triangle(const Vec3f& p0, const Vec3f& p1, const Vec3f& p2, const Ray& ray,
                        float* t, float* u, float* v) {
  Vec3f e1 = p1 - p0;
  Vec3f e2 = p2 - p0;
  Vec3f pvec = cross(ray.dir, e2);
  float det = dot(e1, pvec);
  if (std::abs(det) < 1e-12f) return false;  // parallel or degenerate
  float inv_det = 1.0f / det;
  Vec3f tvec = ray.origin - p0;
  float bu = dot(tvec, pvec) * inv_det;
  if (bu < -1e-7f || bu > 1.0f + 1e-7f) return false;
  Vec3f qvec = cross(tvec, e1);
  float bv = dot(ray.dir, qvec) * inv_det;
  if (bv < -1e-7f || bu + bv > 1.0f + 1e-7f) return false;
  float bt = dot(e2, qvec) * inv_det;
  if (bt < ray.t_min || bt > ray.t_max) return false;
  *t = bt;
  *u = clampf(bu, 0.0f, 1.0f);
  *v = clampf(bv, 0.0f, 1.0f - *u);
  return true;
}

namespace {

inline bool intersect_aabb(const Vec3f& lo, const Vec3f& hi, const Vec3f& origin,
                           const Vec3f& inv_dir, float t_max, float* t_enter) {
  float t0 = (lo.x - origin.x) * inv_dir.x;
  float t1 = (hi.x - origin.x) * inv_dir.x;
  float tmin = std::min(t0, t1);
  float tmax = std::max(t0, t1);
  t0 = (lo.y - origin.y) * inv_dir.y;
  t1 = (hi.y - origin.y) * inv_dir.y;
  tmin = std::max(tmin, std::min(t0, t1));
  tmax = std::min(tmax, std::max(t0, t1));
  t0 = (lo.z - origin.z) * inv_dir.z;
  t1 = (hi.z - origin.z) * inv_dir.z;
  tmin = std::max(tmin, std::min(t0, t1));
  tmax = std::min(tmax, std::max(t0, t1));
  // 1e-4 slack absorbs rounding in the slab test at box boundaries.
  if (tmax * 1.0001f < tmin || tmin > t_max || tmax < 0.0f) return false;
  *t_enter = tmin;
  return true;
}

constexpr int kLeafSize = 4;

}  // namespace

Bvh::Bvh(const TriangleMesh& mesh) : mesh_(&mesh) {
  size_t n = mesh.triangle_count();
  if (n == 0) throw NumericError("cannot build a BVH over an empty mesh");

  std::vector<AABB> tri_bounds(n);
  std::vector<Vec3f> centroids(n);
  for (size_t i = 0; i < n; ++i) {
    const auto& tri = mesh.triangles[i];
    AABB b;
    b.grow(mesh.positions[tri[0]]);
    b.grow(mesh.positions[tri[1]]);
    b.grow(mesh.positions[tri[2]]);
    tri_bounds[i] = b;
    centroids[i] = b.center();
  }

  prim_order_.resize(n);
  for (size_t i = 0; i < n; ++i) prim_order_[i] = uint32_t(i);
  nodes_.reserve(2 * n);
  build(prim_order_, 0, int(n), centroids, tri_bounds);
}

int32_t Bvh::build(std::vector<uint32_t>& prims, int begin, int end,
                   const std::vector<Vec3f>& centroids, const std::vector<AABB>& tri_bounds) {
  int32_t node_index = int32_t(nodes_.size());
  nodes_.emplace_back();

  AABB bounds, cbounds;
  for (int i = begin; i < end; ++i) {
    bounds.grow(tri_bounds[prims[i]]);
    cbounds.grow(centroids[prims[i]]);
  }
  nodes_[node_index].lo = bounds.lo;
  nodes_[node_index].hi = bounds.hi;

  int count = end - begin;
  Vec3f cext = cbounds.extent();
  int axis = cext.x >= cext.y ? (cext.x >= cext.z ? 0 : 2) : (cext.y >= cext.z ? 1 : 2);
  if (count <= kLeafSize || cext[axis] <= 0.0f) {
    nodes_[node_index].left = begin;
    nodes_[node_index].count = count;
    return node_index;
  }

  int mid = begin + count / 2;
  std::nth_element(prims.begin() + begin, prims.begin() + mid, prims.begin() + end,
                   [&](uint32_t a, uint32_t b) {
                     if (centroids[a][axis] != centroids[b][axis])
                       return centroids[a][axis] < centroids[b][axis];
                     return a < b;  // stable order for determinism
                   });

  nodes_[node_index].count = 0;
  build(prims, begin, mid, centroids, tri_bounds);
  nodes_[node_index].left = build(prims, mid, end, centroids, tri_bounds);
  return node_index;
}

std::optional<Hit> Bvh::intersect(const Ray& ray) const {
  Vec3f inv_dir{1.0f / ray.dir.x, 1.0f / ray.dir.y, 1.0f / ray.dir.z};
  Hit best;
  best.t = ray.t_max;
  bool found = false;

  int32_t stack[64];
  int sp = 0;
  stack[sp++] = 0;
  while (sp > 0) {
    const Node& node = nodes_[stack[--sp]];
    float t_enter;
    if (!intersect_aabb(node.lo, node.hi, ray.origin, inv_dir, best.t, &t_enter)) continue;
    if (node.count > 0) {
      for (int i = 0; i < node.count; ++i) {
        uint32_t tri_idx = prim_order_[node.left + i];
        const auto& tri = mesh_->triangles[tri_idx];
        Ray clipped = ray;
        clipped.t_max = best.t;
        float t, u, v;
        if (intersect_triangle(mesh_->positions[tri[0]], mesh_->positions[tri[1]],
                               mesh_->positions[tri[2]], clipped, &t, &u, &v)) {
          best = Hit{tri_idx, u, v, t};
          found = true;
        }
      }
    } else {
      // Near child first: children are (node+1) and node.left.
      int32_t near_child = int32_t(&node - nodes_.data()) + 1;
      int32_t far_child = node.left;
      float t_near, t_far;
      bool hit_near =
          intersect_aabb(nodes_[near_child].lo, nodes_[near_child].hi, ray.origin, inv_dir,
                         best.t, &t_near);
      bool hit_far = intersect_aabb(nodes_[far_child].lo, nodes_[far_child].hi, ray.origin,
                                    inv_dir, best.t, &t_far);
      if (hit_near && hit_far) {
        if (t_far < t_near) std::swap(near_child, far_child);
        stack[sp++] = far_child;
        stack[sp++] = near_child;
      } else if (hit_near) {
        stack[sp++] = near_child;
      } else if (hit_far) {
        stack[sp++] = far_child;
      }
    }
  }
  if (!found) return std::nullopt;
  return best;
}

bool Bvh::intersect_any(const Ray& ray) const {
  Vec3f inv_dir{1.0f / ray.dir.x, 1.0f / ray.dir.y, 1.0f / ray.dir.z};
  int32_t stack[64];
  int sp = 0;
  stack[sp++] = 0;
  while (sp > 0) {
    const Node& node = nodes_[stack[--sp]];
    float t_enter;
    if (!intersect_aabb(node.lo, node.hi, ray.origin, inv_dir, ray.t_max, &t_enter)) continue;
    if (node.count > 0) {
      for (int i = 0; i < node.count; ++i) {
        uint32_t tri_idx = prim_order_[node.left + i];
        const auto& tri = mesh_->triangles[tri_idx];
        float t, u, v;
        if (intersect_triangle(mesh_->positions[tri[0]], mesh_->positions[tri[1]],
                               mesh_->positions[tri[2]], ray, &t, &u, &v))
          return true;
      }
    } else {
      stack[sp++] = int32_t(&node - nodes_.data()) + 1;
      stack[sp++] = node.left;
    }
  }
  return false;
}

ShadePoint shade_point_from(const Hit& hit, const TriangleMesh& mesh, const Ray& ray) {
  const auto& tri = mesh.triangles[hit.triangle];
  float w0 = 1.0f - hit.u - hit.v;

  ShadePoint sp;
  sp.position = ray.at(hit.t);
  sp.wo = -ray.dir;
  sp.uv = mesh.uvs[tri[0]] * w0 + mesh.uvs[tri[1]] * hit.u + mesh.uvs[tri[2]] * hit.v;

  Vec3f n = mesh.normals[tri[0]] * w0 + mesh.normals[tri[1]] * hit.u + mesh.normals[tri[2]] * hit.v;
  float len = length(n);
  n = len > 1e-20f ? n / len : Vec3f{0, 1, 0};

  Vec3f e1 = mesh.positions[tri[1]] - mesh.positions[tri[0]];
  Vec3f e2 = mesh.positions[tri[2]] - mesh.positions[tri[0]];
  Vec3f ng = cross(e1, e2);
  float glen = length(ng);
  ng = glen > 1e-20f ? ng / glen : n;

  // Two-sided shading: orient both normals toward the incoming ray.
  if (dot(ng, sp.wo) < 0.0f) {
    ng = -ng;
    n = -n;
  }
  if (dot(n, sp.wo) <= 0.0f) n = ng;  // grazing interpolated normal fallback

  sp.normal = n;
  sp.geom_normal = ng;
  return sp;
}

}  // namespace matbake
