// Copyright (c) 2026 matbake contributors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include "matbake/bvh.h"
#include "matbake/camera.h"
#include "matbake/rng.h"
#include "testutil.h"

using namespace matbake;
using namespace matbake::testutil;

namespace {

// Brute-force nearest hit: loops every triangle. Shares only the low-level
// triangle test with the implementation; the traversal logic under test is
// bypassed entirely.
std::optional<Hit> brute_force_intersect(const TriangleMesh& mesh, const Ray& ray) {
  Hit best;
  best.t = ray.t_max;
  bool found = false;
  for (uint32_t i = 0; i < mesh.triangle_count(); ++i) {
    const auto& tri = mesh.triangles[i];
    Ray clipped = ray;
    clipped.t_max = best.t;
    float t, u, v;
    if (intersect_triangle(mesh.positions[tri[0]], mesh.positions[tri[1]],
                           mesh.positions[tri[2]], clipped, &t, &u, &v)) {
      best = Hit{i, u, v, t};
      found = true;
    }
  }
  if (!found) return std::nullopt;
  return best;
}

Vec3f random_unit(Rng& rng) {
  while (true) {
    Vec3f v{rng.next_float() * 2 - 1, rng.next_float() * 2 - 1, rng.next_float() * 2 - 1};
    float l = length(v);
    if (l > 1e-3f && l < 1.0f) return v / l;
  }
}

}  // namespace

TEST(Bvh, SingleTriangleLeaf) {
  TriangleMesh mesh;
  mesh.positions = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
  mesh.normals = {{0, 0, 1}, {0, 0, 1}, {0, 0, 1}};
  mesh.uvs = {{0, 0}, {1, 0}, {0, 1}};
  mesh.triangles = {{0, 1, 2}};
  mesh.compute_bounds();
  Bvh bvh(mesh);
  EXPECT_EQ(bvh.node_count(), 1u);

  Ray ray{{0.2f, 0.2f, 1.0f}, {0, 0, -1}};
  auto hit = bvh.intersect(ray);
  ASSERT_TRUE(hit.has_value());
  EXPECT_NEAR(hit->t, 1.0f, 1e-6f);
}

TEST(Bvh, MatchesBruteForceOnSphere) {
  TriangleMesh mesh = make_sphere(1.0f, 100, 50);  // 10k triangles
  ASSERT_GE(mesh.triangle_count(), 9000u);
  Bvh bvh(mesh);

  Rng rng(42, 1);
  int tested = 0;
  for (int i = 0; i < 1000; ++i) {
    Ray ray;
    ray.origin = random_unit(rng) * (1.5f + rng.next_float() * 2.0f);
    // Aim at a jittered point near the sphere so most rays hit.
    Vec3f target = random_unit(rng) * (1.1f * rng.next_float());
    ray.dir = normalize(target - ray.origin);
    auto a = bvh.intersect(ray);
    auto b = brute_force_intersect(mesh, ray);
    ASSERT_EQ(a.has_value(), b.has_value()) << "ray " << i;
    if (a) {
      EXPECT_EQ(a->triangle, b->triangle) << "ray " << i;
      EXPECT_NEAR(a->t, b->t, 1e-6f * std::max(1.0f, b->t));
      ++tested;
    }
  }
  EXPECT_GT(tested, 300);  // sanity: a healthy fraction actually hit
}

TEST(Bvh, MissesWholeBoundingBox) {
  TriangleMesh mesh = make_sphere(1.0f, 16, 8);
  Bvh bvh(mesh);
  Ray ray{{5, 5, 5}, normalize(Vec3f{1, 0.2f, 0.1f})};
  EXPECT_FALSE(bvh.intersect(ray).has_value());
  EXPECT_FALSE(bvh.intersect_any(ray));
}

TEST(Bvh, AnalyticSphereDistance) {
  TriangleMesh mesh = make_sphere(1.0f, 256, 128);
  Bvh bvh(mesh);
  Ray ray{{0, 0, 3}, {0, 0, -1}};
  auto hit = bvh.intersect(ray);
  ASSERT_TRUE(hit.has_value());
  EXPECT_NEAR(hit->t, 2.0f, 1e-2f);
}

TEST(Bvh, TangentRayNeverNegativeT) {
  TriangleMesh mesh = make_sphere(1.0f, 64, 32);
  Bvh bvh(mesh);
  for (float offset : {0.999f, 1.0f, 1.001f}) {
    Ray ray{{offset, 0, 3}, {0, 0, -1}};
    auto hit = bvh.intersect(ray);
    if (hit) EXPECT_GE(hit->t, 0.0f);
  }
}

TEST(Bvh, OriginInsideMeshFindsForwardHit) {
  TriangleMesh mesh = make_sphere(1.0f, 64, 32);
  Bvh bvh(mesh);
  Ray ray{{0, 0, 0}, normalize(Vec3f{0.3f, 0.4f, 0.86f})};
  auto hit = bvh.intersect(ray);
  ASSERT_TRUE(hit.has_value());
  EXPECT_NEAR(hit->t, 1.0f, 1e-2f);
}

TEST(Bvh, WatertightSphereOrbitRender) {
  // Closed sphere viewed from an orbit: no interior pixel may miss at 512^2.
  TriangleMesh mesh = make_sphere(1.0f, 96, 48);
  Bvh bvh(mesh);
  Camera cam = make_look_at(Vec3f{0, 0.8f, 2.6f}, Vec3f{0, 0, 0}, Vec3f{0, 1, 0}, 0.7f, 512,
                            512);
  int holes = 0;
  for (int y = 0; y < 512; ++y)
    for (int x = 0; x < 512; ++x) {
      Ray ray{cam.origin(), cam.ray_direction(x + 0.5f, y + 0.5f)};
      bool hit = bvh.intersect(ray).has_value();
      if (hit) continue;
      // A miss is a hole only when the exact sphere would have been hit
      // away from the silhouette (5e-3 margin accounts for tessellation).
      float b = dot(ray.dir, -ray.origin);
      float d2 = dot(ray.origin, ray.origin) - b * b;
      if (d2 < 1.0f - 5e-3f) ++holes;
    }
  EXPECT_EQ(holes, 0);
}

TEST(Bvh, DegenerateTrianglesNeverHit) {
  TriangleMesh mesh;
  mesh.positions = {{0, 0, 0}, {1, 0, 0}, {2, 0, 0}, {0, 1, 0}, {1, 1, 0}, {0, 2, 0}};
  mesh.normals.assign(6, Vec3f{0, 0, 1});
  mesh.uvs.assign(6, Vec2f{0, 0});
  mesh.triangles = {{0, 1, 2}, {3, 4, 5}};  // first is collinear
  mesh.compute_bounds();
  Bvh bvh(mesh);
  Ray ray{{0.9f, 0.0f, 1.0f}, {0, 0, -1}};  // passes through the degenerate one
  auto hit = bvh.intersect(ray);
  EXPECT_FALSE(hit.has_value());
}

TEST(ShadePoint, VertexAttributesAtCorners) {
  TriangleMesh mesh;
  mesh.positions = {{0, 0, 0}, {2, 0, 0}, {0, 2, 0}};
  mesh.normals = {normalize(Vec3f{0, 0.2f, 1}), normalize(Vec3f{0.2f, 0, 1}),
                  normalize(Vec3f{0, 0, 1})};
  mesh.uvs = {{0.1f, 0.2f}, {0.9f, 0.1f}, {0.3f, 0.8f}};
  mesh.triangles = {{0, 1, 2}};
  mesh.compute_bounds();

  // Barycentric weights (1,0,0): exactly vertex 0.
  Ray ray{{0, 0, 1}, {0, 0, -1}};
  Hit hit{0, 0.0f, 0.0f, 1.0f};
  ShadePoint sp = shade_point_from(hit, mesh, ray);
  EXPECT_NEAR(sp.uv.x, 0.1f, 1e-6f);
  EXPECT_NEAR(sp.uv.y, 0.2f, 1e-6f);
  EXPECT_NEAR(dot(sp.normal, mesh.normals[0]), 1.0f, 1e-6f);

  // Centroid of a flat triangle: normal equals the face normal.
  mesh.normals = {{0, 0, 1}, {0, 0, 1}, {0, 0, 1}};
  Hit centroid{0, 1.0f / 3.0f, 1.0f / 3.0f, 1.0f};
  ShadePoint spc = shade_point_from(centroid, mesh, ray);
  EXPECT_NEAR(spc.normal.z, 1.0f, 1e-6f);
}

TEST(ShadePoint, BackFaceHitFlipsTowardRay) {
  TriangleMesh mesh;
  mesh.positions = {{0, 0, 0}, {2, 0, 0}, {0, 2, 0}};
  mesh.normals = {{0, 0, 1}, {0, 0, 1}, {0, 0, 1}};
  mesh.uvs = {{0, 0}, {1, 0}, {0, 1}};
  mesh.triangles = {{0, 1, 2}};
  mesh.compute_bounds();

  Ray ray{{0.3f, 0.3f, -1.0f}, {0, 0, 1}};  // hits the back side
  Hit hit{0, 0.15f, 0.15f, 1.0f};
  ShadePoint sp = shade_point_from(hit, mesh, ray);
  EXPECT_GT(dot(sp.normal, sp.wo), 0.0f);
  EXPECT_GT(dot(sp.geom_normal, sp.wo), 0.0f);
}

TEST(ShadePoint, BarycentricPartition) {
  // Weights reconstruct vertex positions exactly at the vertices.
  TriangleMesh mesh;
  mesh.positions = {{0.3f, -1, 2}, {4, 0.5f, -2}, {-1, 3, 0.7f}};
  mesh.normals = {{0, 0, 1}, {0, 0, 1}, {0, 0, 1}};
  mesh.uvs = {{0, 0}, {1, 0}, {0, 1}};
  mesh.triangles = {{0, 1, 2}};
  mesh.compute_bounds();
  const float bary[3][2] = {{0, 0}, {1, 0}, {0, 1}};
  for (int v = 0; v < 3; ++v) {
    float w0 = 1.0f - bary[v][0] - bary[v][1];
    Vec3f p = mesh.positions[0] * w0 + mesh.positions[1] * bary[v][0] +
              mesh.positions[2] * bary[v][1];
    EXPECT_EQ(p, mesh.positions[v]);
  }
}
