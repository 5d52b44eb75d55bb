// Copyright (c) 2026 matbake contributors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include "matbake/error.h"
#include "matbake/mesh.h"

using namespace matbake;

namespace {

// A unit cube authored inline: 8 positions, shared UVs, quad faces.
const char* kCubeObj = R"(# unit cube
v -0.5 -0.5 -0.5
v  0.5 -0.5 -0.5
v  0.5  0.5 -0.5
v -0.5  0.5 -0.5
v -0.5 -0.5  0.5
v  0.5 -0.5  0.5
v  0.5  0.5  0.5
v -0.5  0.5  0.5
vt 0 0
vt 1 0
vt 1 1
vt 0 1
f 1/1 2/2 3/3 4/4
f 6/1 5/2 8/3 7/4
f 5/1 1/2 4/3 8/4
f 2/1 6/2 7/3 3/4
f 4/1 3/2 7/3 8/4
f 5/1 6/2 2/3 1/4
)";

}  // namespace

TEST(LoadMesh, UnitCubeTwelveTriangles) {
  TriangleMesh mesh = parse_obj(kCubeObj, "cube.obj");
  EXPECT_EQ(mesh.triangle_count(), 12u);  // 6 quads fan-triangulated
  EXPECT_NEAR(mesh.bounds.lo.x, -0.5f, 1e-6f);
  EXPECT_NEAR(mesh.bounds.lo.y, -0.5f, 1e-6f);
  EXPECT_NEAR(mesh.bounds.lo.z, -0.5f, 1e-6f);
  EXPECT_NEAR(mesh.bounds.hi.x, 0.5f, 1e-6f);
  EXPECT_NEAR(mesh.bounds.hi.y, 0.5f, 1e-6f);
  EXPECT_NEAR(mesh.bounds.hi.z, 0.5f, 1e-6f);
  // No vn records: normals must be computed and unit length.
  for (const Vec3f& n : mesh.normals) EXPECT_NEAR(length(n), 1.0f, 1e-4f);
}

TEST(LoadMesh, QuadFanTriangulation) {
  const char* quad =
      "v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\n"
      "vt 0 0\nvt 1 0\nvt 1 1\nvt 0 1\n"
      "f 1/1 2/2 3/3 4/4\n";
  TriangleMesh mesh = parse_obj(quad, "quad.obj");
  ASSERT_EQ(mesh.triangle_count(), 2u);
  // Both triangles share the fan diagonal (corners 0 and 2).
  EXPECT_EQ(mesh.triangles[0][0], mesh.triangles[1][0]);
  EXPECT_EQ(mesh.triangles[0][2], mesh.triangles[1][1]);
}

TEST(LoadMesh, OutOfBoundsIndexFails) {
  const char* bad =
      "v 0 0 0\nv 1 0 0\nv 0 1 0\n"
      "vt 0 0\n"
      "f 1/1 2/1 99/1\n";
  EXPECT_THROW(parse_obj(bad, "bad.obj"), IoError);
  try {
    parse_obj(bad, "bad.obj");
  } catch (const IoError& e) {
    EXPECT_NE(std::string(e.what()).find("bad.obj:5"), std::string::npos) << e.what();
  }
}

TEST(LoadMesh, MalformedVertexNamesLine) {
  const char* bad = "v 0 0\n";
  try {
    parse_obj(bad, "m.obj");
    FAIL() << "expected parse error";
  } catch (const IoError& e) {
    EXPECT_NE(std::string(e.what()).find("m.obj:1"), std::string::npos) << e.what();
  }
}

TEST(LoadMesh, MissingUvsRejected) {
  const char* no_uv = "v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\n";
  EXPECT_THROW(parse_obj(no_uv, "nouv.obj"), IoError);
}

TEST(LoadMesh, NegativeIndices) {
  const char* neg =
      "v 0 0 0\nv 1 0 0\nv 0 1 0\n"
      "vt 0 0\nvt 1 0\nvt 0 1\n"
      "vn 0 0 1\n"
      "f -3/-3/-1 -2/-2/-1 -1/-1/-1\n";
  TriangleMesh mesh = parse_obj(neg, "neg.obj");
  ASSERT_EQ(mesh.triangle_count(), 1u);
  EXPECT_EQ(mesh.positions[mesh.triangles[0][1]].x, 1.0f);
}

TEST(LoadMesh, MissingFileError) { EXPECT_THROW(load_mesh("/nonexistent/mesh.obj"), IoError); }

TEST(Mesh, NormalizeToUnitBox) {
  TriangleMesh mesh = parse_obj(kCubeObj, "cube.obj");
  for (Vec3f& p : mesh.positions) p = p * 4.0f + Vec3f{10, 0, -3};
  mesh.normalize_to_unit_box();
  EXPECT_NEAR(mesh.bounds.diagonal(), 1.0f, 1e-5f);
  Vec3f c = mesh.bounds.center();
  EXPECT_NEAR(c.x, 0.0f, 1e-5f);
  EXPECT_NEAR(c.y, 0.0f, 1e-5f);
  EXPECT_NEAR(c.z, 0.0f, 1e-5f);
}

TEST(Mesh, ValidateCatchesBadNormal) {
  TriangleMesh mesh = parse_obj(kCubeObj, "cube.obj");
  mesh.normals[0] = {0, 0, 2.0f};
  EXPECT_THROW(mesh.validate(), NumericError);
}
