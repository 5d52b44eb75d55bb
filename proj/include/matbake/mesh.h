// Copyright (c) 2026 matbake contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "matbake/vecmath.h"

namespace matbake {

// Indexed triangle mesh with per-vertex normals and a UV parametrization.
// Geometry is fixed for the whole pipeline; only materials are optimized.
struct TriangleMesh {
  std::vector<Vec3f> positions;
  std::vector<Vec3f> normals;   // unit length, same size as positions
  std::vector<Vec2f> uvs;       // in [0,1]^2, same size as positions
  std::vector<std::array<uint32_t, 3>> triangles;
  AABB bounds;

  size_t vertex_count() const { return positions.size(); }
  size_t triangle_count() const { return triangles.size(); }

  void compute_bounds();
  // Area-weighted vertex normals from face geometry.
  void compute_vertex_normals();
  // Uniform rescale + translate so the bounding box is centered at the origin
  // with unit diagonal. Returns the applied scale.
  float normalize_to_unit_box();
  // Throws NumericError when an invariant is broken (bad index, non-unit
  // normal, missing attribute).
  void validate() const;
};

// Wavefront text format: v/vn/vt/f records, 1-based and negative indices,
// polygons fan-triangulated. UVs are mandatory (required later by the baker);
// missing normals are computed. Parse failures name the offending line.
TriangleMesh load_mesh(const std::string& path);

// Same parser over an in-memory buffer; `name` is used in error messages.
TriangleMesh parse_obj(const std::string& text, const std::string& name);

}  // namespace matbake
