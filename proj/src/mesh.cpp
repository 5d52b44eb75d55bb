// Copyright (c) 2026 matbake contributors
// SPDX-License-Identifier: Apache-2.0

#include "matbake/mesh.h"

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "matbake/error.h"

namespace matbake {

void TriangleMesh::compute_bounds() {
  bounds = AABB{};
  for (const Vec3f& p : positions) bounds.grow(p);
}

void TriangleMesh::compute_vertex_normals() {
  normals.assign(positions.size(), Vec3f{0, 0, 0});
  for (const auto& tri : triangles) {
    const Vec3f& a = positions[tri[0]];
    const Vec3f& b = positions[tri[1]];
    const Vec3f& c = positions[tri[2]];
    Vec3f fn = cross(b - a, c - a);  // length = 2x area, weights by area
    normals[tri[0]] += fn;
    normals[tri[1]] += fn;
    normals[tri[2]] += fn;
  }
  for (Vec3f& n : normals) {
    float len = length(n);
    n = len > 1e-20f ? n / len : Vec3f{0, 1, 0};
  }
}

float TriangleMesh::normalize_to_unit_box() {
  compute_bounds();
  if (!bounds.valid()) return 1.0f;
  Vec3f center = bounds.center();
  float diag = bounds.diagonal();
  float scale = diag > 1e-20f ? 1.0f / diag : 1.0f;
  for (Vec3f& p : positions) p = (p - center) * scale;
  compute_bounds();
  return scale;
}

void TriangleMesh::validate() const {
  if (normals.size() != positions.size() || uvs.size() != positions.size())
    throw NumericError("mesh attribute arrays must match the vertex count");
  for (const auto& tri : triangles)
    for (uint32_t idx : tri)
      if (idx >= positions.size())
        throw NumericError("triangle index " + std::to_string(idx) + " out of bounds (" +
                           std::to_string(positions.size()) + " vertices)");
  for (const Vec3f& n : normals) {
    float len = length(n);
    if (std::abs(len - 1.0f) > 1e-4f)
      throw NumericError("vertex normal has length " + std::to_string(len));
  }
}

namespace {

struct ObjIndex {
  int v = 0, vt = 0, vn = 0;
  bool operator<(const ObjIndex& o) const {
    if (v != o.v) return v < o.v;
    if (vt != o.vt) return vt < o.vt;
    return vn < o.vn;
  }
};

[[noreturn]] void fail_parse(const std::string& name, int line, const std::string& what) {
  throw IoError(name + ":" + std::to_string(line) + ": " + what);
}

// Resolves a 1-based or negative OBJ index against the current array size.
int resolve_index(int idx, size_t count, const std::string& name, int line) {
  int resolved = idx > 0 ? idx - 1 : int(count) + idx;
  if (idx == 0 || resolved < 0 || resolved >= int(count))
    fail_parse(name, line, "vertex index " + std::to_string(idx) + " out of range (have " +
                               std::to_string(count) + ")");
  return resolved;
}

ObjIndex parse_face_corner(const std::string& token, const std::string& name, int line) {
  ObjIndex out;
  int fields[3] = {0, 0, 0};
  size_t pos = 0;
  for (int f = 0; f < 3 && pos <= token.size(); ++f) {
    size_t next = token.find('/', pos);
    std::string part = token.substr(pos, next == std::string::npos ? next : next - pos);
    if (!part.empty()) {
      try {
        fields[f] = std::stoi(part);
      } catch (...) {
        fail_parse(name, line, "bad face index '" + token + "'");
      }
    }
    if (next == std::string::npos) break;
    pos = next + 1;
  }
  out.v = fields[0];
  out.vt = fields[1];
  out.vn = fields[2];
  if (out.v == 0) fail_parse(name, line, "face corner missing position index");
  return out;
}

}  // namespace

TriangleMesh parse_obj(const std::string& text, const std::string& name) {
  std::vector<Vec3f> obj_positions;
  std::vector<Vec2f> obj_uvs;
  std::vector<Vec3f> obj_normals;

  TriangleMesh mesh;
  std::map<ObjIndex, uint32_t> corner_cache;
  bool any_missing_normal = false;
  bool any_missing_uv = false;

  auto emit_corner = [&](const ObjIndex& raw, int line) -> uint32_t {
    ObjIndex key;
    key.v = resolve_index(raw.v, obj_positions.size(), name, line);
    key.vt = raw.vt != 0 ? resolve_index(raw.vt, obj_uvs.size(), name, line) : -1;
    key.vn = raw.vn != 0 ? resolve_index(raw.vn, obj_normals.size(), name, line) : -1;
    auto it = corner_cache.find(key);
    if (it != corner_cache.end()) return it->second;

    uint32_t idx = uint32_t(mesh.positions.size());
    mesh.positions.push_back(obj_positions[key.v]);
    if (key.vt >= 0) {
      mesh.uvs.push_back(obj_uvs[key.vt]);
    } else {
      mesh.uvs.push_back(Vec2f{0, 0});
      any_missing_uv = true;
    }
    if (key.vn >= 0) {
      mesh.normals.push_back(obj_normals[key.vn]);
    } else {
      mesh.normals.push_back(Vec3f{0, 0, 0});
      any_missing_normal = true;
    }
    corner_cache.emplace(key, idx);
    return idx;
  };

  std::istringstream stream(text);
  std::string line;
  int line_no = 0;
  while (std::getline(stream, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag) || tag[0] == '#') continue;

    if (tag == "v") {
      Vec3f p;
      if (!(ls >> p.x >> p.y >> p.z)) fail_parse(name, line_no, "malformed vertex position");
      obj_positions.push_back(p);
    } else if (tag == "vt") {
      Vec2f t;
      if (!(ls >> t.x >> t.y)) fail_parse(name, line_no, "malformed texture coordinate");
      obj_uvs.push_back(t);
    } else if (tag == "vn") {
      Vec3f n;
      if (!(ls >> n.x >> n.y >> n.z)) fail_parse(name, line_no, "malformed normal");
      float len = length(n);
      obj_normals.push_back(len > 1e-20f ? n / len : Vec3f{0, 1, 0});
    } else if (tag == "f") {
      std::vector<uint32_t> corners;
      std::string token;
      while (ls >> token) corners.push_back(emit_corner(parse_face_corner(token, name, line_no), line_no));
      if (corners.size() < 3) fail_parse(name, line_no, "face with fewer than 3 vertices");
      for (size_t i = 2; i < corners.size(); ++i)
        mesh.triangles.push_back({corners[0], corners[i - 1], corners[i]});
    }
    // Other records (o, g, s, usemtl, mtllib, ...) are ignored.
  }

  if (mesh.triangles.empty()) fail_parse(name, line_no, "no faces found");
  if (any_missing_uv)
    throw IoError(name + ": mesh has faces without texture coordinates; UVs are required");
  if (any_missing_normal) mesh.compute_vertex_normals();
  mesh.compute_bounds();
  mesh.validate();
  return mesh;
}

TriangleMesh load_mesh(const std::string& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw IoError(path + ": cannot open for reading");
  std::ostringstream buf;
  buf << file.rdbuf();
  return parse_obj(buf.str(), path);
}

}  // namespace matbake
