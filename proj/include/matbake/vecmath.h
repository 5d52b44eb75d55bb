// Copyright (c) 2026 matbake contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

namespace matbake {

constexpr float kPi = 3.14159265358979323846f;
constexpr float kTwoPi = 2.0f * kPi;
constexpr float kInvPi = 1.0f / kPi;
constexpr float kInf = std::numeric_limits<float>::infinity();

inline float clampf(float x, float lo, float hi) { return std::min(std::max(x, lo), hi); }
inline float saturate(float x) { return clampf(x, 0.0f, 1.0f); }
inline float lerp(float a, float b, float t) { return a + (b - a) * t; }
inline float sqr(float x) { return x * x; }

struct Vec2f {
  float x = 0, y = 0;

  Vec2f() = default;
  Vec2f(float x_, float y_) : x(x_), y(y_) {}

  Vec2f operator+(const Vec2f& o) const { return {x + o.x, y + o.y}; }
  Vec2f operator-(const Vec2f& o) const { return {x - o.x, y - o.y}; }
  Vec2f operator*(float s) const { return {x * s, y * s}; }
  float& operator[](int i) { return (&x)[i]; }
  float operator[](int i) const { return (&x)[i]; }
};

struct Vec3f {
  float x = 0, y = 0, z = 0;

  Vec3f() = default;
  Vec3f(float x_, float y_, float z_) : x(x_), y(y_), z(z_) {}
  explicit Vec3f(float s) : x(s), y(s), z(s) {}

  Vec3f operator+(const Vec3f& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3f operator-(const Vec3f& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3f operator-() const { return {-x, -y, -z}; }
  Vec3f operator*(const Vec3f& o) const { return {x * o.x, y * o.y, z * o.z}; }
  Vec3f operator*(float s) const { return {x * s, y * s, z * s}; }
  Vec3f operator/(const Vec3f& o) const { return {x / o.x, y / o.y, z / o.z}; }
  Vec3f operator/(float s) const { return {x / s, y / s, z / s}; }
  Vec3f& operator+=(const Vec3f& o) { x += o.x; y += o.y; z += o.z; return *this; }
  Vec3f& operator-=(const Vec3f& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
  Vec3f& operator*=(const Vec3f& o) { x *= o.x; y *= o.y; z *= o.z; return *this; }
  Vec3f& operator*=(float s) { x *= s; y *= s; z *= s; return *this; }
  bool operator==(const Vec3f& o) const { return x == o.x && y == o.y && z == o.z; }
  float& operator[](int i) { return (&x)[i]; }
  float operator[](int i) const { return (&x)[i]; }
};

inline Vec3f operator*(float s, const Vec3f& v) { return v * s; }

inline float dot(const Vec3f& a, const Vec3f& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3f cross(const Vec3f& a, const Vec3f& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline float length_squared(const Vec3f& v) { return dot(v, v); }
inline float length(const Vec3f& v) { return std::sqrt(dot(v, v)); }
inline Vec3f normalize(const Vec3f& v) { return v / length(v); }
inline Vec3f min(const Vec3f& a, const Vec3f& b) {
  return {std::min(a.x, b.x), std::min(a.y, b.y), std::min(a.z, b.z)};
}
inline Vec3f max(const Vec3f& a, const Vec3f& b) {
  return {std::max(a.x, b.x), std::max(a.y, b.y), std::max(a.z, b.z)};
}
inline Vec3f clamp(const Vec3f& v, float lo, float hi) {
  return {clampf(v.x, lo, hi), clampf(v.y, lo, hi), clampf(v.z, lo, hi)};
}
inline Vec3f lerp(const Vec3f& a, const Vec3f& b, float t) { return a + (b - a) * t; }
inline Vec3f reflect(const Vec3f& v, const Vec3f& n) { return n * (2.0f * dot(v, n)) - v; }
inline float max_component(const Vec3f& v) { return std::max(v.x, std::max(v.y, v.z)); }
inline float mean(const Vec3f& v) { return (v.x + v.y + v.z) * (1.0f / 3.0f); }
inline bool all_finite(const Vec3f& v) {
  return std::isfinite(v.x) && std::isfinite(v.y) && std::isfinite(v.z);
}

// Rec.709 luminance of a linear RGB color.
inline float luminance(const Vec3f& c) { return 0.2126f * c.x + 0.7152f * c.y + 0.0722f * c.z; }

struct AABB {
  Vec3f lo{kInf, kInf, kInf};
  Vec3f hi{-kInf, -kInf, -kInf};

  void grow(const Vec3f& p) { lo = min(lo, p); hi = max(hi, p); }
  void grow(const AABB& b) { lo = min(lo, b.lo); hi = max(hi, b.hi); }
  Vec3f center() const { return (lo + hi) * 0.5f; }
  Vec3f extent() const { return hi - lo; }
  float diagonal() const { return length(hi - lo); }
  bool valid() const { return lo.x <= hi.x && lo.y <= hi.y && lo.z <= hi.z; }
};

// Row-major 4x4, treated as an affine transform on points/vectors.
struct Mat4 {
  float m[4][4] = {{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}};

  static Mat4 identity() { return Mat4{}; }

  Vec3f transform_point(const Vec3f& p) const {
    return {m[0][0] * p.x + m[0][1] * p.y + m[0][2] * p.z + m[0][3],
            m[1][0] * p.x + m[1][1] * p.y + m[1][2] * p.z + m[1][3],
            m[2][0] * p.x + m[2][1] * p.y + m[2][2] * p.z + m[2][3]};
  }
  Vec3f transform_vector(const Vec3f& v) const {
    return {m[0][0] * v.x + m[0][1] * v.y + m[0][2] * v.z,
            m[1][0] * v.x + m[1][1] * v.y + m[1][2] * v.z,
            m[2][0] * v.x + m[2][1] * v.y + m[2][2] * v.z};
  }
  // Rotation-transpose applied to a vector; valid for rigid transforms only.
  Vec3f inverse_transform_vector(const Vec3f& v) const {
    return {m[0][0] * v.x + m[1][0] * v.y + m[2][0] * v.z,
            m[0][1] * v.x + m[1][1] * v.y + m[2][1] * v.z,
            m[0][2] * v.x + m[1][2] * v.y + m[2][2] * v.z};
  }
  Vec3f inverse_transform_point(const Vec3f& p) const {
    return inverse_transform_vector(p - translation());
  }
  Vec3f translation() const { return {m[0][3], m[1][3], m[2][3]}; }
  Vec3f col3(int c) const { return {m[0][c], m[1][c], m[2][c]}; }
};

// Orthonormal basis around a unit vector n (z axis of the frame).
struct Onb {
  Vec3f t, b, n;

  explicit Onb(const Vec3f& n_) : n(n_) {
    // Duff et al., branchless ONB construction.
    float sign = std::copysign(1.0f, n.z);
    float a = -1.0f / (sign + n.z);
    float bxy = n.x * n.y * a;
    t = {1.0f + sign * n.x * n.x * a, sign * bxy, -sign * n.x};
    b = {bxy, sign + n.y * n.y * a, -n.y};
  }

  Vec3f to_world(const Vec3f& v) const { return t * v.x + b * v.y + n * v.z; }
  Vec3f to_local(const Vec3f& v) const { return {dot(v, t), dot(v, b), dot(v, n)}; }
};

// Equirectangular convention: +Y up, azimuth 0 along +X, increasing toward +Z.
inline Vec3f spherical_to_dir(float azimuth, float polar) {
  float sp = std::sin(polar);
  return {sp * std::cos(azimuth), std::cos(polar), sp * std::sin(azimuth)};
}

inline void dir_to_spherical(const Vec3f& d, float* azimuth, float* polar) {
  float az = std::atan2(d.z, d.x);
  if (az < 0) az += kTwoPi;
  *azimuth = az;
  *polar = std::acos(clampf(d.y, -1.0f, 1.0f));
}

}  // namespace matbake
