// Copyright (c) 2026 matbake contributors
// SPDX-License-Identifier: Apache-2.0

#include "matbake/envlight.h"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "matbake/error.h"

namespace matbake {

namespace {

// Index of the first cdf entry strictly greater than u; skips zero-mass
// prefix entries so a returned bin always has positive probability.
int sample_cdf(const double* cdf, int count, double u) {
  int lo = 0, hi = count - 1;
  while (lo < hi) {
    int mid = (lo + hi) / 2;
    if (cdf[mid] <= u) lo = mid + 1;
    else hi = mid;
  }
  return lo;
}

}  // namespace

EnvironmentProbe::EnvironmentProbe(Image radiance, float rotation)
    : radiance_(std::move(radiance)), rotation_(rotation) {
  if (radiance_.width < 1 || radiance_.height < 1 || radiance_.channels != 3)
    throw IoError("probe image must be non-empty RGB");
  const int w = radiance_.width, h = radiance_.height;

  for (float& v : radiance_.data) {
    if (!std::isfinite(v) || v < 0.0f) {
      v = 0.0f;
      ++clamped_texels_;
    }
  }
  if (clamped_texels_ > 0)
    std::fprintf(stderr, "warning: clamped %d non-finite/negative probe values\n",
                 clamped_texels_);

  cos_theta_edges_.resize(h + 1);
  for (int y = 0; y <= h; ++y) cos_theta_edges_[y] = std::cos(kPi * double(y) / double(h));

  // Row weight = sum_x luminance * per-texel solid angle. The solid angle is
  // exact, (cos(theta_y) - cos(theta_y+1)) * 2pi/W, so a constant probe yields
  // an exactly uniform spherical pdf.
  const double dphi = 2.0 * kPi / double(w);
  row_weights_.assign(h, 0.0);
  row_cdf_.assign(h, 0.0);
  col_cdf_.assign(size_t(w) * h, 0.0);
  double total = 0.0;
  Vec3f energy{0, 0, 0};
  for (int y = 0; y < h; ++y) {
    double band = cos_theta_edges_[y] - cos_theta_edges_[y + 1];
    double row_lum = 0.0;
    double run = 0.0;
    for (int x = 0; x < w; ++x) {
      Vec3f c = radiance_.rgb(x, y);
      double lum = luminance(c);
      row_lum += lum;
      run += lum;
      col_cdf_[size_t(y) * w + x] = run;
      energy += c * float(band * dphi);
    }
    // Normalize the conditional; an all-zero row keeps a zero cdf and can
    // never be drawn because its marginal weight is zero.
    if (row_lum > 0.0)
      for (int x = 0; x < w; ++x) col_cdf_[size_t(y) * w + x] /= row_lum;
    row_weights_[y] = row_lum;
    total += row_lum * band * dphi;
    row_cdf_[y] = total;
  }
  if (!(total > 0.0)) throw IoError("probe has zero energy; cannot importance-sample");
  total_weight_ = total;
  total_energy_ = energy;
  for (double& v : row_cdf_) v /= total;
  row_cdf_[h - 1] = 1.0;
}

float EnvironmentProbe::texel_pdf(int x, int y) const {
  // P(texel) / solid angle(texel) = luminance(x,y) / total_weight.
  double lum = luminance(radiance_.rgb(x, y));
  return float(lum / total_weight_);
}

Vec3f EnvironmentProbe::eval(const Vec3f& dir) const {
  float az, pol;
  dir_to_spherical(dir, &az, &pol);
  az -= rotation_;
  az -= kTwoPi * std::floor(az / kTwoPi);

  const int w = radiance_.width, h = radiance_.height;
  // Bilinear with wrap in azimuth, clamp in polar; texel centers at +0.5.
  float fx = az / kTwoPi * float(w) - 0.5f;
  float fy = pol / kPi * float(h) - 0.5f;
  int x0 = int(std::floor(fx)), y0 = int(std::floor(fy));
  float tx = fx - float(x0), ty = fy - float(y0);
  int x1 = x0 + 1, y1 = y0 + 1;
  auto wrap_x = [w](int x) { return ((x % w) + w) % w; };
  auto clamp_y = [h](int y) { return std::clamp(y, 0, h - 1); };
  Vec3f c00 = radiance_.rgb(wrap_x(x0), clamp_y(y0));
  Vec3f c10 = radiance_.rgb(wrap_x(x1), clamp_y(y0));
  Vec3f c01 = radiance_.rgb(wrap_x(x0), clamp_y(y1));
  Vec3f c11 = radiance_.rgb(wrap_x(x1), clamp_y(y1));
  return lerp(lerp(c00, c10, tx), lerp(c01, c11, tx), ty);
}

float EnvironmentProbe::pdf(const Vec3f& dir) const {
  float az, pol;
  dir_to_spherical(dir, &az, &pol);
  az -= rotation_;
  az -= kTwoPi * std::floor(az / kTwoPi);
  const int w = radiance_.width, h = radiance_.height;
  int x = std::min(int(az / kTwoPi * float(w)), w - 1);
  int y = std::min(int(pol / kPi * float(h)), h - 1);
  return texel_pdf(x, y);
}

ProbeSample EnvironmentProbe::sample(float u1, float u2) const {
  const int w = radiance_.width, h = radiance_.height;
  int y = sample_cdf(row_cdf_.data(), h, u1);
  int x = sample_cdf(col_cdf_.data() + size_t(y) * w, w, u2);

  // Remap u to a uniform position inside the chosen texel so the continuous
  // pdf equals P(texel) / solid angle exactly.
  double cdf_lo_y = y > 0 ? row_cdf_[y - 1] : 0.0;
  double ry = (u1 - cdf_lo_y) / std::max(row_cdf_[y] - cdf_lo_y, 1e-300);
  const double* col = col_cdf_.data() + size_t(y) * w;
  double cdf_lo_x = x > 0 ? col[x - 1] : 0.0;
  double rx = (u2 - cdf_lo_x) / std::max(col[x] - cdf_lo_x, 1e-300);
  rx = std::clamp(rx, 0.0, 1.0 - 1e-9);
  ry = std::clamp(ry, 0.0, 1.0 - 1e-9);

  // Uniform in solid angle: phi linear, cos(theta) linear within the texel.
  double phi = (double(x) + rx) / w * 2.0 * kPi + rotation_;
  double cos_theta =
      cos_theta_edges_[y] + (cos_theta_edges_[y + 1] - cos_theta_edges_[y]) * ry;
  double sin_theta = std::sqrt(std::max(0.0, 1.0 - cos_theta * cos_theta));

  ProbeSample out;
  out.direction = normalize(Vec3f{float(sin_theta * std::cos(phi)), float(cos_theta),
                                  float(sin_theta * std::sin(phi))});
  out.radiance = radiance_.rgb(x, y);
  out.pdf = texel_pdf(x, y);
  return out;
}

EnvironmentProbe load_probe(const std::string& path, float rotation) {
  return EnvironmentProbe(read_hdr(path), rotation);
}

}  // namespace matbake
