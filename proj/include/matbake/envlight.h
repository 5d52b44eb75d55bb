// Copyright (c) 2026 matbake contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "matbake/image.h"
#include "matbake/vecmath.h"

namespace matbake {

struct ProbeSample {
  Vec3f direction;
  Vec3f radiance;
  float pdf = 0;  // per steradian
};

// Equirectangular HDR radiance probe with a luminance * solid-angle CDF for
// light importance sampling. u in [0,1) maps to azimuth [0,2pi) starting at
// +X, v in [0,1] to polar angle [0,pi] from +Y. Immutable after construction.
class EnvironmentProbe {
 public:
  // Takes a linear RGB image; `rotation` spins the probe around +Y (radians).
  // NaN/negative texels are clamped to zero and counted.
  explicit EnvironmentProbe(Image radiance, float rotation = 0.0f);

  // Bilinear radiance plus the pdf of sample() for this direction. The pdf is
  // nearest-texel so it matches the discrete sampling distribution exactly.
  Vec3f eval(const Vec3f& dir) const;
  float pdf(const Vec3f& dir) const;

  // Draws a direction proportional to sin(theta)-weighted texel luminance,
  // uniform within the chosen texel's solid angle.
  ProbeSample sample(float u1, float u2) const;

  // Sum of radiance * texel solid angle over the sphere (per channel).
  Vec3f total_energy() const { return total_energy_; }

  int width() const { return radiance_.width; }
  int height() const { return radiance_.height; }
  int clamped_texels() const { return clamped_texels_; }

  const std::vector<double>& row_cdf() const { return row_cdf_; }
  const std::vector<double>& column_cdf() const { return col_cdf_; }

 private:
  float texel_pdf(int x, int y) const;

  Image radiance_;
  float rotation_ = 0;
  int clamped_texels_ = 0;
  Vec3f total_energy_;
  double total_weight_ = 0;            // sum over texels of luminance * solid angle
  std::vector<double> row_weights_;    // per-row sum of luminance (uniform within row)
  std::vector<double> row_cdf_;        // marginal over rows, ends at 1
  std::vector<double> col_cdf_;        // per-row conditional, H rows of W entries
  std::vector<double> cos_theta_edges_;  // H+1 values, cos of row boundaries
};

// Loads a Radiance RGBE probe and builds the sampling tables. Zero-energy
// probes are rejected (nothing to importance-sample).
EnvironmentProbe load_probe(const std::string& path, float rotation = 0.0f);

}  // namespace matbake
