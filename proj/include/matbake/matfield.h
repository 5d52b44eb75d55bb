// Copyright (c) 2026 matbake contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "matbake/brdf.h"
#include "matbake/image.h"
#include "matbake/mesh.h"
#include "matbake/vecmath.h"

namespace matbake {

struct FieldConfig {
  int levels = 12;
  int table_size_log2 = 19;
  int features = 2;       // per level
  int res_min = 16;
  int res_max = 2048;
  int hidden_width = 32;
  int hidden_layers = 2;  // 1 or 2
  uint32_t seed = 1;

  void validate() const;
};

// Deterministic gradient accumulator. Contributions are rounded to 2^-40
// fixed point and summed with atomic integer adds, so totals are independent
// of thread count and accumulation order, bit for bit.
class GradientBuffer {
 public:
  explicit GradientBuffer(size_t n);

  void clear();
  void add(size_t i, float v) {
    cells_[i].fetch_add(to_fixed(v), std::memory_order_relaxed);
  }
  float get(size_t i) const {
    return float(cells_[i].load(std::memory_order_relaxed) * kInvScale);
  }
  void to_floats(std::span<float> out) const;
  size_t size() const { return size_; }

 private:
  static int64_t to_fixed(float v) {
    double scaled = double(v) * kScale;
    if (!(scaled > -kMaxFixed && scaled < kMaxFixed)) return 0;  // drops NaN/overflow
    return std::llround(scaled);
  }

  static constexpr double kScale = 0x1p40;
  static constexpr double kInvScale = 0x1p-40;
  static constexpr double kMaxFixed = 0x1p62;

  std::unique_ptr<std::atomic<int64_t>[]> cells_;
  size_t size_;
};

// Activations captured by a forward query, consumed by the backward pass.
struct FieldQueryContext {
  static constexpr int kMaxLevels = 16;
  static constexpr int kMaxFeatures = 4;
  static constexpr int kMaxHidden = 64;

  uint32_t corner_index[kMaxLevels][8];
  float corner_weight[kMaxLevels][8];
  float features[kMaxLevels * kMaxFeatures];
  float pre1[kMaxHidden], post1[kMaxHidden];
  float pre2[kMaxHidden], post2[kMaxHidden];
  float out_sigmoid[5];
};

// Multiresolution hash grid + small MLP mapping a 3D position to a
// PbrSample; the optimization variable of the reconstruction. Level
// resolutions follow a geometric schedule from res_min to res_max; corner
// entries are addressed by the spatial hash
//   (x * 1) xor (y * 2654435761) xor (z * 805459861)  mod table size.
// Outputs pass through a sigmoid, so queries always land in (0,1).
class MaterialField {
 public:
  MaterialField(const FieldConfig& cfg, const AABB& domain);

  PbrSample query(const Vec3f& position) const;
  PbrSample query_ctx(const Vec3f& position, FieldQueryContext* ctx) const;

  // Accumulates d(output)/d(params) * upstream into grads. upstream is taken
  // with respect to the post-sigmoid 5-vector (r, g, b, roughness, metallic).
  void query_backward(const FieldQueryContext& ctx, const float upstream[5],
                      GradientBuffer& grads) const;

  std::span<float> params() { return params_; }
  std::span<const float> params() const { return params_; }
  size_t param_count() const { return params_.size(); }
  size_t table_param_count() const { return table_params_; }  // prefix of params()

  const FieldConfig& config() const { return cfg_; }
  const AABB& domain() const { return domain_; }
  int level_resolution(int level) const { return resolutions_[level]; }

  // Versioned little-endian binary checkpoint.
  void save(const std::string& path) const;
  static MaterialField load(const std::string& path);

 private:
  void init_params();
  const float* forward(const Vec3f& position, FieldQueryContext* ctx) const;

  FieldConfig cfg_;
  AABB domain_;
  Vec3f inv_extent_;
  std::vector<int> resolutions_;
  std::vector<float> params_;
  size_t table_params_ = 0;
  // Offsets into params_ for the MLP pieces.
  size_t w1_ = 0, b1_ = 0, w2_ = 0, b2_ = 0, w3_ = 0, b3_ = 0;
  int in_dim_ = 0;
};

// Baked texture set; values are raw field outputs in [0,1]. The mask is 1
// where a texel was covered by UV rasterization, 0 where it was filled by
// dilation (or left empty).
struct BakedTextures {
  Image base_color;  // 3 channels
  Image roughness;   // 1 channel
  Image metallic;    // 1 channel
  Image mask;        // 1 channel
  int overlap_count = 0;
};

// Rasterizes every triangle in UV space, reconstructs the 3D point per texel
// and queries the field; uncovered texels are filled by iterative dilation.
// Overlapping charts resolve last-writer-wins and are counted.
BakedTextures bake_textures(const MaterialField& field, const TriangleMesh& mesh,
                            int resolution);

// Writes base color as sRGB-encoded 8-bit PNG, roughness/metallic as linear
// 8-bit PNG, plus 16-bit linear variants and the coverage mask.
void save_baked_textures(const BakedTextures& baked, const std::string& dir);

}  // namespace matbake
