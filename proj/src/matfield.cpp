// Copyright (c) 2026 matbake contributors
// SPDX-License-Identifier: Apache-2.0

#include "matbake/matfield.h"

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "matbake/error.h"
#include "matbake/rng.h"

namespace matbake {

void FieldConfig::validate() const {
  if (levels < 1 || levels > FieldQueryContext::kMaxLevels)
    throw ConfigError("field levels must be in [1, 16]");
  if (features < 1 || features > FieldQueryContext::kMaxFeatures)
    throw ConfigError("field features must be in [1, 4]");
  if (table_size_log2 < 4 || table_size_log2 > 24)
    throw ConfigError("field table_size_log2 must be in [4, 24]");
  if (hidden_width < 1 || hidden_width > FieldQueryContext::kMaxHidden)
    throw ConfigError("field hidden width must be in [1, 64]");
  if (hidden_layers < 1 || hidden_layers > 2)
    throw ConfigError("field hidden_layers must be 1 or 2");
  if (res_min < 1 || res_max < res_min) throw ConfigError("field resolutions must satisfy 1 <= res_min <= res_max");
}

GradientBuffer::GradientBuffer(size_t n) : size_(n) {
  cells_ = std::make_unique<std::atomic<int64_t>[]>(n);
  clear();
}

void GradientBuffer::clear() {
  for (size_t i = 0; i < size_; ++i) cells_[i].store(0, std::memory_order_relaxed);
}

void GradientBuffer::to_floats(std::span<float> out) const {
  for (size_t i = 0; i < size_ && i < out.size(); ++i) out[i] = get(i);
}

namespace {

constexpr float kLeakySlope = 0.01f;

inline float leaky_relu(float x) { return x > 0.0f ? x : kLeakySlope * x; }
inline float leaky_relu_grad(float x) { return x > 0.0f ? 1.0f : kLeakySlope; }
inline float sigmoid(float x) { return 1.0f / (1.0f + std::exp(-x)); }

inline uint32_t hash_corner(uint32_t x, uint32_t y, uint32_t z, uint32_t mask) {
  return (x ^ (y * 2654435761u) ^ (z * 805459861u)) & mask;
}

}  // namespace

MaterialField::MaterialField(const FieldConfig& cfg, const AABB& domain)
    : cfg_(cfg), domain_(domain) {
  cfg_.validate();
  Vec3f ext = domain_.extent();
  inv_extent_ = {1.0f / std::max(ext.x, 1e-9f), 1.0f / std::max(ext.y, 1e-9f),
                 1.0f / std::max(ext.z, 1e-9f)};

  resolutions_.resize(cfg_.levels);
  if (cfg_.levels == 1) {
    resolutions_[0] = cfg_.res_min;
  } else {
    double growth = std::exp((std::log(double(cfg_.res_max)) - std::log(double(cfg_.res_min))) /
                             double(cfg_.levels - 1));
    for (int l = 0; l < cfg_.levels; ++l)
      resolutions_[l] = std::max(1, int(std::floor(cfg_.res_min * std::pow(growth, l) + 0.5)));
  }

  size_t table_size = size_t(1) << cfg_.table_size_log2;
  table_params_ = size_t(cfg_.levels) * table_size * cfg_.features;
  in_dim_ = cfg_.levels * cfg_.features;

  int h = cfg_.hidden_width;
  size_t offset = table_params_;
  w1_ = offset; offset += size_t(h) * in_dim_;
  b1_ = offset; offset += h;
  if (cfg_.hidden_layers == 2) {
    w2_ = offset; offset += size_t(h) * h;
    b2_ = offset; offset += h;
  } else {
    w2_ = b2_ = 0;
  }
  w3_ = offset; offset += size_t(5) * h;
  b3_ = offset; offset += 5;
  params_.assign(offset, 0.0f);
  init_params();
}

void MaterialField::init_params() {
  Rng rng(hash_u64(cfg_.seed), 0x6d617466u);  // field init stream
  auto uniform = [&](float lo, float hi) { return lo + (hi - lo) * rng.next_float(); };

  for (size_t i = 0; i < table_params_; ++i) params_[i] = uniform(-1e-4f, 1e-4f);

  auto init_linear = [&](size_t w, size_t b, int rows, int cols) {
    float bound = std::sqrt(6.0f / float(cols));  // fan-in scaled
    for (int i = 0; i < rows * cols; ++i) params_[w + i] = uniform(-bound, bound);
    for (int i = 0; i < rows; ++i) params_[b + i] = 0.0f;
  };
  int h = cfg_.hidden_width;
  init_linear(w1_, b1_, h, in_dim_);
  if (cfg_.hidden_layers == 2) init_linear(w2_, b2_, h, h);
  init_linear(w3_, b3_, 5, h);
}

const float* MaterialField::forward(const Vec3f& position, FieldQueryContext* ctx) const {
  Vec3f p = (position - domain_.lo) * inv_extent_;
  p = clamp(p, 0.0f, 1.0f);

  const uint32_t mask = (uint32_t(1) << cfg_.table_size_log2) - 1;
  const size_t table_size = size_t(1) << cfg_.table_size_log2;
  const int f_count = cfg_.features;

  for (int l = 0; l < cfg_.levels; ++l) {
    float n = float(resolutions_[l]);
    float fx = p.x * n, fy = p.y * n, fz = p.z * n;
    int ix = std::min(int(fx), resolutions_[l] - 1);
    int iy = std::min(int(fy), resolutions_[l] - 1);
    int iz = std::min(int(fz), resolutions_[l] - 1);
    float tx = fx - float(ix), ty = fy - float(iy), tz = fz - float(iz);

    const float* level_table = params_.data() + size_t(l) * table_size * f_count;
    float accum[FieldQueryContext::kMaxFeatures] = {0, 0, 0, 0};
    for (int c = 0; c < 8; ++c) {
      uint32_t cx = uint32_t(ix + (c & 1));
      uint32_t cy = uint32_t(iy + ((c >> 1) & 1));
      uint32_t cz = uint32_t(iz + (c >> 2));
      float w = ((c & 1) ? tx : 1.0f - tx) * (((c >> 1) & 1) ? ty : 1.0f - ty) *
                ((c >> 2) ? tz : 1.0f - tz);
      uint32_t idx = hash_corner(cx, cy, cz, mask);
      ctx->corner_index[l][c] = idx;
      ctx->corner_weight[l][c] = w;
      const float* entry = level_table + size_t(idx) * f_count;
      for (int f = 0; f < f_count; ++f) accum[f] += w * entry[f];
    }
    for (int f = 0; f < f_count; ++f) ctx->features[l * f_count + f] = accum[f];
  }

  const int h = cfg_.hidden_width;
  const float* w1 = params_.data() + w1_;
  const float* b1 = params_.data() + b1_;
  for (int i = 0; i < h; ++i) {
    float acc = b1[i];
    const float* row = w1 + size_t(i) * in_dim_;
    for (int j = 0; j < in_dim_; ++j) acc += row[j] * ctx->features[j];
    ctx->pre1[i] = acc;
    ctx->post1[i] = leaky_relu(acc);
  }

  const float* last_hidden = ctx->post1;
  if (cfg_.hidden_layers == 2) {
    const float* w2 = params_.data() + w2_;
    const float* b2 = params_.data() + b2_;
    for (int i = 0; i < h; ++i) {
      float acc = b2[i];
      const float* row = w2 + size_t(i) * h;
      for (int j = 0; j < h; ++j) acc += row[j] * ctx->post1[j];
      ctx->pre2[i] = acc;
      ctx->post2[i] = leaky_relu(acc);
    }
    last_hidden = ctx->post2;
  }

  const float* w3 = params_.data() + w3_;
  const float* b3 = params_.data() + b3_;
  for (int k = 0; k < 5; ++k) {
    float acc = b3[k];
    const float* row = w3 + size_t(k) * h;
    for (int j = 0; j < h; ++j) acc += row[j] * last_hidden[j];
    ctx->out_sigmoid[k] = sigmoid(acc);
  }
  return ctx->out_sigmoid;
}

PbrSample MaterialField::query(const Vec3f& position) const {
  FieldQueryContext ctx;
  return query_ctx(position, &ctx);
}

PbrSample MaterialField::query_ctx(const Vec3f& position, FieldQueryContext* ctx) const {
  const float* out = forward(position, ctx);
  PbrSample s;
  s.base_color = {out[0], out[1], out[2]};
  s.roughness = out[3];
  s.metallic = out[4];
  return s;
}

void MaterialField::query_backward(const FieldQueryContext& ctx, const float upstream[5],
                                   GradientBuffer& grads) const {
  const int h = cfg_.hidden_width;

  float d_pre3[5];
  for (int k = 0; k < 5; ++k) {
    float s = ctx.out_sigmoid[k];
    d_pre3[k] = upstream[k] * s * (1.0f - s);
  }

  const float* last_hidden = cfg_.hidden_layers == 2 ? ctx.post2 : ctx.post1;
  const float* w3 = params_.data() + w3_;
  float d_last[FieldQueryContext::kMaxHidden] = {};
  for (int k = 0; k < 5; ++k) {
    if (d_pre3[k] == 0.0f) continue;
    const float* row = w3 + size_t(k) * h;
    for (int j = 0; j < h; ++j) {
      grads.add(w3_ + size_t(k) * h + j, d_pre3[k] * last_hidden[j]);
      d_last[j] += row[j] * d_pre3[k];
    }
    grads.add(b3_ + k, d_pre3[k]);
  }

  float d_post1[FieldQueryContext::kMaxHidden];
  if (cfg_.hidden_layers == 2) {
    const float* w2 = params_.data() + w2_;
    float d_pre2[FieldQueryContext::kMaxHidden];
    for (int i = 0; i < h; ++i) d_pre2[i] = d_last[i] * leaky_relu_grad(ctx.pre2[i]);
    for (int i = 0; i < h; ++i) d_post1[i] = 0.0f;
    for (int i = 0; i < h; ++i) {
      if (d_pre2[i] == 0.0f) continue;
      const float* row = w2 + size_t(i) * h;
      for (int j = 0; j < h; ++j) {
        grads.add(w2_ + size_t(i) * h + j, d_pre2[i] * ctx.post1[j]);
        d_post1[j] += row[j] * d_pre2[i];
      }
      grads.add(b2_ + i, d_pre2[i]);
    }
  } else {
    for (int i = 0; i < h; ++i) d_post1[i] = d_last[i];
  }

  const float* w1 = params_.data() + w1_;
  float d_features[FieldQueryContext::kMaxLevels * FieldQueryContext::kMaxFeatures] = {};
  for (int i = 0; i < h; ++i) {
    float d_pre1 = d_post1[i] * leaky_relu_grad(ctx.pre1[i]);
    if (d_pre1 == 0.0f) continue;
    const float* row = w1 + size_t(i) * in_dim_;
    for (int j = 0; j < in_dim_; ++j) {
      grads.add(w1_ + size_t(i) * in_dim_ + j, d_pre1 * ctx.features[j]);
      d_features[j] += row[j] * d_pre1;
    }
    grads.add(b1_ + i, d_pre1);
  }

  const size_t table_size = size_t(1) << cfg_.table_size_log2;
  const int f_count = cfg_.features;
  for (int l = 0; l < cfg_.levels; ++l) {
    size_t level_base = size_t(l) * table_size * f_count;
    for (int c = 0; c < 8; ++c) {
      float w = ctx.corner_weight[l][c];
      if (w == 0.0f) continue;
      size_t entry = level_base + size_t(ctx.corner_index[l][c]) * f_count;
      for (int f = 0; f < f_count; ++f)
        grads.add(entry + f, w * d_features[l * f_count + f]);
    }
  }
}

// ----------------------------------------------------------------------------
// Checkpoint I/O
// ----------------------------------------------------------------------------

namespace {
constexpr char kMagic[4] = {'M', 'B', 'F', '1'};
}

void MaterialField::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(path + ": cannot open for writing");
  out.write(kMagic, 4);
  uint32_t header[8] = {1u,
                        uint32_t(cfg_.levels),
                        uint32_t(cfg_.table_size_log2),
                        uint32_t(cfg_.features),
                        uint32_t(cfg_.res_min),
                        uint32_t(cfg_.res_max),
                        uint32_t(cfg_.hidden_width),
                        uint32_t(cfg_.hidden_layers)};
  out.write(reinterpret_cast<const char*>(header), sizeof(header));
  float box[6] = {domain_.lo.x, domain_.lo.y, domain_.lo.z,
                  domain_.hi.x, domain_.hi.y, domain_.hi.z};
  out.write(reinterpret_cast<const char*>(box), sizeof(box));
  uint64_t count = params_.size();
  out.write(reinterpret_cast<const char*>(&count), sizeof(count));
  out.write(reinterpret_cast<const char*>(params_.data()),
            std::streamsize(params_.size() * sizeof(float)));
  if (!out) throw IoError(path + ": write failed");
}

MaterialField MaterialField::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path + ": cannot open for reading");
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0)
    throw IoError(path + ": not a material field checkpoint");
  uint32_t header[8];
  in.read(reinterpret_cast<char*>(header), sizeof(header));
  if (!in || header[0] != 1u) throw IoError(path + ": unsupported checkpoint version");

  FieldConfig cfg;
  cfg.levels = int(header[1]);
  cfg.table_size_log2 = int(header[2]);
  cfg.features = int(header[3]);
  cfg.res_min = int(header[4]);
  cfg.res_max = int(header[5]);
  cfg.hidden_width = int(header[6]);
  cfg.hidden_layers = int(header[7]);

  float box[6];
  in.read(reinterpret_cast<char*>(box), sizeof(box));
  AABB domain;
  domain.lo = {box[0], box[1], box[2]};
  domain.hi = {box[3], box[4], box[5]};

  uint64_t count = 0;
  in.read(reinterpret_cast<char*>(&count), sizeof(count));
  MaterialField field(cfg, domain);
  if (count != field.params_.size()) throw IoError(path + ": parameter count mismatch");
  in.read(reinterpret_cast<char*>(field.params_.data()),
          std::streamsize(count * sizeof(float)));
  if (!in) throw IoError(path + ": truncated checkpoint");
  return field;
}

// ----------------------------------------------------------------------------
// Texture bake-out
// ----------------------------------------------------------------------------

BakedTextures bake_textures(const MaterialField& field, const TriangleMesh& mesh,
                            int resolution) {
  if (resolution < 16) throw ConfigError("bake resolution must be >= 16");
  if (mesh.uvs.size() != mesh.positions.size())
    throw NumericError("mesh has no UV parametrization; cannot bake");

  const int res = resolution;
  BakedTextures out;
  out.base_color = Image(res, res, 3);
  out.roughness = Image(res, res, 1);
  out.metallic = Image(res, res, 1);
  out.mask = Image(res, res, 1);

  std::vector<uint8_t> covered(size_t(res) * res, 0);
  std::vector<Vec3f> written_pos(size_t(res) * res);
  float overlap_dist = 1e-3f * std::max(mesh.bounds.diagonal(), 1e-6f);

  for (size_t t = 0; t < mesh.triangle_count(); ++t) {
    const auto& tri = mesh.triangles[t];
    // UV-space vertices in texel units; texel centers at +0.5. The V axis is
    // flipped so v=0 lands at the bottom of the image.
    Vec2f a = {mesh.uvs[tri[0]].x * res, (1.0f - mesh.uvs[tri[0]].y) * res};
    Vec2f b = {mesh.uvs[tri[1]].x * res, (1.0f - mesh.uvs[tri[1]].y) * res};
    Vec2f c = {mesh.uvs[tri[2]].x * res, (1.0f - mesh.uvs[tri[2]].y) * res};

    float denom = (b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y);
    if (std::abs(denom) < 1e-12f) continue;  // zero-area UV triangle
    float inv_denom = 1.0f / denom;

    int x0 = std::max(0, int(std::floor(std::min(a.x, std::min(b.x, c.x)))));
    int x1 = std::min(res - 1, int(std::ceil(std::max(a.x, std::max(b.x, c.x)))));
    int y0 = std::max(0, int(std::floor(std::min(a.y, std::min(b.y, c.y)))));
    int y1 = std::min(res - 1, int(std::ceil(std::max(a.y, std::max(b.y, c.y)))));

    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        Vec2f p{float(x) + 0.5f, float(y) + 0.5f};
        float u = ((p.x - a.x) * (c.y - a.y) - (c.x - a.x) * (p.y - a.y)) * inv_denom;
        float v = ((b.x - a.x) * (p.y - a.y) - (p.x - a.x) * (b.y - a.y)) * inv_denom;
        float w0 = 1.0f - u - v;
        if (u < 0.0f || v < 0.0f || w0 < 0.0f) continue;

        Vec3f pos = mesh.positions[tri[0]] * w0 + mesh.positions[tri[1]] * u +
                    mesh.positions[tri[2]] * v;
        size_t px = size_t(y) * res + x;
        if (covered[px] && length(pos - written_pos[px]) > overlap_dist) ++out.overlap_count;
        written_pos[px] = pos;
        covered[px] = 1;

        PbrSample s = field.query(pos);
        out.base_color.set_rgb(x, y, s.base_color);
        out.roughness.pixel(x, y)[0] = s.roughness;
        out.metallic.pixel(x, y)[0] = s.metallic;
        out.mask.pixel(x, y)[0] = 1.0f;
      }
    }
  }
  if (out.overlap_count > 0)
    std::fprintf(stderr, "warning: %d texels covered by overlapping UV charts\n",
                 out.overlap_count);

  // Iterative dilation into uncovered texels; each pass averages the filled
  // 8-neighborhood of the previous generation.
  std::vector<uint8_t> filled = covered;
  std::vector<uint8_t> next = filled;
  for (int pass = 0; pass < res; ++pass) {
    bool changed = false;
    for (int y = 0; y < res; ++y) {
      for (int x = 0; x < res; ++x) {
        size_t px = size_t(y) * res + x;
        if (filled[px]) continue;
        Vec3f base_sum{0, 0, 0};
        float rough_sum = 0, metal_sum = 0;
        int n = 0;
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            int nx = x + dx, ny = y + dy;
            if (nx < 0 || ny < 0 || nx >= res || ny >= res) continue;
            if (!filled[size_t(ny) * res + nx]) continue;
            base_sum += out.base_color.rgb(nx, ny);
            rough_sum += out.roughness.pixel(nx, ny)[0];
            metal_sum += out.metallic.pixel(nx, ny)[0];
            ++n;
          }
        }
        if (n > 0) {
          out.base_color.set_rgb(x, y, base_sum / float(n));
          out.roughness.pixel(x, y)[0] = rough_sum / float(n);
          out.metallic.pixel(x, y)[0] = metal_sum / float(n);
          next[px] = 1;
          changed = true;
        }
      }
    }
    filled = next;
    if (!changed) break;
  }
  return out;
}

void save_baked_textures(const BakedTextures& baked, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);

  Image base_srgb = baked.base_color;
  for (float& v : base_srgb.data) v = linear_to_srgb(saturate(v));
  write_png8((fs::path(dir) / "base_color.png").string(), base_srgb);
  write_png8((fs::path(dir) / "roughness.png").string(), baked.roughness);
  write_png8((fs::path(dir) / "metallic.png").string(), baked.metallic);
  write_png8((fs::path(dir) / "mask.png").string(), baked.mask);
  write_png16((fs::path(dir) / "base_color_16.png").string(), baked.base_color);
  write_png16((fs::path(dir) / "roughness_16.png").string(), baked.roughness);
  write_png16((fs::path(dir) / "metallic_16.png").string(), baked.metallic);
}

}  // namespace matbake
