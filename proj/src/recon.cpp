// Copyright (c) 2026 matbake contributors
// SPDX-License-Identifier: Apache-2.0

#include "matbake/recon.h"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "matbake/error.h"
#include "matbake/rng.h"

namespace matbake {

namespace fs = std::filesystem;

void FrameSet::validate() const {
  if (frames.empty()) throw ConfigError("frame set is empty");
  int w = frames.front().reference.width;
  int h = frames.front().reference.height;
  bool guides = frames.front().has_guides;
  for (size_t i = 0; i < frames.size(); ++i) {
    const Frame& f = frames[i];
    if (f.reference.width != w || f.reference.height != h || f.mask.width != w ||
        f.mask.height != h)
      throw ConfigError("frame " + std::to_string(i) + " resolution mismatch");
    if (f.camera.width != w || f.camera.height != h)
      throw ConfigError("frame " + std::to_string(i) + " camera/image resolution mismatch");
    if (f.has_guides != guides)
      throw ConfigError("intrinsic guides must be present for all frames or none");
    if (f.has_guides && (f.guide_base.width != w || f.guide_rough.width != w ||
                         f.guide_metal.width != w))
      throw ConfigError("frame " + std::to_string(i) + " guide resolution mismatch");
  }
}

namespace {

std::string frame_name(size_t index, const char* ext = ".png") {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%05zu%s", index, ext);
  return buf;
}

}  // namespace

FrameSet load_frameset(const std::string& dir) {
  fs::path root(dir);
  if (!fs::is_directory(root)) throw IoError(dir + ": not a directory");
  std::vector<Camera> cams = load_cameras((root / "cameras.txt").string());

  FrameSet set;
  bool guides = fs::is_directory(root / "guides" / "basecolor");
  for (size_t i = 0; i < cams.size(); ++i) {
    Frame f;
    f.camera = cams[i];
    fs::path frame_path = root / "frames" / frame_name(i);
    fs::path mask_path = root / "masks" / frame_name(i);
    if (!fs::exists(frame_path)) throw IoError(frame_path.string() + ": missing frame image");
    f.reference = read_png(frame_path.string());
    if (f.reference.channels != 3) throw IoError(frame_path.string() + ": expected RGB");
    if (fs::exists(mask_path)) {
      f.mask = read_png(mask_path.string());
    } else {
      f.mask = Image(f.reference.width, f.reference.height, 1);
      for (float& v : f.mask.data) v = 1.0f;
    }
    if (guides) {
      f.has_guides = true;
      f.guide_base = read_png((root / "guides" / "basecolor" / frame_name(i)).string());
      f.guide_rough = read_png((root / "guides" / "roughness" / frame_name(i)).string());
      f.guide_metal = read_png((root / "guides" / "metallic" / frame_name(i)).string());
    }
    set.frames.push_back(std::move(f));
  }
  set.validate();
  return set;
}

ImageLoss image_loss(const RenderedImage& rendered, const Image& reference, const Image& mask) {
  const Image& rgb = rendered.rgb;
  if (reference.width != rgb.width || reference.height != rgb.height)
    throw ConfigError("reference/render resolution mismatch");

  ImageLoss out;
  out.adjoint = Image(rgb.width, rgb.height, 3);
  int64_t covered = 0;
  for (float v : mask.data) covered += v > 0.5f ? 1 : 0;
  if (covered == 0) {
    std::fprintf(stderr, "warning: image loss over an empty mask\n");
    return out;
  }

  double sum = 0.0;
  float inv = 1.0f / (float(covered) * 3.0f);
  for (int y = 0; y < rgb.height; ++y) {
    for (int x = 0; x < rgb.width; ++x) {
      if (mask.pixel(x, y)[0] <= 0.5f) continue;
      Vec3f linear = rgb.rgb(x, y);
      Vec3f diff = tonemap(linear) - reference.rgb(x, y);
      sum += std::abs(diff.x) + std::abs(diff.y) + std::abs(diff.z);
      Vec3f dtm = tonemap_derivative(linear);
      Vec3f sign{diff.x > 0 ? 1.0f : (diff.x < 0 ? -1.0f : 0.0f),
                 diff.y > 0 ? 1.0f : (diff.y < 0 ? -1.0f : 0.0f),
                 diff.z > 0 ? 1.0f : (diff.z < 0 ? -1.0f : 0.0f)};
      out.adjoint.set_rgb(x, y, sign * dtm * inv);
    }
  }
  out.loss = sum * double(inv);
  return out;
}

ScaleInvLoss scale_invariant_loss(const Image& pred, const Image& guide, const Image& mask,
                                  float eps_mean) {
  if (pred.width != guide.width || pred.height != guide.height ||
      pred.channels != guide.channels)
    throw ConfigError("prediction/guide shape mismatch");

  ScaleInvLoss out;
  out.adjoint = Image(pred.width, pred.height, pred.channels);
  const int channels = pred.channels;

  std::vector<int> px, py;
  for (int y = 0; y < pred.height; ++y)
    for (int x = 0; x < pred.width; ++x)
      if (mask.pixel(x, y)[0] > 0.5f) {
        px.push_back(x);
        py.push_back(y);
      }
  const size_t n = px.size();
  if (n == 0) {
    out.skipped = true;
    return out;
  }

  double total = 0.0;
  for (int c = 0; c < channels; ++c) {
    double mean_x = 0.0, mean_y = 0.0;
    for (size_t i = 0; i < n; ++i) {
      mean_x += pred.pixel(px[i], py[i])[c];
      mean_y += guide.pixel(px[i], py[i])[c];
    }
    mean_x /= double(n);
    mean_y /= double(n);
    if (mean_x <= eps_mean || mean_y <= eps_mean) {
      std::fprintf(stderr,
                   "warning: scale-invariant term skipped (degenerate mean, channel %d)\n", c);
      out.skipped = true;
      out.adjoint = Image(pred.width, pred.height, pred.channels);
      out.loss = 0.0;
      return out;
    }

    // L_c = (1/n) sum |x_i/mx - y_i/my|;
    // dL/dx_i = (1/(n*mx)) * (s_i - (1/n) sum_j s_j x_j / mx).
    double sum_abs = 0.0, sum_sx = 0.0;
    std::vector<float> sign(n);
    for (size_t i = 0; i < n; ++i) {
      double xv = pred.pixel(px[i], py[i])[c];
      double d = xv / mean_x - guide.pixel(px[i], py[i])[c] / mean_y;
      sum_abs += std::abs(d);
      float s = d > 0 ? 1.0f : (d < 0 ? -1.0f : 0.0f);
      sign[i] = s;
      sum_sx += s * xv;
    }
    total += sum_abs / double(n);
    double mean_term = sum_sx / (double(n) * mean_x);
    double scale = 1.0 / (double(n) * mean_x * double(channels));
    for (size_t i = 0; i < n; ++i)
      out.adjoint.pixel(px[i], py[i])[c] = float((sign[i] - mean_term) * scale);
  }
  out.loss = total / double(channels);
  return out;
}

void adam_step(std::span<float> params, std::span<const float> grads, AdamState& state,
               float lr, float beta1, float beta2, float eps) {
  if (state.m.size() != params.size()) {
    state.m.assign(params.size(), 0.0f);
    state.v.assign(params.size(), 0.0f);
    state.t = 0;
  }
  ++state.t;
  double bc1 = 1.0 - std::pow(double(beta1), double(state.t));
  double bc2 = 1.0 - std::pow(double(beta2), double(state.t));
  for (size_t i = 0; i < params.size(); ++i) {
    float g = grads[i];
    state.m[i] = beta1 * state.m[i] + (1.0f - beta1) * g;
    state.v[i] = beta2 * state.v[i] + (1.0f - beta2) * g * g;
    float mhat = float(state.m[i] / bc1);
    float vhat = float(state.v[i] / bc2);
    params[i] -= lr * mhat / (std::sqrt(vhat) + eps);
  }
}

void OptimSettings::validate(size_t frame_count) const {
  if (iterations < 0) throw ConfigError("iterations must be >= 0");
  if (batch < 1 || size_t(batch) > frame_count)
    throw ConfigError("batch size must be in [1, frame count]");
  if (lambda < 0.0f) throw ConfigError("lambda must be >= 0");
  render.validate();
}

void save_loss_history(const std::string& path, const std::vector<LossRow>& history) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(path + ": cannot open for writing");
  out << "iteration,l_image,l_reg_base,l_reg_rough,l_reg_metal,total\n";
  char buf[160];
  for (const LossRow& row : history) {
    std::snprintf(buf, sizeof(buf), "%d,%.9g,%.9g,%.9g,%.9g,%.9g\n", row.iteration, row.image,
                  row.reg_base, row.reg_rough, row.reg_metal, row.total);
    out << buf;
  }
  if (!out) throw IoError(path + ": write failed");
}

namespace {

constexpr uint64_t kBatchSalt = 0x62617463u;
constexpr uint64_t kFrameSeedSalt = 0x6672616du;

// Intersection of the frame mask and the deterministic center-ray hit mask;
// the regularizer compares surface intrinsics only where both agree.
Image intersect_masks(const Image& a, const Image& b) {
  Image out(a.width, a.height, 1);
  for (size_t i = 0; i < out.data.size(); ++i)
    out.data[i] = (a.data[i] > 0.5f && b.data[i] > 0.5f) ? 1.0f : 0.0f;
  return out;
}

}  // namespace

ReconResult reconstruct(const FrameSet& frameset, const Scene& scene,
                        const EnvironmentProbe& probe, const FieldConfig& field_cfg,
                        const OptimSettings& settings) {
  frameset.validate();
  settings.validate(frameset.frames.size());

  ReconResult result{MaterialField(field_cfg, scene.mesh.bounds), {}};
  MaterialField& field = result.field;

  GradientBuffer grads(field.param_count());
  std::vector<float> grad_floats(field.param_count());
  AdamState adam_tables, adam_mlp;
  size_t tables = field.table_param_count();

  bool warned_no_guides = false;
  const bool use_guides = frameset.has_guides() && settings.lambda > 0.0f;
  if (!frameset.has_guides() && settings.lambda > 0.0f && !warned_no_guides) {
    std::fprintf(stderr, "warning: no intrinsic guides; regularizer terms are zero\n");
    warned_no_guides = true;
  }

  std::vector<uint32_t> order(frameset.frames.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = uint32_t(i);

  for (int iter = 0; iter < settings.iterations; ++iter) {
    // Draw `batch` distinct frames (partial Fisher-Yates).
    Rng batch_rng = make_stream(settings.seed, uint64_t(iter), 0, kBatchSalt);
    for (int b = 0; b < settings.batch; ++b) {
      uint32_t j = b + batch_rng.next_below(uint32_t(order.size() - b));
      std::swap(order[b], order[j]);
    }

    grads.clear();
    double l_image = 0, l_base = 0, l_rough = 0, l_metal = 0;
    float inv_batch = 1.0f / float(settings.batch);

    for (int b = 0; b < settings.batch; ++b) {
      const Frame& frame = frameset.frames[order[b]];
      RenderConfig rc = settings.render;
      rc.seed = hash_combine(hash_combine(settings.seed, uint64_t(iter)),
                             hash_combine(uint64_t(order[b]), kFrameSeedSalt));

      RenderedImage rendered = render(scene, probe, FieldMaterial(field), frame.camera, rc);
      ImageLoss il = image_loss(rendered, frame.reference, frame.mask);
      l_image += il.loss * inv_batch;
      for (float& v : il.adjoint.data) v *= inv_batch;
      render_backward(scene, probe, field, frame.camera, rc, il.adjoint, grads);

      if (use_guides) {
        IntrinsicImages intr = render_intrinsics(scene, field, frame.camera, rc.workers);
        Image reg_mask = intersect_masks(frame.mask, intr.hit_mask);
        ScaleInvLoss lb = scale_invariant_loss(intr.base_display, frame.guide_base, reg_mask);
        ScaleInvLoss lr = scale_invariant_loss(intr.roughness, frame.guide_rough, reg_mask);
        ScaleInvLoss lm = scale_invariant_loss(intr.metallic, frame.guide_metal, reg_mask);
        l_base += lb.loss * inv_batch;
        l_rough += lr.loss * inv_batch;
        l_metal += lm.loss * inv_batch;
        float reg_scale = settings.lambda * inv_batch;
        for (float& v : lb.adjoint.data) v *= reg_scale;
        for (float& v : lr.adjoint.data) v *= reg_scale;
        for (float& v : lm.adjoint.data) v *= reg_scale;
        render_intrinsics_backward(scene, field, frame.camera, lb.adjoint, lr.adjoint,
                                   lm.adjoint, grads, rc.workers);
      }
    }

    double total = l_image + settings.lambda * (l_base + l_rough + l_metal);
    if (!std::isfinite(total))
      throw NumericError("loss diverged at iteration " + std::to_string(iter));
    result.history.push_back({iter, l_image, l_base, l_rough, l_metal, total});

    grads.to_floats(grad_floats);
    std::span<float> params = field.params();
    adam_step(params.subspan(0, tables), std::span<const float>(grad_floats).subspan(0, tables),
              adam_tables, settings.lr_table, settings.beta1, settings.beta2,
              settings.epsilon);
    adam_step(params.subspan(tables), std::span<const float>(grad_floats).subspan(tables),
              adam_mlp, settings.lr_mlp, settings.beta1, settings.beta2, settings.epsilon);

    if (settings.checkpoint_every > 0 && !settings.checkpoint_dir.empty() &&
        (iter + 1) % settings.checkpoint_every == 0) {
      fs::create_directories(settings.checkpoint_dir);
      char name[64];
      std::snprintf(name, sizeof(name), "checkpoint_%06d.bin", iter + 1);
      field.save((fs::path(settings.checkpoint_dir) / name).string());
    }
  }
  return result;
}

}  // namespace matbake
