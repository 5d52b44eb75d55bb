// Copyright (c) 2026 matbake contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <string>
#include <vector>

#include "matbake/envlight.h"
#include "matbake/tracer.h"

namespace matbake {

// One reference view: camera, display-space reference image, binary coverage
// mask and (optionally) the three intrinsic guide images.
struct Frame {
  Camera camera;
  Image reference;    // 3 channels, display RGB
  Image mask;         // 1 channel, > 0.5 means covered
  bool has_guides = false;
  Image guide_base;   // 3 channels, display RGB
  Image guide_rough;  // 1 channel, linear
  Image guide_metal;  // 1 channel, linear
};

struct FrameSet {
  std::vector<Frame> frames;

  bool has_guides() const { return !frames.empty() && frames.front().has_guides; }
  void validate() const;  // uniform resolution, guides all-or-none
};

// Directory layout: frames/%05d.png, masks/%05d.png, cameras.txt and
// optionally guides/{basecolor,roughness,metallic}/%05d.png.
FrameSet load_frameset(const std::string& dir);

// L1 between the tonemapped render and the display-space reference, averaged
// over masked pixels and channels. The adjoint is with respect to the linear
// rendered RGB (the tonemap derivative is folded in). An empty mask yields
// zero loss and a warning.
struct ImageLoss {
  double loss = 0;
  Image adjoint;  // 3 channels
};
ImageLoss image_loss(const RenderedImage& rendered, const Image& reference, const Image& mask);

// Scale-invariant L1 (Eq. style: x/mean(x) vs y/mean(y)), masked, with
// per-channel means. The adjoint includes the mean-dependence term. Returns
// loss 0 and a zero adjoint when a masked mean falls below eps_mean (an
// all-black guide or prediction).
struct ScaleInvLoss {
  double loss = 0;
  Image adjoint;   // same channel count as pred
  bool skipped = false;
};
ScaleInvLoss scale_invariant_loss(const Image& pred, const Image& guide, const Image& mask,
                                  float eps_mean = 1e-4f);

// Standard bias-corrected Adam. State tensors are created lazily on first
// use; `t` counts completed steps.
struct AdamState {
  std::vector<float> m, v;
  int64_t t = 0;
};
void adam_step(std::span<float> params, std::span<const float> grads, AdamState& state,
               float lr, float beta1, float beta2, float eps);

struct OptimSettings {
  int iterations = 1000;
  int batch = 8;
  float lr_table = 1e-2f;
  float lr_mlp = 1e-3f;
  float beta1 = 0.9f;
  float beta2 = 0.999f;
  float epsilon = 1e-8f;
  float lambda = 0.2f;  // shared by the three regularizer terms
  int checkpoint_every = 0;
  std::string checkpoint_dir;
  uint64_t seed = 0;
  RenderConfig render;

  void validate(size_t frame_count) const;
};

struct LossRow {
  int iteration = 0;
  double image = 0;
  double reg_base = 0;
  double reg_rough = 0;
  double reg_metal = 0;
  double total = 0;
};

void save_loss_history(const std::string& path, const std::vector<LossRow>& history);

struct ReconResult {
  MaterialField field;
  std::vector<LossRow> history;
};

// Multi-view optimization: per iteration, draw a batch of frames without
// replacement, render each, form L = L_image + lambda * (reg_base +
// reg_rough + reg_metal), push adjoints through the tracer and take one Adam
// step (hash tables and MLP as separate learning-rate groups). Deterministic
// for a fixed seed. Throws NumericError naming the iteration if the loss
// turns non-finite.
ReconResult reconstruct(const FrameSet& frameset, const Scene& scene,
                        const EnvironmentProbe& probe, const FieldConfig& field_cfg,
                        const OptimSettings& settings);

}  // namespace matbake
