// Copyright (c) 2026 matbake contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "matbake/envlight.h"
#include "matbake/tracer.h"

namespace matbake {

// Peak signal-to-noise ratio over masked pixels, channels pooled, peak 1.0.
// Identical images return +infinity (serialized as "inf").
double psnr(const Image& a, const Image& b, const Image& mask);
double psnr(const Image& a, const Image& b);

struct RelightRow {
  std::string probe_name;
  double psnr_db = 0;
};

// Renders `material` under each probe for every camera, tonemaps, and scores
// against the provided truth frames (display space, one per probe x camera,
// truth[probe_index * cameras + camera_index]). Masks, when given, restrict
// the comparison per camera.
std::vector<RelightRow> relight_eval(const Scene& scene, const MaterialSource& material,
                                     const std::vector<EnvironmentProbe>& probes,
                                     const std::vector<std::string>& probe_names,
                                     const std::vector<Camera>& cameras,
                                     const std::vector<Image>& truth,
                                     const std::vector<Image>* masks,
                                     const RenderConfig& config);

void save_relight_table(const std::string& path, const std::vector<RelightRow>& rows);

}  // namespace matbake
