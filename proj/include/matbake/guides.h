// Copyright (c) 2026 matbake contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "matbake/tracer.h"

namespace matbake {

// Camera-space normal map, (n+1)/2 encoded, one center ray per pixel.
// Background pixels encode +Z toward the camera, i.e. (0.5, 0.5, 1).
Image render_normal_guide(const Scene& scene, const Camera& camera, int workers = 0);

// Shading guide: three path-traced passes with uniform materials
// (base color 0.7, (roughness, metallic) = (1,0), (0.5,0.5), (0,1)), each
// tonemapped; the Rec.709 luminance of pass k becomes channel k
// (R = diffuse, G = semi-specular, B = specular).
Image render_shading_guide(const Scene& scene, const EnvironmentProbe& probe,
                           const Camera& camera, const RenderConfig& config);

// One tonemapped uniform-material pass, exposed so tests can check the
// channel packing bit for bit.
Image render_shading_pass(const Scene& scene, const EnvironmentProbe& probe,
                          const Camera& camera, const RenderConfig& config, float roughness,
                          float metallic);

}  // namespace matbake
