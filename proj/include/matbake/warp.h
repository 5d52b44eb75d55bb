// Copyright (c) 2026 matbake contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "matbake/bvh.h"
#include "matbake/camera.h"
#include "matbake/image.h"

namespace matbake {

// Per-pixel primary-hit distance along the camera ray; 0 marks a miss.
constexpr float kDepthMiss = 0.0f;
Image render_depth(const Scene& scene, const Camera& camera, int workers = 0);

struct WarpResult {
  Image rgb;   // 3 channels
  Image mask;  // 1 channel; 1 where at least one source pixel splatted
};

// Forward reprojection of src into dst_cam: each valid source pixel is
// unprojected with its depth, reprojected, and splatted to the nearest
// destination pixel with a z-test (ties break toward the lower source index
// so results are deterministic). Unsplatted pixels keep mask 0; those are the
// disocclusions.
WarpResult warp_image(const Image& src, const Image& src_depth, const Camera& src_cam,
                      const Camera& dst_cam);

}  // namespace matbake
