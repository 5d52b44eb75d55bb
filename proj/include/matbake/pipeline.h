// Copyright (c) 2026 matbake contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>

#include "matbake/config.h"
#include "matbake/matfield.h"
#include "matbake/recon.h"
#include "matbake/tracer.h"

namespace matbake {

// Fully resolved run configuration; one structured file drives every
// subcommand so a run is reproducible from its echoed config.
struct PipelineConfig {
  // [paths]
  std::string mesh_path;
  std::string probe_path;
  std::string output_dir = "out";
  std::string frames_dir;      // FrameSet directory (reconstruct/warp input, render output)
  std::string checkpoint_path; // reconstruct output, bake/relight input
  std::string truth_dir;       // relight reference frames (optional)
  std::string metrics_dir_a, metrics_dir_b, metrics_masks;

  // [scene]
  bool normalize_mesh = true;
  float probe_rotation = 0.0f;

  // [orbit]
  int orbit_frames = 121;
  float orbit_elevation = 0.35f;
  float orbit_radius = 2.2f;
  float fov_y = 0.7f;
  int width = 1280;
  int height = 704;

  // [render]
  RenderConfig render;
  std::string render_material = "checker";  // constant | checker | checkpoint
  Vec3f const_base_color{0.7f, 0.7f, 0.7f};
  float const_roughness = 0.5f;
  float const_metallic = 0.0f;
  bool write_intrinsics = true;
  bool write_hdr = false;

  // [field]
  FieldConfig field;

  // [optim]
  OptimSettings optim;

  // [bake]
  int bake_resolution = 512;

  // [warp]
  int warp_source_frame = 0;

  // [relight]
  std::string relight_probes;  // semicolon-separated .hdr paths
  int relight_spp = 64;

  static PipelineConfig from_file(const std::string& path);
  static PipelineConfig from_config(const ConfigFile& cfg);
  std::string to_ini() const;  // resolved-config echo
};

// Runs one subcommand (render, guides, reconstruct, bake, relight, metrics,
// warp); outputs land under config.output_dir, and the resolved config is
// echoed there. Throws ConfigError / IoError / NumericError.
void run_pipeline(const PipelineConfig& config, const std::string& subcommand);

}  // namespace matbake
