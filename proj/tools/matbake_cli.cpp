// Copyright (c) 2026 matbake contributors
// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end. Deliberately a thin shim over the C API in
// matbake/capi.h: everything below goes through mb_session_*.

#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "matbake/capi.h"

namespace {

struct CommonOptions {
  std::string config;
  std::string output;
  int workers = -1;
  long long seed = -1;
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("-c,--config", opts.config, "Run configuration file (INI)")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("-o,--out", opts.output, "Output directory override");
  cmd->add_option("-w,--workers", opts.workers,
                  "Worker thread count (MATBAKE_WORKERS env var wins)");
  cmd->add_option("-s,--seed", opts.seed, "Random seed override");
}

int run(const CommonOptions& opts, const char* subcommand) {
  mb_session* session = nullptr;
  mb_status status = mb_session_create(opts.config.c_str(), &session);
  if (status != MB_OK) {
    std::fprintf(stderr, "error: %s\n", mb_last_error());
    return int(status);
  }
  if (!opts.output.empty()) mb_session_set_output_dir(session, opts.output.c_str());
  if (opts.workers >= 0) mb_session_set_workers(session, opts.workers);
  if (opts.seed >= 0) mb_session_set_seed(session, (unsigned long long)opts.seed);

  status = mb_session_run(session, subcommand);
  if (status != MB_OK) std::fprintf(stderr, "error: %s\n", mb_last_error());
  mb_session_destroy(session);
  return int(status);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{std::string("matbake ") + mb_version() +
               " - PBR material extraction with a differentiable path tracer"};
  app.require_subcommand(1);

  struct Sub {
    const char* name;
    const char* help;
  };
  const Sub subs[] = {
      {"render", "Render orbit frames (reference frames, masks, intrinsic guides)"},
      {"guides", "Render conditioning guides (camera-space normals + shading passes)"},
      {"reconstruct", "Optimize material maps from a frame set"},
      {"bake", "Bake a field checkpoint into 2D texture maps"},
      {"relight", "Render baked materials under new probes and score them"},
      {"metrics", "PSNR between two frame directories"},
      {"warp", "Depth-warp one frame along the camera trajectory"},
  };

  CommonOptions opts[std::size(subs)];
  for (size_t i = 0; i < std::size(subs); ++i) {
    CLI::App* cmd = app.add_subcommand(subs[i].name, subs[i].help);
    add_common(cmd, opts[i]);
  }

  CLI11_PARSE(app, argc, argv);

  for (size_t i = 0; i < std::size(subs); ++i)
    if (app.got_subcommand(subs[i].name)) return run(opts[i], subs[i].name);
  return 1;
}
