// Copyright (c) 2026 matbake contributors
// SPDX-License-Identifier: Apache-2.0

#include "matbake/metrics.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "matbake/error.h"

namespace matbake {

double psnr(const Image& a, const Image& b, const Image& mask) {
  if (a.width != b.width || a.height != b.height || a.channels != b.channels)
    throw ConfigError("psnr inputs must have the same shape");

  double sum_sq = 0.0;
  int64_t count = 0;
  for (int y = 0; y < a.height; ++y) {
    for (int x = 0; x < a.width; ++x) {
      if (mask.width > 0 && mask.pixel(x, y)[0] <= 0.5f) continue;
      const float* pa = a.pixel(x, y);
      const float* pb = b.pixel(x, y);
      for (int c = 0; c < a.channels; ++c) {
        double d = double(pa[c]) - double(pb[c]);
        sum_sq += d * d;
      }
      count += a.channels;
    }
  }
  if (count == 0) return 0.0;
  double mse = sum_sq / double(count);
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(1.0 / mse);
}

double psnr(const Image& a, const Image& b) { return psnr(a, b, Image{}); }

std::vector<RelightRow> relight_eval(const Scene& scene, const MaterialSource& material,
                                     const std::vector<EnvironmentProbe>& probes,
                                     const std::vector<std::string>& probe_names,
                                     const std::vector<Camera>& cameras,
                                     const std::vector<Image>& truth,
                                     const std::vector<Image>* masks,
                                     const RenderConfig& config) {
  if (probes.size() != probe_names.size()) throw ConfigError("probe/name count mismatch");
  if (truth.size() != probes.size() * cameras.size())
    throw ConfigError("expected one truth image per probe x camera");

  std::vector<RelightRow> rows;
  for (size_t p = 0; p < probes.size(); ++p) {
    double sum_sq = 0.0;
    int64_t count = 0;
    for (size_t c = 0; c < cameras.size(); ++c) {
      RenderedImage img = render(scene, probes[p], material, cameras[c], config);
      Image display = tonemap_image(img.rgb);
      const Image& ref = truth[p * cameras.size() + c];
      if (ref.width != display.width || ref.height != display.height)
        throw ConfigError("truth image resolution mismatch");
      const Image* mask = masks && c < masks->size() ? &(*masks)[c] : nullptr;
      for (int y = 0; y < display.height; ++y)
        for (int x = 0; x < display.width; ++x) {
          if (mask && mask->pixel(x, y)[0] <= 0.5f) continue;
          Vec3f d = display.rgb(x, y) - ref.rgb(x, y);
          sum_sq += double(d.x) * d.x + double(d.y) * d.y + double(d.z) * d.z;
          count += 3;
        }
    }
    RelightRow row;
    row.probe_name = probe_names[p];
    if (count == 0) {
      row.psnr_db = 0.0;
    } else {
      double mse = sum_sq / double(count);
      row.psnr_db =
          mse == 0.0 ? std::numeric_limits<double>::infinity() : 10.0 * std::log10(1.0 / mse);
    }
    rows.push_back(row);
  }
  return rows;
}

void save_relight_table(const std::string& path, const std::vector<RelightRow>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(path + ": cannot open for writing");
  out << "probe,psnr_db\n";
  char buf[128];
  for (const RelightRow& row : rows) {
    if (std::isinf(row.psnr_db)) {
      out << row.probe_name << ",inf\n";
    } else {
      std::snprintf(buf, sizeof(buf), "%s,%.9g\n", row.probe_name.c_str(), row.psnr_db);
      out << buf;
    }
  }
  if (!out) throw IoError(path + ": write failed");
}

}  // namespace matbake
