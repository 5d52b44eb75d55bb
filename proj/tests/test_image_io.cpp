// Copyright (c) 2026 matbake contributors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "matbake/error.h"
#include "matbake/image.h"

using namespace matbake;

namespace {

std::string temp_path(const char* name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST(Srgb, TransferValues) {
  EXPECT_NEAR(linear_to_srgb(0.0f), 0.0f, 1e-7f);
  EXPECT_NEAR(linear_to_srgb(1.0f), 1.0f, 1e-6f);
  // 1.055 * 0.18^(1/2.4) - 0.055, evaluated by hand.
  EXPECT_NEAR(linear_to_srgb(0.18f), 0.4613f, 5e-4f);
  EXPECT_NEAR(srgb_to_linear(linear_to_srgb(0.42f)), 0.42f, 1e-5f);
  // Derivative vs central differences.
  for (float x : {0.001f, 0.01f, 0.2f, 0.9f}) {
    float fd = (linear_to_srgb(x + 1e-4f) - linear_to_srgb(x - 1e-4f)) / 2e-4f;
    EXPECT_NEAR(linear_to_srgb_derivative(x), fd, 1e-2f * std::abs(fd));
  }
}

TEST(Png, RoundTrip8And16) {
  Image img(7, 5, 3);
  for (size_t i = 0; i < img.data.size(); ++i) img.data[i] = float(i % 256) / 255.0f;
  std::string p8 = temp_path("matbake_t8.png"), p16 = temp_path("matbake_t16.png");
  write_png8(p8, img);
  write_png16(p16, img);

  Image r8 = read_png(p8);
  Image r16 = read_png(p16);
  ASSERT_EQ(r8.width, 7);
  ASSERT_EQ(r8.channels, 3);
  for (size_t i = 0; i < img.data.size(); ++i) {
    EXPECT_NEAR(r8.data[i], img.data[i], 0.5f / 255.0f);
    EXPECT_NEAR(r16.data[i], img.data[i], 0.5f / 65535.0f);
  }
  std::remove(p8.c_str());
  std::remove(p16.c_str());
}

TEST(Png, GrayRoundTrip) {
  Image img(4, 3, 1);
  for (size_t i = 0; i < img.data.size(); ++i) img.data[i] = float(i) / 11.0f;
  std::string p = temp_path("matbake_gray.png");
  write_png8(p, img);
  Image r = read_png(p);
  ASSERT_EQ(r.channels, 1);
  for (size_t i = 0; i < img.data.size(); ++i) EXPECT_NEAR(r.data[i], img.data[i], 0.5f / 255.0f);
  std::remove(p.c_str());
}

TEST(Hdr, RgbeDecodeReference) {
  // RGBE (128,128,128,129) decodes to (1,1,1): (128/256) * 2^(129-128).
  std::string p = temp_path("matbake_ref.hdr");
  {
    std::ofstream f(p, std::ios::binary);
    f << "#?RADIANCE\nFORMAT=32-bit_rle_rgbe\n\n-Y 1 +X 2\n";
    const unsigned char texels[8] = {128, 128, 128, 129, 128, 64, 32, 130};
    f.write(reinterpret_cast<const char*>(texels), 8);
  }
  Image img = read_hdr(p);
  ASSERT_EQ(img.width, 2);
  ASSERT_EQ(img.height, 1);
  EXPECT_NEAR(img.rgb(0, 0).x, 1.0f, 1e-6f);
  EXPECT_NEAR(img.rgb(0, 0).y, 1.0f, 1e-6f);
  EXPECT_NEAR(img.rgb(0, 0).z, 1.0f, 1e-6f);
  // (128/256)*4, (64/256)*4, (32/256)*4
  EXPECT_NEAR(img.rgb(1, 0).x, 2.0f, 1e-6f);
  EXPECT_NEAR(img.rgb(1, 0).y, 1.0f, 1e-6f);
  EXPECT_NEAR(img.rgb(1, 0).z, 0.5f, 1e-6f);
  std::remove(p.c_str());
}

TEST(Hdr, ZeroExponentIsBlack) {
  std::string p = temp_path("matbake_black.hdr");
  {
    std::ofstream f(p, std::ios::binary);
    f << "#?RADIANCE\nFORMAT=32-bit_rle_rgbe\n\n-Y 1 +X 1\n";
    const unsigned char texel[4] = {200, 200, 200, 0};
    f.write(reinterpret_cast<const char*>(texel), 4);
  }
  Image img = read_hdr(p);
  EXPECT_EQ(img.rgb(0, 0).x, 0.0f);
  std::remove(p.c_str());
}

TEST(Hdr, WriteReadRoundTrip) {
  Image img(16, 8, 3);
  for (int y = 0; y < 8; ++y)
    for (int x = 0; x < 16; ++x)
      img.set_rgb(x, y, Vec3f{0.1f + x * 0.3f, 0.02f * (y + 1), 5.0f / (x + 1)});
  std::string p = temp_path("matbake_rt.hdr");
  write_hdr(p, img);
  Image r = read_hdr(p);
  ASSERT_EQ(r.width, 16);
  for (int y = 0; y < 8; ++y)
    for (int x = 0; x < 16; ++x) {
      Vec3f a = img.rgb(x, y), b = r.rgb(x, y);
      // Shared 8-bit exponent: quantization is relative to the max channel.
      float tol = max_component(a) / 128.0f + 1e-5f;
      for (int c = 0; c < 3; ++c) EXPECT_NEAR(b[c], a[c], tol);
    }
  std::remove(p.c_str());
}

TEST(Hdr, BadMagicNamesBytes) {
  std::string p = temp_path("matbake_bad.hdr");
  {
    std::ofstream f(p, std::ios::binary);
    f << "PNGXYZ\njunk\n";
  }
  try {
    read_hdr(p);
    FAIL() << "expected IoError";
  } catch (const IoError& e) {
    EXPECT_NE(std::string(e.what()).find("PNGXYZ"), std::string::npos) << e.what();
  }
  std::remove(p.c_str());
}

TEST(F32, HeaderAndRoundTrip) {
  Image img(3, 2, 3);
  for (size_t i = 0; i < img.data.size(); ++i) img.data[i] = float(i) * 1.25f - 3.0f;
  std::string p = temp_path("matbake_t.f32");
  write_f32(p, img);

  std::ifstream f(p, std::ios::binary);
  uint32_t hdr[3];
  f.read(reinterpret_cast<char*>(hdr), 12);
  EXPECT_EQ(hdr[0], 3u);
  EXPECT_EQ(hdr[1], 2u);
  EXPECT_EQ(hdr[2], 3u);

  Image r = read_f32(p);
  for (size_t i = 0; i < img.data.size(); ++i) EXPECT_EQ(r.data[i], img.data[i]);
  std::remove(p.c_str());
}
