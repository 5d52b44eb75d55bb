// Copyright (c) 2026 matbake contributors
// SPDX-License-Identifier: Apache-2.0

#include "matbake/image.h"

#include <png.h>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <memory>

#include "matbake/error.h"

namespace matbake {

float linear_to_srgb(float x) {
  if (x <= 0.0031308f) return 12.92f * x;
  return 1.055f * std::pow(x, 1.0f / 2.4f) - 0.055f;
}

float srgb_to_linear(float s) {
  if (s <= 0.04045f) return s / 12.92f;
  return std::pow((s + 0.055f) / 1.055f, 2.4f);
}

float linear_to_srgb_derivative(float x) {
  if (x <= 0.0031308f) return 12.92f;
  return (1.055f / 2.4f) * std::pow(x, 1.0f / 2.4f - 1.0f);
}

namespace {

struct FileCloser {
  void operator()(FILE* f) const { if (f) std::fclose(f); }
};
using FilePtr = std::unique_ptr<FILE, FileCloser>;

[[noreturn]] void fail_io(const std::string& path, const std::string& what) {
  throw IoError(path + ": " + what);
}

}  // namespace

Image read_png(const std::string& path) {
  FilePtr fp(std::fopen(path.c_str(), "rb"));
  if (!fp) fail_io(path, "cannot open for reading");

  png_byte header[8];
  if (std::fread(header, 1, 8, fp.get()) != 8 || png_sig_cmp(header, 0, 8))
    fail_io(path, "not a PNG file");

  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png_create_info_struct(png);
  if (!png || !info) fail_io(path, "libpng init failed");
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    fail_io(path, "PNG decode error");
  }
  png_init_io(png, fp.get());
  png_set_sig_bytes(png, 8);
  png_read_info(png, info);

  png_uint_32 w = png_get_image_width(png, info);
  png_uint_32 h = png_get_image_height(png, info);
  int bit_depth = png_get_bit_depth(png, info);
  int color_type = png_get_color_type(png, info);

  if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  png_set_strip_alpha(png);
  if (bit_depth == 16) png_set_swap(png);  // little-endian reads below
  png_read_update_info(png, info);

  color_type = png_get_color_type(png, info);
  bit_depth = png_get_bit_depth(png, info);
  int channels =
      (color_type == PNG_COLOR_TYPE_GRAY || color_type == PNG_COLOR_TYPE_GRAY_ALPHA) ? 1 : 3;

  Image img(int(w), int(h), channels);
  size_t rowbytes = png_get_rowbytes(png, info);
  std::vector<png_byte> row(rowbytes);
  float scale = bit_depth == 16 ? 1.0f / 65535.0f : 1.0f / 255.0f;
  for (png_uint_32 y = 0; y < h; ++y) {
    png_read_row(png, row.data(), nullptr);
    for (png_uint_32 x = 0; x < w; ++x) {
      for (int c = 0; c < channels; ++c) {
        float v;
        if (bit_depth == 16) {
          uint16_t raw;
          std::memcpy(&raw, row.data() + (size_t(x) * channels + c) * 2, 2);
          v = raw * scale;
        } else {
          v = row[size_t(x) * channels + c] * scale;
        }
        img.pixel(int(x), int(y))[c] = v;
      }
    }
  }
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return img;
}

namespace {

void write_png_impl(const std::string& path, const Image& img, int bit_depth) {
  if (img.channels != 1 && img.channels != 3)
    throw IoError(path + ": PNG writer supports 1 or 3 channels");
  FilePtr fp(std::fopen(path.c_str(), "wb"));
  if (!fp) fail_io(path, "cannot open for writing");

  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png_create_info_struct(png);
  if (!png || !info) fail_io(path, "libpng init failed");
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    fail_io(path, "PNG encode error");
  }
  png_init_io(png, fp.get());
  int color_type = img.channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB;
  png_set_IHDR(png, info, img.width, img.height, bit_depth, color_type, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);

  float maxval = bit_depth == 16 ? 65535.0f : 255.0f;
  std::vector<png_byte> row(size_t(img.width) * img.channels * (bit_depth / 8));
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      for (int c = 0; c < img.channels; ++c) {
        float v = clampf(img.pixel(x, y)[c], 0.0f, 1.0f);
        uint32_t q = uint32_t(std::lround(v * maxval));
        if (bit_depth == 16) {
          row[(size_t(x) * img.channels + c) * 2 + 0] = png_byte(q >> 8);
          row[(size_t(x) * img.channels + c) * 2 + 1] = png_byte(q & 0xff);
        } else {
          row[size_t(x) * img.channels + c] = png_byte(q);
        }
      }
    }
    png_write_row(png, row.data());
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

}  // namespace

void write_png8(const std::string& path, const Image& img) { write_png_impl(path, img, 8); }
void write_png16(const std::string& path, const Image& img) { write_png_impl(path, img, 16); }

// ----------------------------------------------------------------------------
// Radiance RGBE
// ----------------------------------------------------------------------------

namespace {

Vec3f rgbe_to_linear(const uint8_t rgbe[4]) {
  if (rgbe[3] == 0) return Vec3f{0, 0, 0};
  float f = std::ldexp(1.0f, int(rgbe[3]) - 128) / 256.0f;
  return {rgbe[0] * f, rgbe[1] * f, rgbe[2] * f};
}

void linear_to_rgbe(const Vec3f& c, uint8_t rgbe[4]) {
  float m = max_component(c);
  if (m < 1e-32f) {
    rgbe[0] = rgbe[1] = rgbe[2] = rgbe[3] = 0;
    return;
  }
  int e;
  float scale = std::frexp(m, &e);  // m = scale * 2^e, scale in [0.5, 1)
  scale = scale * 256.0f / m;
  rgbe[0] = uint8_t(clampf(c.x * scale, 0.0f, 255.0f));
  rgbe[1] = uint8_t(clampf(c.y * scale, 0.0f, 255.0f));
  rgbe[2] = uint8_t(clampf(c.z * scale, 0.0f, 255.0f));
  rgbe[3] = uint8_t(e + 128);
}

bool read_hdr_scanline(FILE* f, uint8_t* rgbe_row, int width, const std::string& path) {
  uint8_t head[4];
  if (std::fread(head, 1, 4, f) != 4) return false;
  if (head[0] == 2 && head[1] == 2 && ((head[2] << 8) | head[3]) == width && width >= 8 &&
      width < 32768) {
    // Adaptive RLE: four separate component planes.
    for (int c = 0; c < 4; ++c) {
      int x = 0;
      while (x < width) {
        int code = std::fgetc(f);
        if (code == EOF) fail_io(path, "truncated RLE scanline");
        if (code > 128) {
          int count = code - 128;
          int value = std::fgetc(f);
          if (value == EOF || x + count > width) fail_io(path, "bad RLE run");
          for (int i = 0; i < count; ++i) rgbe_row[(x + i) * 4 + c] = uint8_t(value);
          x += count;
        } else {
          int count = code;
          if (count == 0 || x + count > width) fail_io(path, "bad RLE literal");
          for (int i = 0; i < count; ++i) {
            int value = std::fgetc(f);
            if (value == EOF) fail_io(path, "truncated RLE literal");
            rgbe_row[(x + i) * 4 + c] = uint8_t(value);
          }
          x += count;
        }
      }
    }
    return true;
  }
  // Flat scanline (possibly with old-style RLE, which we reject as rare).
  if (head[0] == 1 && head[1] == 1 && head[2] == 1) fail_io(path, "old-style RLE unsupported");
  std::memcpy(rgbe_row, head, 4);
  if (width > 1) {
    if (std::fread(rgbe_row + 4, 4, size_t(width) - 1, f) != size_t(width) - 1)
      fail_io(path, "truncated scanline");
  }
  return true;
}

}  // namespace

Image read_hdr(const std::string& path) {
  FilePtr fp(std::fopen(path.c_str(), "rb"));
  if (!fp) fail_io(path, "cannot open for reading");

  char line[512];
  if (!std::fgets(line, sizeof(line), fp.get())) fail_io(path, "empty file");
  if (std::strncmp(line, "#?RADIANCE", 10) != 0 && std::strncmp(line, "#?RGBE", 6) != 0) {
    char magic[16] = {0};
    std::memcpy(magic, line, std::min<size_t>(8, std::strlen(line)));
    for (char& ch : magic)
      if (ch == '\n' || ch == '\r') ch = 0;
    fail_io(path, std::string("unsupported format, magic bytes '") + magic + "'");
  }

  bool format_ok = false;
  while (std::fgets(line, sizeof(line), fp.get())) {
    if (line[0] == '\n' || (line[0] == '\r' && line[1] == '\n')) break;  // end of header
    if (std::strncmp(line, "FORMAT=32-bit_rle_rgbe", 22) == 0) format_ok = true;
  }
  if (!format_ok) fail_io(path, "missing FORMAT=32-bit_rle_rgbe header");

  int width = 0, height = 0;
  if (!std::fgets(line, sizeof(line), fp.get()) ||
      std::sscanf(line, "-Y %d +X %d", &height, &width) != 2)
    fail_io(path, "unsupported resolution line (expected '-Y h +X w')");
  if (width <= 0 || height <= 0) fail_io(path, "bad image dimensions");

  Image img(width, height, 3);
  std::vector<uint8_t> row(size_t(width) * 4);
  for (int y = 0; y < height; ++y) {
    if (!read_hdr_scanline(fp.get(), row.data(), width, path)) fail_io(path, "truncated image");
    for (int x = 0; x < width; ++x) img.set_rgb(x, y, rgbe_to_linear(&row[size_t(x) * 4]));
  }
  return img;
}

void write_hdr(const std::string& path, const Image& img) {
  FilePtr fp(std::fopen(path.c_str(), "wb"));
  if (!fp) fail_io(path, "cannot open for writing");
  std::fprintf(fp.get(), "#?RADIANCE\nFORMAT=32-bit_rle_rgbe\n\n-Y %d +X %d\n", img.height,
               img.width);
  uint8_t rgbe[4];
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x) {
      linear_to_rgbe(img.rgb(x, y), rgbe);
      if (std::fwrite(rgbe, 1, 4, fp.get()) != 4) fail_io(path, "write failed");
    }
}

// ----------------------------------------------------------------------------
// Raw float dumps
// ----------------------------------------------------------------------------

Image read_f32(const std::string& path) {
  FilePtr fp(std::fopen(path.c_str(), "rb"));
  if (!fp) fail_io(path, "cannot open for reading");
  uint32_t hdr[3];
  if (std::fread(hdr, 4, 3, fp.get()) != 3) fail_io(path, "truncated header");
  if (hdr[0] == 0 || hdr[1] == 0 || hdr[2] == 0 || hdr[2] > 4 || hdr[0] > (1u << 20) ||
      hdr[1] > (1u << 20))
    fail_io(path, "implausible f32 header");
  Image img(static_cast<int>(hdr[0]), static_cast<int>(hdr[1]), static_cast<int>(hdr[2]));
  if (std::fread(img.data.data(), 4, img.data.size(), fp.get()) != img.data.size())
    fail_io(path, "truncated pixel data");
  return img;
}

void write_f32(const std::string& path, const Image& img) {
  FilePtr fp(std::fopen(path.c_str(), "wb"));
  if (!fp) fail_io(path, "cannot open for writing");
  uint32_t hdr[3] = {uint32_t(img.width), uint32_t(img.height), uint32_t(img.channels)};
  if (std::fwrite(hdr, 4, 3, fp.get()) != 3 ||
      std::fwrite(img.data.data(), 4, img.data.size(), fp.get()) != img.data.size())
    fail_io(path, "write failed");
}

}  // namespace matbake
