#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace frameflow {

// Row-major raster with 1 (gray) or 3 (rgb) channels, values in [0, 1].
struct Image {
  int width = 0;
  int height = 0;
  int channels = 1;
  std::vector<float> pixels;

  static Image zeros(int width, int height, int channels);

  float& at(int x, int y, int c = 0) { return pixels[(static_cast<std::size_t>(y) * width + x) * channels + c]; }
  float at(int x, int y, int c = 0) const { return pixels[(static_cast<std::size_t>(y) * width + x) * channels + c]; }
};

// Binary per-pixel structure indicator, dimensions match the associated image.
struct StructureMask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> on;  // 1 = structure

  static StructureMask all_off(int width, int height);

  bool at(int x, int y) const { return on[static_cast<std::size_t>(y) * width + x] != 0; }
  void set(int x, int y, bool value) { on[static_cast<std::size_t>(y) * width + x] = value ? 1 : 0; }
  std::size_t count_on() const;
};

Image to_gray(const Image& img);

Image resize_bilinear(const Image& img, int new_width, int new_height);

// Appends zero rows until the height is the next multiple of `multiple`;
// existing content is untouched.
Image pad_height_to_multiple(const Image& img, int multiple);

// 8-bit binary PGM (P5) / PPM (P6).
Image read_pnm(const std::filesystem::path& path);
void write_pnm(const Image& img, const std::filesystem::path& path);

// Masks as PGM with 0 / 255.
StructureMask read_mask_pgm(const std::filesystem::path& path);
void write_mask_pgm(const StructureMask& mask, const std::filesystem::path& path);

}  // namespace frameflow
