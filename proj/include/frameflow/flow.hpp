#pragma once

#include <filesystem>
#include <vector>

#include "frameflow/image.hpp"

namespace frameflow {

// Per-pixel displacement in pixels between two images, row-major.
struct FlowField {
  int width = 0;
  int height = 0;
  std::vector<float> u;
  std::vector<float> v;

  static FlowField zeros(int width, int height);

  std::size_t index(int x, int y) const { return static_cast<std::size_t>(y) * width + x; }
};

// Middlebury .flo: "PIEH" magic, int32 width/height, then row-major
// interleaved little-endian float32 (u, v).
FlowField read_flo(const std::filesystem::path& path);
void write_flo(const FlowField& flow, const std::filesystem::path& path);

// Color-wheel visualization: hue from the flow direction, saturation from the
// magnitude clamped at max_mag, value 1. Zero flow maps to white.
Image flow_to_color(const FlowField& flow, double max_mag);

// Keeps vectors on structure pixels, zeroes the rest.
FlowField apply_mask(const FlowField& flow, const StructureMask& mask);

struct FlowSolverConfig {
  double alpha = 15.0;   // smoothness weight
  int iterations = 100;  // per pyramid level
  int levels = 4;
  double factor = 0.5;   // pyramid downscale factor

  void validate() const;  // throws ConfigError
};

// Coarse-to-fine variational dense flow from `first` to `second`. Inputs of
// equal dimensions; rgb is converted by luminance.
FlowField dense_flow(const Image& first, const Image& second, const FlowSolverConfig& config);

}  // namespace frameflow
