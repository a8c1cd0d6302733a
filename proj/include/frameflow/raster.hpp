#pragma once

#include <span>
#include <vector>

#include "frameflow/camera.hpp"
#include "frameflow/image.hpp"
#include "frameflow/mesh.hpp"

namespace frameflow {

struct Rgb {
  float r = 0.0f;
  float g = 0.0f;
  float b = 0.0f;
};

struct RasterOutput {
  Image color;
  StructureMask mask;
  std::vector<float> depth;  // row-major, +inf where uncovered
};

// Distinct flat color per face group so member edges carry flow signal.
std::vector<Rgb> story_palette(const FrameMesh& mesh);

// Z-buffered flat-color rasterization, no anti-aliasing, no lighting.
// Palette is indexed by face group (modulo its size).
RasterOutput rasterize_full(const FrameMesh& mesh, const Camera& camera,
                            std::span<const Rgb> palette, Rgb background = {0.0f, 0.0f, 0.0f});

Image rasterize(const FrameMesh& mesh, const Camera& camera, std::span<const Rgb> palette,
                Rgb background = {0.0f, 0.0f, 0.0f});

// True wherever any mesh face covers the pixel.
StructureMask silhouette_mask(const FrameMesh& mesh, const Camera& camera);

}  // namespace frameflow
