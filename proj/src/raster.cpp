#include "frameflow/raster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "frameflow/errors.hpp"

namespace frameflow {

namespace {

// hsv with s/v in [0,1], hue in degrees
Rgb hsv_to_rgb(double hue, double sat, double val) {
  const double c = val * sat;
  const double hp = hue / 60.0;
  const double x = c * (1.0 - std::abs(std::fmod(hp, 2.0) - 1.0));
  double r = 0.0, g = 0.0, b = 0.0;
  if (hp < 1.0) {
    r = c; g = x;
  } else if (hp < 2.0) {
    r = x; g = c;
  } else if (hp < 3.0) {
    g = c; b = x;
  } else if (hp < 4.0) {
    g = x; b = c;
  } else if (hp < 5.0) {
    r = x; b = c;
  } else {
    r = c; b = x;
  }
  const double m = val - c;
  return {static_cast<float>(r + m), static_cast<float>(g + m), static_cast<float>(b + m)};
}

}  // namespace

std::vector<Rgb> story_palette(const FrameMesh& mesh) {
  const int n = std::max(1, mesh.group_count);
  std::vector<Rgb> palette(n);
  for (int g = 0; g < n; ++g) {
    // golden-angle hue walk with alternating brightness for luma contrast
    const double hue = std::fmod(g * 137.50776405, 360.0);
    const double val = 0.55 + 0.40 * ((g * 2654435761u >> 8) % 97) / 96.0;
    palette[g] = hsv_to_rgb(hue, 0.85, val);
  }
  return palette;
}

RasterOutput rasterize_full(const FrameMesh& mesh, const Camera& camera,
                            std::span<const Rgb> palette, Rgb background) {
  camera.validate();
  const int w = camera.width;
  const int h = camera.height;

  RasterOutput out;
  out.color = Image::zeros(w, h, 3);
  out.mask = StructureMask::all_off(w, h);
  out.depth.assign(static_cast<std::size_t>(w) * h, std::numeric_limits<float>::infinity());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      out.color.at(x, y, 0) = background.r;
      out.color.at(x, y, 1) = background.g;
      out.color.at(x, y, 2) = background.b;
    }
  }

  std::vector<PixelCoord> projected(mesh.vertices.size());
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
    projected[i] = project(camera, mesh.vertices[i]);
  }

  for (std::size_t fi = 0; fi < mesh.faces.size(); ++fi) {
    const auto& face = mesh.faces[fi];
    PixelCoord a = projected[face[0]];
    PixelCoord b = projected[face[1]];
    PixelCoord c = projected[face[2]];
    if (camera.kind == Projection::kPinhole &&
        (a.depth <= 1e-9 || b.depth <= 1e-9 || c.depth <= 1e-9)) {
      continue;  // behind the eye
    }
    double area = (b.u - a.u) * (c.v - a.v) - (b.v - a.v) * (c.u - a.u);
    if (area == 0.0) {
      continue;
    }
    if (area < 0.0) {
      std::swap(b, c);
      area = -area;
    }
    const int x0 = std::max(0, static_cast<int>(std::floor(std::min({a.u, b.u, c.u}) - 0.5)));
    const int x1 = std::min(w - 1, static_cast<int>(std::ceil(std::max({a.u, b.u, c.u}) - 0.5)));
    const int y0 = std::max(0, static_cast<int>(std::floor(std::min({a.v, b.v, c.v}) - 0.5)));
    const int y1 = std::min(h - 1, static_cast<int>(std::ceil(std::max({a.v, b.v, c.v}) - 0.5)));
    if (x0 > x1 || y0 > y1) {
      continue;
    }

    Rgb color{1.0f, 1.0f, 1.0f};
    if (!palette.empty()) {
      const int group = fi < mesh.face_group.size() ? mesh.face_group[fi] : 0;
      color = palette[static_cast<std::size_t>(group) % palette.size()];
    }

    for (int py = y0; py <= y1; ++py) {
      const double sy = py + 0.5;
      for (int px = x0; px <= x1; ++px) {
        const double sx = px + 0.5;
        const double w0 = (b.u - a.u) * (sy - a.v) - (b.v - a.v) * (sx - a.u);
        const double w1 = (c.u - b.u) * (sy - b.v) - (c.v - b.v) * (sx - b.u);
        const double w2 = (a.u - c.u) * (sy - c.v) - (a.v - c.v) * (sx - c.u);
        if (w0 < 0.0 || w1 < 0.0 || w2 < 0.0) {
          continue;
        }
        // barycentric depth (w1 weights vertex a)
        const double depth = (w1 * a.depth + w2 * b.depth + w0 * c.depth) / area;
        const std::size_t idx = static_cast<std::size_t>(py) * w + px;
        if (depth < out.depth[idx]) {
          out.depth[idx] = static_cast<float>(depth);
          out.mask.on[idx] = 1;
          out.color.at(px, py, 0) = color.r;
          out.color.at(px, py, 1) = color.g;
          out.color.at(px, py, 2) = color.b;
        }
      }
    }
  }
  return out;
}

Image rasterize(const FrameMesh& mesh, const Camera& camera, std::span<const Rgb> palette,
                Rgb background) {
  return rasterize_full(mesh, camera, palette, background).color;
}

StructureMask silhouette_mask(const FrameMesh& mesh, const Camera& camera) {
  return rasterize_full(mesh, camera, {}, {0.0f, 0.0f, 0.0f}).mask;
}

}  // namespace frameflow
