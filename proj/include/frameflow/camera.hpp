#pragma once

#include "frameflow/geometry.hpp"

namespace frameflow {

enum class Projection { kOrthographic, kPinhole };

// Fixed monocular viewpoint looking along -x, so the image u axis tracks +z
// (lateral motion becomes horizontal image motion) and v tracks -y. For the
// orthographic kind, position.y/.z give the world point mapped to the image
// center and scale is meters per pixel; position.x is unused. For the pinhole
// kind, position is the eye and focal is in pixels.
struct Camera {
  Projection kind = Projection::kOrthographic;
  int width = 384;
  int height = 683;
  double scale = 0.01;
  double focal = 1000.0;
  Vec3 position{8.0, 3.25, 0.0};

  void validate() const;  // throws ConfigError
};

// Continuous pixel coordinates; the center of pixel (i, j) is (i+0.5, j+0.5).
// Smaller depth is closer to the camera.
struct PixelCoord {
  double u = 0.0;
  double v = 0.0;
  double depth = 0.0;
};

PixelCoord project(const Camera& camera, const Vec3& p);

// Inverse of project; depth is required for the pinhole kind.
Vec3 unproject(const Camera& camera, double u, double v, double depth);

}  // namespace frameflow
