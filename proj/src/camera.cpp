#include "frameflow/camera.hpp"

#include "frameflow/errors.hpp"

namespace frameflow {

void Camera::validate() const {
  if (width <= 0 || height <= 0) {
    throw ConfigError("camera image dimensions must be positive");
  }
  if (kind == Projection::kOrthographic && !(scale > 0.0)) {
    throw ConfigError("orthographic camera needs a positive scale");
  }
  if (kind == Projection::kPinhole && !(focal > 0.0)) {
    throw ConfigError("pinhole camera needs a positive focal length");
  }
}

PixelCoord project(const Camera& camera, const Vec3& p) {
  const double cu = camera.width / 2.0;
  const double cv = camera.height / 2.0;
  if (camera.kind == Projection::kOrthographic) {
    return {cu + (p.z - camera.position.z) / camera.scale,
            cv - (p.y - camera.position.y) / camera.scale,
            // camera sits toward +x, so larger x is closer
            -p.x};
  }
  const double depth = camera.position.x - p.x;
  return {cu + camera.focal * (p.z - camera.position.z) / depth,
          cv - camera.focal * (p.y - camera.position.y) / depth, depth};
}

Vec3 unproject(const Camera& camera, double u, double v, double depth) {
  const double cu = camera.width / 2.0;
  const double cv = camera.height / 2.0;
  if (camera.kind == Projection::kOrthographic) {
    return {-depth, camera.position.y - (v - cv) * camera.scale,
            camera.position.z + (u - cu) * camera.scale};
  }
  return {camera.position.x - depth, camera.position.y - (v - cv) * depth / camera.focal,
          camera.position.z + (u - cu) * depth / camera.focal};
}

}  // namespace frameflow
