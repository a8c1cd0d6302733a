#include "frameflow/basis.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "frameflow/errors.hpp"
#include "frameflow/raster.hpp"
#include "frameflow/spline.hpp"

namespace frameflow {

FlowBasis build_flow_basis(const FrameMesh& mesh, const Camera& camera, double eps) {
  const RasterOutput ref = rasterize_full(mesh, camera, {});
  const std::size_t n_sections = mesh.layout.section_count();
  const double h = mesh.layout.total_height;

  std::vector<CubicSpline> unit_splines;
  unit_splines.reserve(n_sections);
  for (std::size_t i = 0; i < n_sections; ++i) {
    PoseParams unit(n_sections, 0.0);
    unit[i] = eps;
    unit_splines.push_back(section_spline(mesh.layout, unit));
  }

  FlowBasis basis;
  basis.mask = ref.mask;
  basis.fields.assign(n_sections, FlowField::zeros(camera.width, camera.height));

  for (int py = 0; py < camera.height; ++py) {
    for (int px = 0; px < camera.width; ++px) {
      const std::size_t idx = static_cast<std::size_t>(py) * camera.width + px;
      if (!ref.mask.on[idx]) {
        continue;
      }
      const double u = px + 0.5;
      const double v = py + 0.5;
      const Vec3 p = unproject(camera, u, v, ref.depth[idx]);
      const PixelCoord at_rest = project(camera, p);
      for (std::size_t i = 0; i < n_sections; ++i) {
        Vec3 displaced = p;
        displaced.z += unit_splines[i](p.y / h) * h;
        const PixelCoord moved = project(camera, displaced);
        basis.fields[i].u[idx] = static_cast<float>((moved.u - at_rest.u) / eps);
        basis.fields[i].v[idx] = static_cast<float>((moved.v - at_rest.v) / eps);
      }
    }
  }
  return basis;
}

PoseParams estimate_lsq(const FlowField& flow, const FlowBasis& basis) {
  const std::size_t n = basis.fields.size();
  if (n == 0) {
    throw ShapeError("flow basis is empty");
  }
  for (const FlowField& b : basis.fields) {
    if (b.width != flow.width || b.height != flow.height) {
      throw ShapeError("flow dimensions do not match the basis");
    }
  }
  if (basis.mask.width != flow.width || basis.mask.height != flow.height) {
    throw ShapeError("mask dimensions do not match the flow");
  }

  // normal equations over mask pixels
  std::vector<double> gram(n * n, 0.0);
  std::vector<double> rhs(n, 0.0);
  const std::size_t pixels = flow.u.size();
  for (std::size_t p = 0; p < pixels; ++p) {
    if (!basis.mask.on[p]) {
      continue;
    }
    for (std::size_t i = 0; i < n; ++i) {
      const double biu = basis.fields[i].u[p];
      const double biv = basis.fields[i].v[p];
      rhs[i] += biu * flow.u[p] + biv * flow.v[p];
      for (std::size_t j = i; j < n; ++j) {
        gram[i * n + j] += biu * basis.fields[j].u[p] + biv * basis.fields[j].v[p];
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      gram[i * n + j] = gram[j * n + i];
    }
  }

  double max_diag = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    max_diag = std::max(max_diag, gram[i * n + i]);
  }
  if (!(max_diag > 0.0)) {
    throw NumericError("flow basis is rank deficient: every section responds with zero flow");
  }

  // gaussian elimination with partial pivoting; a tiny pivot in column k
  // marks section k as a combination of the sections already eliminated
  const double tol = 1e-12 * max_diag;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t pivot = k;
    for (std::size_t r = k + 1; r < n; ++r) {
      if (std::abs(gram[r * n + k]) > std::abs(gram[pivot * n + k])) {
        pivot = r;
      }
    }
    if (std::abs(gram[pivot * n + k]) < tol) {
      std::string sections;
      for (std::size_t c = k; c < n; ++c) {
        sections += (sections.empty() ? "" : ", ") + std::to_string(c + 1);
      }
      throw NumericError("flow basis is rank deficient; offending sections: " + sections);
    }
    if (pivot != k) {
      for (std::size_t c = 0; c < n; ++c) {
        std::swap(gram[pivot * n + c], gram[k * n + c]);
      }
      std::swap(rhs[pivot], rhs[k]);
    }
    for (std::size_t r = k + 1; r < n; ++r) {
      const double factor = gram[r * n + k] / gram[k * n + k];
      for (std::size_t c = k; c < n; ++c) {
        gram[r * n + c] -= factor * gram[k * n + c];
      }
      rhs[r] -= factor * rhs[k];
    }
  }

  PoseParams pose(n, 0.0);
  for (std::size_t i = n; i-- > 0;) {
    double acc = rhs[i];
    for (std::size_t j = i + 1; j < n; ++j) {
      acc -= gram[i * n + j] * pose[j];
    }
    pose[i] = acc / gram[i * n + i];
  }
  return pose;
}

}  // namespace frameflow
