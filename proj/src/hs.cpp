#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "frameflow/errors.hpp"
#include "frameflow/flow.hpp"

// Coarse-to-fine Horn-Schunck. Per pyramid level the second image is warped
// by the upsampled flow, the brightness-constancy equation is linearized
// around that flow, and Jacobi sweeps relax the Euler-Lagrange system.

namespace frameflow {

namespace {

struct Grid {
  int w = 0;
  int h = 0;
  std::vector<double> v;

  static Grid zeros(int w, int h) { return {w, h, std::vector<double>(static_cast<std::size_t>(w) * h, 0.0)}; }
  double& at(int x, int y) { return v[static_cast<std::size_t>(y) * w + x]; }
  double at(int x, int y) const { return v[static_cast<std::size_t>(y) * w + x]; }
  double at_clamped(int x, int y) const {
    x = std::clamp(x, 0, w - 1);
    y = std::clamp(y, 0, h - 1);
    return v[static_cast<std::size_t>(y) * w + x];
  }
};

Grid from_image(const Image& img) {
  const Image gray = to_gray(img);
  Grid g = Grid::zeros(gray.width, gray.height);
  for (std::size_t i = 0; i < g.v.size(); ++i) {
    // classic 0..255 intensity scale keeps alpha in its customary range
    g.v[i] = gray.pixels[i] * 255.0;
  }
  return g;
}

double sample_bilinear(const Grid& g, double x, double y) {
  x = std::clamp(x, 0.0, static_cast<double>(g.w - 1));
  y = std::clamp(y, 0.0, static_cast<double>(g.h - 1));
  const int x0 = std::min(static_cast<int>(x), g.w - 2 < 0 ? 0 : g.w - 2);
  const int y0 = std::min(static_cast<int>(y), g.h - 2 < 0 ? 0 : g.h - 2);
  const double fx = x - x0;
  const double fy = y - y0;
  const int x1 = std::min(x0 + 1, g.w - 1);
  const int y1 = std::min(y0 + 1, g.h - 1);
  return (1.0 - fy) * ((1.0 - fx) * g.at(x0, y0) + fx * g.at(x1, y0)) +
         fy * ((1.0 - fx) * g.at(x0, y1) + fx * g.at(x1, y1));
}

Grid gaussian_blur(const Grid& g, double sigma) {
  if (sigma <= 0.0) {
    return g;
  }
  const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
  std::vector<double> kernel(2 * radius + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    kernel[i + radius] = std::exp(-0.5 * (i * i) / (sigma * sigma));
    sum += kernel[i + radius];
  }
  for (double& k : kernel) {
    k /= sum;
  }
  Grid tmp = Grid::zeros(g.w, g.h);
  for (int y = 0; y < g.h; ++y) {
    for (int x = 0; x < g.w; ++x) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i) {
        acc += kernel[i + radius] * g.at_clamped(x + i, y);
      }
      tmp.at(x, y) = acc;
    }
  }
  Grid out = Grid::zeros(g.w, g.h);
  for (int y = 0; y < g.h; ++y) {
    for (int x = 0; x < g.w; ++x) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i) {
        acc += kernel[i + radius] * tmp.at_clamped(x, y + i);
      }
      out.at(x, y) = acc;
    }
  }
  return out;
}

Grid downscale(const Grid& g, int new_w, int new_h, double factor) {
  const double sigma = 0.5 * std::sqrt(1.0 / (factor * factor) - 1.0);
  const Grid smoothed = gaussian_blur(g, sigma);
  Grid out = Grid::zeros(new_w, new_h);
  const double sx = static_cast<double>(g.w) / new_w;
  const double sy = static_cast<double>(g.h) / new_h;
  for (int y = 0; y < new_h; ++y) {
    for (int x = 0; x < new_w; ++x) {
      out.at(x, y) = sample_bilinear(smoothed, (x + 0.5) * sx - 0.5, (y + 0.5) * sy - 0.5);
    }
  }
  return out;
}

Grid upscale_flow(const Grid& g, int new_w, int new_h, double value_scale) {
  Grid out = Grid::zeros(new_w, new_h);
  const double sx = static_cast<double>(g.w) / new_w;
  const double sy = static_cast<double>(g.h) / new_h;
  for (int y = 0; y < new_h; ++y) {
    for (int x = 0; x < new_w; ++x) {
      out.at(x, y) =
          value_scale * sample_bilinear(g, (x + 0.5) * sx - 0.5, (y + 0.5) * sy - 0.5);
    }
  }
  return out;
}

// Horn-Schunck neighborhood average: 1/6 edges, 1/12 diagonals.
double local_average(const Grid& g, int x, int y) {
  return (g.at_clamped(x - 1, y) + g.at_clamped(x + 1, y) + g.at_clamped(x, y - 1) +
          g.at_clamped(x, y + 1)) /
             6.0 +
         (g.at_clamped(x - 1, y - 1) + g.at_clamped(x + 1, y - 1) + g.at_clamped(x - 1, y + 1) +
          g.at_clamped(x + 1, y + 1)) /
             12.0;
}

// central differences inside, one-sided on the border
void spatial_gradient(const Grid& g, Grid& gx, Grid& gy) {
  for (int y = 0; y < g.h; ++y) {
    for (int x = 0; x < g.w; ++x) {
      if (x == 0) {
        gx.at(x, y) = g.at(1, y) - g.at(0, y);
      } else if (x == g.w - 1) {
        gx.at(x, y) = g.at(x, y) - g.at(x - 1, y);
      } else {
        gx.at(x, y) = 0.5 * (g.at(x + 1, y) - g.at(x - 1, y));
      }
      if (y == 0) {
        gy.at(x, y) = g.at(x, 1) - g.at(x, 0);
      } else if (y == g.h - 1) {
        gy.at(x, y) = g.at(x, y) - g.at(x, y - 1);
      } else {
        gy.at(x, y) = 0.5 * (g.at(x, y + 1) - g.at(x, y - 1));
      }
    }
  }
}

void solve_level(const Grid& first, const Grid& second, Grid& u, Grid& v, double alpha,
                 int iterations) {
  const int w = first.w;
  const int h = first.h;

  // warp the second image by the incoming flow estimate
  Grid warped = Grid::zeros(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      warped.at(x, y) = sample_bilinear(second, x + u.at(x, y), y + v.at(x, y));
    }
  }

  Grid ix = Grid::zeros(w, h);
  Grid iy = Grid::zeros(w, h);
  Grid avg = Grid::zeros(w, h);
  for (std::size_t i = 0; i < avg.v.size(); ++i) {
    avg.v[i] = 0.5 * (first.v[i] + warped.v[i]);
  }
  spatial_gradient(avg, ix, iy);

  // residual constant: It linearized around the warp flow (u0, v0)
  Grid con = Grid::zeros(w, h);
  for (std::size_t i = 0; i < con.v.size(); ++i) {
    con.v[i] = (warped.v[i] - first.v[i]) - ix.v[i] * u.v[i] - iy.v[i] * v.v[i];
  }

  const double alpha2 = alpha * alpha;
  Grid un = Grid::zeros(w, h);
  Grid vn = Grid::zeros(w, h);
  for (int it = 0; it < iterations; ++it) {
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const double ubar = local_average(u, x, y);
        const double vbar = local_average(v, x, y);
        const double gx = ix.at(x, y);
        const double gy = iy.at(x, y);
        const double t = (gx * ubar + gy * vbar + con.at(x, y)) / (alpha2 + gx * gx + gy * gy);
        un.at(x, y) = ubar - gx * t;
        vn.at(x, y) = vbar - gy * t;
      }
    }
    std::swap(u, un);
    std::swap(v, vn);
  }
}

}  // namespace

FlowField dense_flow(const Image& first, const Image& second, const FlowSolverConfig& config) {
  config.validate();
  if (first.width != second.width || first.height != second.height) {
    throw ShapeError("frame pair dimensions differ: " + std::to_string(first.width) + "x" +
                     std::to_string(first.height) + " vs " + std::to_string(second.width) + "x" +
                     std::to_string(second.height));
  }

  std::vector<Grid> pyr_a;
  std::vector<Grid> pyr_b;
  pyr_a.push_back(from_image(first));
  pyr_b.push_back(from_image(second));
  for (int level = 1; level < config.levels; ++level) {
    const Grid& prev = pyr_a.back();
    const int nw = std::max(4, static_cast<int>(std::lround(prev.w * config.factor)));
    const int nh = std::max(4, static_cast<int>(std::lround(prev.h * config.factor)));
    if (nw == prev.w && nh == prev.h) {
      break;  // cannot shrink further
    }
    pyr_a.push_back(downscale(prev, nw, nh, config.factor));
    pyr_b.push_back(downscale(pyr_b.back(), nw, nh, config.factor));
  }

  Grid u = Grid::zeros(pyr_a.back().w, pyr_a.back().h);
  Grid v = Grid::zeros(pyr_a.back().w, pyr_a.back().h);
  for (int level = static_cast<int>(pyr_a.size()) - 1; level >= 0; --level) {
    if (level < static_cast<int>(pyr_a.size()) - 1) {
      const double su = static_cast<double>(pyr_a[level].w) / u.w;
      const double sv = static_cast<double>(pyr_a[level].h) / v.h;
      u = upscale_flow(u, pyr_a[level].w, pyr_a[level].h, su);
      v = upscale_flow(v, pyr_a[level].w, pyr_a[level].h, sv);
    }
    solve_level(pyr_a[level], pyr_b[level], u, v, config.alpha, config.iterations);
  }

  FlowField out = FlowField::zeros(first.width, first.height);
  for (std::size_t i = 0; i < out.u.size(); ++i) {
    out.u[i] = static_cast<float>(u.v[i]);
    out.v[i] = static_cast<float>(v.v[i]);
  }
  return out;
}

}  // namespace frameflow
