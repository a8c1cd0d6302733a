#include "frameflow/flow.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <memory>
#include <numbers>
#include <string>

#include "frameflow/errors.hpp"

namespace frameflow {

namespace {

constexpr char kFloMagic[4] = {'P', 'I', 'E', 'H'};

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

}  // namespace

FlowField FlowField::zeros(int width, int height) {
  FlowField f;
  f.width = width;
  f.height = height;
  f.u.assign(static_cast<std::size_t>(width) * height, 0.0f);
  f.v.assign(static_cast<std::size_t>(width) * height, 0.0f);
  return f;
}

FlowField read_flo(const std::filesystem::path& path) {
  FilePtr f(std::fopen(path.string().c_str(), "rb"));
  if (!f) {
    throw IoError("cannot open " + path.string());
  }
  char magic[4];
  std::int32_t dims[2];
  if (std::fread(magic, 1, 4, f.get()) != 4 || std::memcmp(magic, kFloMagic, 4) != 0) {
    throw IoError(path.string() + " is not a .flo file (bad magic)");
  }
  if (std::fread(dims, sizeof(std::int32_t), 2, f.get()) != 2 || dims[0] <= 0 || dims[1] <= 0) {
    throw IoError("bad .flo dimensions in " + path.string());
  }
  FlowField flow = FlowField::zeros(dims[0], dims[1]);
  const std::size_t n = flow.u.size();
  std::vector<float> interleaved(n * 2);
  if (std::fread(interleaved.data(), sizeof(float), n * 2, f.get()) != n * 2) {
    throw IoError("truncated .flo payload in " + path.string());
  }
  for (std::size_t i = 0; i < n; ++i) {
    flow.u[i] = interleaved[2 * i];
    flow.v[i] = interleaved[2 * i + 1];
  }
  return flow;
}

void write_flo(const FlowField& flow, const std::filesystem::path& path) {
  FilePtr f(std::fopen(path.string().c_str(), "wb"));
  if (!f) {
    throw IoError("cannot open " + path.string() + " for writing");
  }
  const std::int32_t dims[2] = {flow.width, flow.height};
  const std::size_t n = flow.u.size();
  std::vector<float> interleaved(n * 2);
  for (std::size_t i = 0; i < n; ++i) {
    interleaved[2 * i] = flow.u[i];
    interleaved[2 * i + 1] = flow.v[i];
  }
  if (std::fwrite(kFloMagic, 1, 4, f.get()) != 4 ||
      std::fwrite(dims, sizeof(std::int32_t), 2, f.get()) != 2 ||
      std::fwrite(interleaved.data(), sizeof(float), n * 2, f.get()) != n * 2) {
    throw IoError("short write to " + path.string());
  }
}

Image flow_to_color(const FlowField& flow, double max_mag) {
  if (!(max_mag > 0.0)) {
    throw ConfigError("flow color max_mag must be positive");
  }
  Image out = Image::zeros(flow.width, flow.height, 3);
  for (int y = 0; y < flow.height; ++y) {
    for (int x = 0; x < flow.width; ++x) {
      const std::size_t i = flow.index(x, y);
      const double u = flow.u[i];
      const double v = flow.v[i];
      const double mag = std::hypot(u, v);
      const double sat = std::min(1.0, mag / max_mag);
      double hue = std::atan2(v, u) * 180.0 / std::numbers::pi;
      if (hue < 0.0) {
        hue += 360.0;
      }
      // hsv -> rgb with value 1
      const double c = sat;
      const double hp = hue / 60.0;
      const double xf = c * (1.0 - std::abs(std::fmod(hp, 2.0) - 1.0));
      double r = 0.0, g = 0.0, b = 0.0;
      if (hp < 1.0) {
        r = c; g = xf;
      } else if (hp < 2.0) {
        r = xf; g = c;
      } else if (hp < 3.0) {
        g = c; b = xf;
      } else if (hp < 4.0) {
        g = xf; b = c;
      } else if (hp < 5.0) {
        r = xf; b = c;
      } else {
        r = c; b = xf;
      }
      const double m = 1.0 - c;
      out.at(x, y, 0) = static_cast<float>(r + m);
      out.at(x, y, 1) = static_cast<float>(g + m);
      out.at(x, y, 2) = static_cast<float>(b + m);
    }
  }
  return out;
}

FlowField apply_mask(const FlowField& flow, const StructureMask& mask) {
  if (flow.width != mask.width || flow.height != mask.height) {
    throw ShapeError("flow " + std::to_string(flow.width) + "x" + std::to_string(flow.height) +
                     " vs mask " + std::to_string(mask.width) + "x" +
                     std::to_string(mask.height));
  }
  FlowField out = flow;
  for (std::size_t i = 0; i < out.u.size(); ++i) {
    if (!mask.on[i]) {
      out.u[i] = 0.0f;
      out.v[i] = 0.0f;
    }
  }
  return out;
}

void FlowSolverConfig::validate() const {
  if (!(alpha > 0.0)) {
    throw ConfigError("flow solver alpha must be positive");
  }
  if (iterations < 1) {
    throw ConfigError("flow solver needs at least one iteration per level");
  }
  if (levels < 1) {
    throw ConfigError("flow solver needs at least one pyramid level");
  }
  if (!(factor > 0.0) || !(factor < 1.0)) {
    throw ConfigError("pyramid factor must be in (0, 1)");
  }
}

}  // namespace frameflow
