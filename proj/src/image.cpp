#include "frameflow/image.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <memory>
#include <numeric>
#include <string>

#include "frameflow/errors.hpp"

namespace frameflow {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

// next whitespace-delimited token, skipping '#' comments
int read_pnm_int(std::FILE* f, const std::string& path) {
  int ch = std::fgetc(f);
  while (ch != EOF) {
    if (ch == '#') {
      while (ch != EOF && ch != '\n') ch = std::fgetc(f);
    } else if (!std::isspace(ch)) {
      break;
    }
    ch = std::fgetc(f);
  }
  if (ch == EOF || !std::isdigit(ch)) {
    throw IoError("malformed pnm header in " + path);
  }
  int value = 0;
  while (ch != EOF && std::isdigit(ch)) {
    value = value * 10 + (ch - '0');
    ch = std::fgetc(f);
  }
  return value;
}

std::uint8_t to_byte(float v) {
  const float clamped = std::clamp(v, 0.0f, 1.0f);
  return static_cast<std::uint8_t>(std::lround(clamped * 255.0f));
}

}  // namespace

Image Image::zeros(int width, int height, int channels) {
  Image img;
  img.width = width;
  img.height = height;
  img.channels = channels;
  img.pixels.assign(static_cast<std::size_t>(width) * height * channels, 0.0f);
  return img;
}

StructureMask StructureMask::all_off(int width, int height) {
  StructureMask m;
  m.width = width;
  m.height = height;
  m.on.assign(static_cast<std::size_t>(width) * height, 0);
  return m;
}

std::size_t StructureMask::count_on() const {
  return static_cast<std::size_t>(std::accumulate(on.begin(), on.end(), std::size_t{0}));
}

Image to_gray(const Image& img) {
  if (img.channels == 1) {
    return img;
  }
  Image out = Image::zeros(img.width, img.height, 1);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      out.at(x, y) = 0.299f * img.at(x, y, 0) + 0.587f * img.at(x, y, 1) + 0.114f * img.at(x, y, 2);
    }
  }
  return out;
}

Image resize_bilinear(const Image& img, int new_width, int new_height) {
  if (new_width <= 0 || new_height <= 0) {
    throw ConfigError("resize dimensions must be positive");
  }
  if (new_width == img.width && new_height == img.height) {
    return img;
  }
  Image out = Image::zeros(new_width, new_height, img.channels);
  const double sx = static_cast<double>(img.width) / new_width;
  const double sy = static_cast<double>(img.height) / new_height;
  for (int y = 0; y < new_height; ++y) {
    const double fy = (y + 0.5) * sy - 0.5;
    const int y0 = static_cast<int>(std::floor(fy));
    const double wy = fy - y0;
    const int ya = std::clamp(y0, 0, img.height - 1);
    const int yb = std::clamp(y0 + 1, 0, img.height - 1);
    for (int x = 0; x < new_width; ++x) {
      const double fx = (x + 0.5) * sx - 0.5;
      const int x0 = static_cast<int>(std::floor(fx));
      const double wx = fx - x0;
      const int xa = std::clamp(x0, 0, img.width - 1);
      const int xb = std::clamp(x0 + 1, 0, img.width - 1);
      for (int c = 0; c < img.channels; ++c) {
        const double top = (1.0 - wx) * img.at(xa, ya, c) + wx * img.at(xb, ya, c);
        const double bot = (1.0 - wx) * img.at(xa, yb, c) + wx * img.at(xb, yb, c);
        out.at(x, y, c) = static_cast<float>((1.0 - wy) * top + wy * bot);
      }
    }
  }
  return out;
}

Image pad_height_to_multiple(const Image& img, int multiple) {
  if (multiple < 1) {
    throw ConfigError("pad multiple must be >= 1");
  }
  const int rem = img.height % multiple;
  if (rem == 0) {
    return img;
  }
  Image out = Image::zeros(img.width, img.height + (multiple - rem), img.channels);
  std::copy(img.pixels.begin(), img.pixels.end(), out.pixels.begin());
  return out;
}

Image read_pnm(const std::filesystem::path& path) {
  FilePtr f(std::fopen(path.string().c_str(), "rb"));
  if (!f) {
    throw IoError("cannot open " + path.string());
  }
  const int m0 = std::fgetc(f.get());
  const int m1 = std::fgetc(f.get());
  if (m0 != 'P' || (m1 != '5' && m1 != '6')) {
    throw IoError(path.string() + " is not a binary pgm/ppm file");
  }
  const int channels = m1 == '5' ? 1 : 3;
  const int width = read_pnm_int(f.get(), path.string());
  const int height = read_pnm_int(f.get(), path.string());
  const int maxval = read_pnm_int(f.get(), path.string());
  if (width <= 0 || height <= 0 || maxval != 255) {
    throw IoError("unsupported pnm dimensions or maxval in " + path.string());
  }
  Image img = Image::zeros(width, height, channels);
  const std::size_t n = img.pixels.size();
  std::vector<std::uint8_t> raw(n);
  if (std::fread(raw.data(), 1, n, f.get()) != n) {
    throw IoError("truncated pnm payload in " + path.string());
  }
  for (std::size_t i = 0; i < n; ++i) {
    img.pixels[i] = raw[i] / 255.0f;
  }
  return img;
}

void write_pnm(const Image& img, const std::filesystem::path& path) {
  if (img.channels != 1 && img.channels != 3) {
    throw ShapeError("pnm supports 1 or 3 channels");
  }
  FilePtr f(std::fopen(path.string().c_str(), "wb"));
  if (!f) {
    throw IoError("cannot open " + path.string() + " for writing");
  }
  std::fprintf(f.get(), "P%c\n%d %d\n255\n", img.channels == 1 ? '5' : '6', img.width, img.height);
  std::vector<std::uint8_t> raw(img.pixels.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    raw[i] = to_byte(img.pixels[i]);
  }
  if (std::fwrite(raw.data(), 1, raw.size(), f.get()) != raw.size()) {
    throw IoError("short write to " + path.string());
  }
}

StructureMask read_mask_pgm(const std::filesystem::path& path) {
  const Image img = read_pnm(path);
  if (img.channels != 1) {
    throw IoError("mask must be a single-channel pgm: " + path.string());
  }
  StructureMask mask = StructureMask::all_off(img.width, img.height);
  for (std::size_t i = 0; i < img.pixels.size(); ++i) {
    mask.on[i] = img.pixels[i] > 0.5f ? 1 : 0;
  }
  return mask;
}

void write_mask_pgm(const StructureMask& mask, const std::filesystem::path& path) {
  Image img = Image::zeros(mask.width, mask.height, 1);
  for (std::size_t i = 0; i < mask.on.size(); ++i) {
    img.pixels[i] = mask.on[i] ? 1.0f : 0.0f;
  }
  write_pnm(img, path);
}

}  // namespace frameflow
