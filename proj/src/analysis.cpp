#include "frameflow/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>

#include "frameflow/errors.hpp"
#include "frameflow/spline.hpp"

namespace frameflow {

DisplacementSeries displacement_at(const std::vector<PoseParams>& poses,
                                   const ControlSectionLayout& layout, double y_norm,
                                   double rate) {
  if (y_norm < 0.0 || y_norm > 1.0) {
    throw DomainError("normalized height " + std::to_string(y_norm) + " outside [0, 1]");
  }
  if (!(rate > 0.0)) {
    throw ConfigError("sample rate must be positive");
  }
  DisplacementSeries series;
  series.rate = rate;
  series.y_norm = y_norm;
  series.values.reserve(poses.size());
  for (const PoseParams& pose : poses) {
    series.values.push_back(section_offset_at(y_norm, layout, pose) * layout.total_height);
  }
  return series;
}

void fft_radix2(std::vector<std::complex<double>>& data, bool inverse) {
  const std::size_t n = data.size();
  if (n == 0 || (n & (n - 1)) != 0) {
    throw DomainError("fft size must be a power of two, got " + std::to_string(n));
  }
  // bit-reversal permutation
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) {
      j ^= bit;
    }
    j ^= bit;
    if (i < j) {
      std::swap(data[i], data[j]);
    }
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double angle = (inverse ? 2.0 : -2.0) * std::numbers::pi / static_cast<double>(len);
    const std::complex<double> wl(std::cos(angle), std::sin(angle));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        const std::complex<double> a = data[i + k];
        const std::complex<double> b = data[i + k + len / 2] * w;
        data[i + k] = a + b;
        data[i + k + len / 2] = a - b;
        w *= wl;
      }
    }
  }
  if (inverse) {
    for (std::complex<double>& v : data) {
      v /= static_cast<double>(n);
    }
  }
}

Spectrum fft_spectrum(const DisplacementSeries& series, Window window) {
  const std::size_t n = series.values.size();
  if (n < 2) {
    throw DomainError("spectrum needs at least 2 samples");
  }
  std::size_t padded = 1;
  while (padded < n) {
    padded <<= 1;
  }
  std::vector<std::complex<double>> data(padded, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double v = series.values[i];
    if (window == Window::kHann) {
      v *= 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                 static_cast<double>(n - 1)));
    }
    data[i] = v;
  }
  fft_radix2(data, false);

  Spectrum spectrum;
  const std::size_t n_bins = padded / 2 + 1;  // 0 .. Nyquist
  spectrum.freq.reserve(n_bins);
  spectrum.mag.reserve(n_bins);
  for (std::size_t k = 0; k < n_bins; ++k) {
    spectrum.freq.push_back(static_cast<double>(k) * series.rate / static_cast<double>(padded));
    spectrum.mag.push_back(std::abs(data[k]));
  }
  return spectrum;
}

double dominant_frequency(const Spectrum& spectrum, bool exclude_dc) {
  if (spectrum.mag.empty()) {
    throw DomainError("empty spectrum");
  }
  std::size_t start = exclude_dc && spectrum.mag.size() > 1 ? 1 : 0;
  std::size_t best = start;
  for (std::size_t k = start + 1; k < spectrum.mag.size(); ++k) {
    if (spectrum.mag[k] > spectrum.mag[best]) {
      best = k;
    }
  }
  return spectrum.freq[best];
}

void write_series_csv(const DisplacementSeries& series, const std::filesystem::path& path) {
  std::FILE* f = std::fopen(path.string().c_str(), "w");
  if (!f) {
    throw IoError("cannot open " + path.string() + " for writing");
  }
  std::fprintf(f, "time_s,displacement_m\n");
  for (std::size_t i = 0; i < series.values.size(); ++i) {
    std::fprintf(f, "%.9g,%.17g\n", static_cast<double>(i) / series.rate, series.values[i]);
  }
  std::fclose(f);
}

void write_spectrum_csv(const Spectrum& spectrum, const std::filesystem::path& path) {
  std::FILE* f = std::fopen(path.string().c_str(), "w");
  if (!f) {
    throw IoError("cannot open " + path.string() + " for writing");
  }
  std::fprintf(f, "freq_hz,magnitude\n");
  for (std::size_t i = 0; i < spectrum.freq.size(); ++i) {
    std::fprintf(f, "%.9g,%.17g\n", spectrum.freq[i], spectrum.mag[i]);
  }
  std::fclose(f);
}

}  // namespace frameflow
