#pragma once

#include <complex>
#include <filesystem>
#include <vector>

#include "frameflow/geometry.hpp"

namespace frameflow {

// Displacement in meters at one structure point, sampled per frame.
struct DisplacementSeries {
  double rate = 0.0;    // frames per second
  double y_norm = 0.0;  // normalized height of the tracked point
  std::vector<double> values;

  double duration() const { return values.size() / rate; }
};

struct Spectrum {
  std::vector<double> freq;  // Hz, ascending from 0 to Nyquist
  std::vector<double> mag;
};

enum class Window { kNone, kHann };

// d_t = section_offset_at(y_norm, layout, H_t) * total_height.
DisplacementSeries displacement_at(const std::vector<PoseParams>& poses,
                                   const ControlSectionLayout& layout, double y_norm, double rate);

// In-place iterative radix-2 transform; size must be a power of two.
void fft_radix2(std::vector<std::complex<double>>& data, bool inverse);

// Magnitude spectrum of the (optionally Hann-windowed) series, zero-padded to
// the next power of two. Bin k maps to k * rate / padded_length.
Spectrum fft_spectrum(const DisplacementSeries& series, Window window = Window::kNone);

// Frequency of the max-magnitude bin; ties resolve to the lower frequency.
double dominant_frequency(const Spectrum& spectrum, bool exclude_dc);

void write_series_csv(const DisplacementSeries& series, const std::filesystem::path& path);
void write_spectrum_csv(const Spectrum& spectrum, const std::filesystem::path& path);

}  // namespace frameflow
