#include "frameflow/spline.hpp"

#include <string>

#include "frameflow/errors.hpp"

namespace frameflow {

CubicSpline::CubicSpline(std::vector<double> knots, std::vector<double> values)
    : knots_(std::move(knots)), values_(std::move(values)) {
  const std::size_t n = knots_.size();
  if (n < 2 || values_.size() != n) {
    throw ShapeError("spline needs matching knots/values with at least 2 points");
  }
  for (std::size_t i = 1; i < n; ++i) {
    if (!(knots_[i] > knots_[i - 1])) {
      throw DomainError("spline knots must be strictly increasing");
    }
  }

  // Thomas algorithm for the second derivatives; natural ends stay zero.
  second_.assign(n, 0.0);
  if (n == 2) {
    return;
  }
  const std::size_t m = n - 2;  // interior unknowns
  std::vector<double> diag(m), upper(m), rhs(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double h0 = knots_[i + 1] - knots_[i];
    const double h1 = knots_[i + 2] - knots_[i + 1];
    diag[i] = (h0 + h1) / 3.0;
    upper[i] = h1 / 6.0;
    rhs[i] = (values_[i + 2] - values_[i + 1]) / h1 - (values_[i + 1] - values_[i]) / h0;
  }
  // forward sweep (subdiagonal of row i is h_i/6 = upper[i-1])
  for (std::size_t i = 1; i < m; ++i) {
    const double w = upper[i - 1] / diag[i - 1];
    diag[i] -= w * upper[i - 1];
    rhs[i] -= w * rhs[i - 1];
  }
  second_[m] = rhs[m - 1] / diag[m - 1];
  for (std::size_t i = m - 1; i > 0; --i) {
    second_[i] = (rhs[i - 1] - upper[i - 1] * second_[i + 1]) / diag[i - 1];
  }
}

double CubicSpline::operator()(double x) const {
  const std::size_t n = knots_.size();
  // segment lookup; ends extend the boundary polynomials
  std::size_t seg = 0;
  if (x >= knots_[n - 2]) {
    seg = n - 2;
  } else if (x > knots_[0]) {
    std::size_t lo = 0, hi = n - 2;
    while (lo < hi) {
      const std::size_t mid = (lo + hi + 1) / 2;
      if (knots_[mid] <= x) {
        lo = mid;
      } else {
        hi = mid - 1;
      }
    }
    seg = lo;
  }
  const double h = knots_[seg + 1] - knots_[seg];
  const double t = x - knots_[seg];
  const double m0 = second_[seg];
  const double m1 = second_[seg + 1];
  const double b = (values_[seg + 1] - values_[seg]) / h - h * (2.0 * m0 + m1) / 6.0;
  const double c = m0 / 2.0;
  const double d = (m1 - m0) / (6.0 * h);
  return values_[seg] + t * (b + t * (c + t * d));
}

CubicSpline section_spline(const ControlSectionLayout& layout, const PoseParams& pose) {
  if (pose.size() != layout.section_count()) {
    throw ShapeError("pose size " + std::to_string(pose.size()) + " != section count " +
                     std::to_string(layout.section_count()));
  }
  std::vector<double> knots(layout.section_count());
  for (std::size_t i = 0; i < knots.size(); ++i) {
    knots[i] = layout.normalized_height(i);
  }
  return CubicSpline(std::move(knots), pose);
}

double section_offset_at(double y_norm, const ControlSectionLayout& layout,
                         const PoseParams& pose) {
  if (y_norm < 0.0 || y_norm > 1.0) {
    throw DomainError("normalized height " + std::to_string(y_norm) + " outside [0, 1]");
  }
  return section_spline(layout, pose)(y_norm);
}

}  // namespace frameflow
