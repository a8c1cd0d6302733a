#pragma once

#include <vector>

#include "frameflow/geometry.hpp"

namespace frameflow {

// Natural cubic spline interpolant: zero second derivative at the end knots.
// Outside the knot span the end segment's cubic polynomial is extended, so the
// interpolant is defined on the whole real line.
class CubicSpline {
 public:
  CubicSpline(std::vector<double> knots, std::vector<double> values);

  double operator()(double x) const;

  std::size_t knot_count() const { return knots_.size(); }

 private:
  std::vector<double> knots_;
  std::vector<double> values_;
  std::vector<double> second_;  // second derivatives at the knots
};

// Spline through the layout's normalized knots with nodal values H.
// Throws ShapeError when |H| does not match the layout.
CubicSpline section_spline(const ControlSectionLayout& layout, const PoseParams& pose);

// Offset of the common section at normalized height y_norm for pose H.
// The spline knots are layout.heights / total_height with nodal values H.
// Throws DomainError when y_norm is outside [0, 1], ShapeError when |H| does
// not match the layout.
double section_offset_at(double y_norm, const ControlSectionLayout& layout, const PoseParams& pose);

}  // namespace frameflow
