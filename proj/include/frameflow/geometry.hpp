#pragma once

#include <cstddef>
#include <vector>

namespace frameflow {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;  // height axis
  double z = 0.0;  // lateral oscillation axis
};

inline Vec3 operator+(const Vec3& a, const Vec3& b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }

// Horizontal sections whose lateral offsets parameterize the whole frame
// deformation. Heights are meters from the base, strictly increasing and
// within [0, total_height]. At least two sections are required.
struct ControlSectionLayout {
  std::vector<double> heights;
  double total_height = 0.0;

  std::size_t section_count() const { return heights.size(); }
  double normalized_height(std::size_t i) const { return heights[i] / total_height; }
  void validate() const;  // throws ConfigError
};

// Five sections at the story levels, spanning the full 6.50 m height.
ControlSectionLayout layout_full_span();

// Alternate five-section layout with a raised base section, 6.55 m total.
ControlSectionLayout layout_raised_base();

// Dimensionless lateral offsets, one per control section, normalized by the
// structure height.
using PoseParams = std::vector<double>;

// Throws ShapeError on length mismatch, ConfigError when |H_i| > max_offset.
void validate_pose(const PoseParams& pose, const ControlSectionLayout& layout, double max_offset);

}  // namespace frameflow
