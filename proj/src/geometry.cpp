#include "frameflow/geometry.hpp"

#include <cmath>
#include <string>

#include "frameflow/errors.hpp"

namespace frameflow {

void ControlSectionLayout::validate() const {
  if (heights.size() < 2) {
    throw ConfigError("control section layout needs at least 2 sections, got " +
                      std::to_string(heights.size()));
  }
  if (!(total_height > 0.0)) {
    throw ConfigError("total_height must be positive");
  }
  for (std::size_t i = 0; i < heights.size(); ++i) {
    if (heights[i] < 0.0 || heights[i] > total_height) {
      throw ConfigError("section height " + std::to_string(heights[i]) +
                        " outside [0, " + std::to_string(total_height) + "]");
    }
    if (i > 0 && !(heights[i] > heights[i - 1])) {
      throw ConfigError("section heights must be strictly increasing");
    }
  }
}

ControlSectionLayout layout_full_span() {
  return ControlSectionLayout{{0.0, 1.85, 3.35, 4.85, 6.50}, 6.50};
}

ControlSectionLayout layout_raised_base() {
  return ControlSectionLayout{{0.35, 1.85, 3.35, 4.85, 6.55}, 6.55};
}

void validate_pose(const PoseParams& pose, const ControlSectionLayout& layout, double max_offset) {
  if (pose.size() != layout.section_count()) {
    throw ShapeError("pose has " + std::to_string(pose.size()) + " offsets, layout has " +
                     std::to_string(layout.section_count()) + " sections");
  }
  for (double h : pose) {
    if (!std::isfinite(h) || std::abs(h) > max_offset) {
      throw ConfigError("pose offset " + std::to_string(h) + " exceeds bound " +
                        std::to_string(max_offset));
    }
  }
}

}  // namespace frameflow
