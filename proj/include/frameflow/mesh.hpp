#pragma once

#include <array>
#include <filesystem>
#include <vector>

#include "frameflow/geometry.hpp"

namespace frameflow {

// Geometry of the multi-story frame. Axes: y up, z lateral (oscillation),
// x toward the camera. The plan is centered on x = z = 0.
struct FrameConfig {
  std::vector<double> story_elevations{1.85, 3.35, 4.85, 6.50};
  double plan_width = 3.0;   // outer extent along z
  double plan_depth = 2.0;   // outer extent along x
  double column_side = 0.25;
  double beam_width = 0.20;
  double beam_depth = 0.35;
  double slab_thickness = 0.10;
  double max_segment_height = 0.05;  // vertical tessellation step for columns
  ControlSectionLayout layout = layout_full_span();

  void validate() const;  // throws ConfigError
};

struct FrameMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> faces;
  std::vector<int> face_group;  // palette group per face (story / member class)
  int group_count = 0;
  ControlSectionLayout layout;
};

// Deterministic box-primitive mesh of columns, beams and slabs for an N-story
// frame. Columns are tessellated vertically so deformation follows the spline.
FrameMesh build_frame_mesh(const FrameConfig& config);

// Lateral displacement per the interpolated section offset: x and y are kept,
// z gains section_offset_at(y / h) * h.
Vec3 displace_vertex(const Vec3& v, const ControlSectionLayout& layout, const PoseParams& pose);

// displace_vertex applied to every vertex; topology unchanged.
FrameMesh deform_mesh(const FrameMesh& mesh, const PoseParams& pose);

// ASCII OBJ-style export (v/f records) for inspection.
void write_obj(const FrameMesh& mesh, const std::filesystem::path& path);

}  // namespace frameflow
