#include "frameflow/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "frameflow/errors.hpp"
#include "frameflow/spline.hpp"

namespace frameflow {

namespace {

// Axis-aligned box tessellated into `rings` vertical slices so that the
// spline deformation bends long members instead of shearing them.
void add_box(FrameMesh& mesh, const Vec3& lo, const Vec3& hi, int rings, int group) {
  const int base = static_cast<int>(mesh.vertices.size());
  for (int r = 0; r <= rings; ++r) {
    const double y = lo.y + (hi.y - lo.y) * (static_cast<double>(r) / rings);
    mesh.vertices.push_back({lo.x, y, lo.z});
    mesh.vertices.push_back({hi.x, y, lo.z});
    mesh.vertices.push_back({hi.x, y, hi.z});
    mesh.vertices.push_back({lo.x, y, hi.z});
  }
  auto face = [&](int a, int b, int c) {
    mesh.faces.push_back({base + a, base + b, base + c});
    mesh.face_group.push_back(group);
  };
  for (int r = 0; r < rings; ++r) {
    const int lo4 = 4 * r;
    const int hi4 = 4 * (r + 1);
    for (int s = 0; s < 4; ++s) {
      const int a = lo4 + s;
      const int b = lo4 + (s + 1) % 4;
      const int c = hi4 + (s + 1) % 4;
      const int d = hi4 + s;
      face(a, b, c);
      face(a, c, d);
    }
  }
  const int top = 4 * rings;
  face(0, 2, 1);
  face(0, 3, 2);
  face(top + 0, top + 1, top + 2);
  face(top + 0, top + 2, top + 3);
}

int rings_for(double height, double step) {
  return std::max(1, static_cast<int>(std::ceil(height / step)));
}

}  // namespace

void FrameConfig::validate() const {
  if (story_elevations.empty()) {
    throw ConfigError("frame needs at least one story");
  }
  double prev = 0.0;
  for (double e : story_elevations) {
    if (!(e > prev)) {
      throw ConfigError("story elevations must be positive and strictly increasing");
    }
    prev = e;
  }
  for (double d : {plan_width, plan_depth, column_side, beam_width, beam_depth, slab_thickness,
                   max_segment_height}) {
    if (!(d > 0.0)) {
      throw ConfigError("frame member dimensions must be positive");
    }
  }
  if (column_side * 2.0 >= plan_width || column_side * 2.0 >= plan_depth) {
    throw ConfigError("columns overlap: column_side too large for the plan");
  }
  if (beam_depth <= slab_thickness) {
    throw ConfigError("beam_depth must exceed slab_thickness");
  }
  layout.validate();
  if (story_elevations.back() > layout.total_height) {
    throw ConfigError("top story above the layout total height");
  }
}

FrameMesh build_frame_mesh(const FrameConfig& config) {
  config.validate();
  FrameMesh mesh;
  mesh.layout = config.layout;

  const double hw = config.plan_width / 2.0;   // z half extent
  const double hd = config.plan_depth / 2.0;   // x half extent
  const double c = config.column_side;
  const double step = config.max_segment_height;
  const int stories = static_cast<int>(config.story_elevations.size());

  // groups: per story, 0 = columns, 1 = beams, 2 = slab
  auto group_id = [&](int story, int member) { return story * 3 + member; };
  mesh.group_count = stories * 3;

  for (int s = 0; s < stories; ++s) {
    const double y0 = s == 0 ? 0.0 : config.story_elevations[s - 1];
    const double y1 = config.story_elevations[s];
    const int col_rings = rings_for(y1 - y0, step);

    const double corners_x[2] = {-hd, hd - c};
    const double corners_z[2] = {-hw, hw - c};
    for (double cx : corners_x) {
      for (double cz : corners_z) {
        add_box(mesh, {cx, y0, cz}, {cx + c, y1, cz + c}, col_rings, group_id(s, 0));
      }
    }

    // perimeter beams run below the slab; the floor level is the slab top
    const double by1 = y1 - config.slab_thickness;
    const double by0 = y1 - config.beam_depth;
    const double bw = config.beam_width;
    // spanning z at both x faces
    add_box(mesh, {-hd, by0, -hw + c}, {-hd + bw, by1, hw - c}, 1, group_id(s, 1));
    add_box(mesh, {hd - bw, by0, -hw + c}, {hd, by1, hw - c}, 1, group_id(s, 1));
    // spanning x at both z faces
    add_box(mesh, {-hd + bw, by0, -hw}, {hd - bw, by1, -hw + bw}, 1, group_id(s, 1));
    add_box(mesh, {-hd + bw, by0, hw - bw}, {hd - bw, by1, hw}, 1, group_id(s, 1));

    add_box(mesh, {-hd, y1 - config.slab_thickness, -hw}, {hd, y1, hw}, 1, group_id(s, 2));
  }

  return mesh;
}

Vec3 displace_vertex(const Vec3& v, const ControlSectionLayout& layout, const PoseParams& pose) {
  const double offset = section_offset_at(v.y / layout.total_height, layout, pose);
  return {v.x, v.y, v.z + offset * layout.total_height};
}

FrameMesh deform_mesh(const FrameMesh& mesh, const PoseParams& pose) {
  if (pose.size() != mesh.layout.section_count()) {
    throw ShapeError("pose size " + std::to_string(pose.size()) + " != section count " +
                     std::to_string(mesh.layout.section_count()));
  }
  const CubicSpline spline = section_spline(mesh.layout, pose);
  const double h = mesh.layout.total_height;
  FrameMesh out = mesh;
  for (Vec3& v : out.vertices) {
    v.z += spline(v.y / h) * h;
  }
  return out;
}

void write_obj(const FrameMesh& mesh, const std::filesystem::path& path) {
  std::FILE* f = std::fopen(path.string().c_str(), "w");
  if (!f) {
    throw IoError("cannot open " + path.string() + " for writing");
  }
  for (const Vec3& v : mesh.vertices) {
    std::fprintf(f, "v %.9g %.9g %.9g\n", v.x, v.y, v.z);
  }
  for (const auto& face : mesh.faces) {
    std::fprintf(f, "f %d %d %d\n", face[0] + 1, face[1] + 1, face[2] + 1);
  }
  std::fclose(f);
}

}  // namespace frameflow
