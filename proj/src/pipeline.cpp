#include "frameflow/pipeline.hpp"

#include <cstdio>
#include <cstdlib>
#include <string>

#include "frameflow/errors.hpp"
#include "frameflow/raster.hpp"

namespace frameflow {

void SequenceSpec::validate() const {
  if (frames.size() < 2) {
    throw ConfigError("sequence needs at least 2 frames");
  }
  if (!(initial < last) || last >= frames.size()) {
    throw ConfigError("sequence window must satisfy 0 <= initial < last < frame count");
  }
  if (!(fps > 0.0)) {
    throw ConfigError("fps must be positive");
  }
}

std::vector<PoseParams> run_sequence_frames(const std::function<Image(std::size_t)>& frame_at,
                                            std::size_t frame_count, std::size_t initial,
                                            std::size_t last, const FrameMesh& mesh,
                                            const Camera& camera,
                                            const FlowSolverConfig& flow_config,
                                            const PoseEstimatorFn& estimate) {
  if (!(initial < last) || last >= frame_count) {
    throw ConfigError("sequence window must satisfy 0 <= initial < last < frame count");
  }
  const StructureMask mask = silhouette_mask(mesh, camera);
  const std::size_t n_sections = mesh.layout.section_count();

  const Image reference = frame_at(initial);
  if (reference.width != camera.width || reference.height != camera.height) {
    throw ShapeError("frame dimensions do not match the camera");
  }

  std::vector<PoseParams> poses(frame_count, PoseParams(n_sections, 0.0));
  for (std::size_t t = initial; t <= last; ++t) {
    const Image current = frame_at(t);
    if (current.width != reference.width || current.height != reference.height) {
      throw ShapeError("frame " + std::to_string(t) + " dimensions differ from the initial frame");
    }
    const FlowField denoised =
        apply_mask(dense_flow(reference, current, flow_config), mask);
    PoseParams pose = estimate(denoised);
    if (pose.size() != n_sections) {
      throw ShapeError("estimator returned " + std::to_string(pose.size()) +
                       " offsets, expected " + std::to_string(n_sections));
    }
    poses[t] = std::move(pose);
  }
  return poses;
}

std::vector<PoseParams> run_sequence(const SequenceSpec& spec, const FrameMesh& mesh,
                                     const Camera& camera, const FlowSolverConfig& flow_config,
                                     const PoseEstimatorFn& estimate) {
  spec.validate();
  auto frame_at = [&spec](std::size_t t) {
    try {
      return read_pnm(spec.frames[t]);
    } catch (const IoError& e) {
      throw IoError("frame " + std::to_string(t) + ": " + e.what());
    }
  };
  return run_sequence_frames(frame_at, spec.frames.size(), spec.initial, spec.last, mesh, camera,
                             flow_config, estimate);
}

void write_pose_csv(const std::vector<PoseParams>& poses, double fps,
                    const std::filesystem::path& path) {
  std::FILE* f = std::fopen(path.string().c_str(), "w");
  if (!f) {
    throw IoError("cannot open " + path.string() + " for writing");
  }
  const std::size_t n_sections = poses.empty() ? 0 : poses.front().size();
  std::fprintf(f, "frame,t_seconds");
  for (std::size_t i = 1; i <= n_sections; ++i) {
    std::fprintf(f, ",H_%zu", i);
  }
  std::fprintf(f, "\n");
  for (std::size_t t = 0; t < poses.size(); ++t) {
    std::fprintf(f, "%zu,%.9g", t, static_cast<double>(t) / fps);
    for (double h : poses[t]) {
      std::fprintf(f, ",%.17g", h);
    }
    std::fprintf(f, "\n");
  }
  std::fclose(f);
}

std::vector<PoseParams> read_pose_csv(const std::filesystem::path& path) {
  std::FILE* f = std::fopen(path.string().c_str(), "r");
  if (!f) {
    throw IoError("cannot open " + path.string());
  }
  std::vector<PoseParams> poses;
  char line[8192];
  bool header = true;
  std::size_t n_sections = 0;
  while (std::fgets(line, sizeof(line), f)) {
    std::string text(line);
    while (!text.empty() && (text.back() == '\n' || text.back() == '\r')) {
      text.pop_back();
    }
    if (text.empty()) {
      continue;
    }
    std::vector<std::string> cells;
    std::size_t start = 0;
    for (;;) {
      const std::size_t comma = text.find(',', start);
      cells.push_back(text.substr(start, comma - start));
      if (comma == std::string::npos) {
        break;
      }
      start = comma + 1;
    }
    if (header) {
      if (cells.size() < 3) {
        std::fclose(f);
        throw IoError("pose csv header too short in " + path.string());
      }
      n_sections = cells.size() - 2;
      header = false;
      continue;
    }
    if (cells.size() != n_sections + 2) {
      std::fclose(f);
      throw IoError("pose csv row width mismatch in " + path.string());
    }
    PoseParams pose;
    for (std::size_t i = 0; i < n_sections; ++i) {
      pose.push_back(std::strtod(cells[2 + i].c_str(), nullptr));
    }
    poses.push_back(std::move(pose));
  }
  std::fclose(f);
  if (header) {
    throw IoError("empty pose csv: " + path.string());
  }
  return poses;
}

}  // namespace frameflow
