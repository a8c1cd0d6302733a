#pragma once

#include <filesystem>
#include <functional>
#include <vector>

#include "frameflow/basis.hpp"
#include "frameflow/camera.hpp"
#include "frameflow/flow.hpp"
#include "frameflow/mesh.hpp"

namespace frameflow {

// An ordered frame sequence and the window [initial, last] that is analyzed.
// Frames outside the window are treated as undeformed.
struct SequenceSpec {
  std::vector<std::filesystem::path> frames;
  std::size_t initial = 0;
  std::size_t last = 0;
  double fps = 30.0;

  void validate() const;  // throws ConfigError
};

using PoseEstimatorFn = std::function<PoseParams(const FlowField& denoised)>;

// For every frame t in [initial, last]: flow from the initial frame, mask
// denoise, pose estimate. Frames outside the window get all-zero poses. The
// mask comes from the undeformed mesh silhouette.
std::vector<PoseParams> run_sequence(const SequenceSpec& spec, const FrameMesh& mesh,
                                     const Camera& camera, const FlowSolverConfig& flow_config,
                                     const PoseEstimatorFn& estimate);

// Same loop over frames already in memory (frame_count frames served by
// `frame_at`); the file variant wraps this.
std::vector<PoseParams> run_sequence_frames(const std::function<Image(std::size_t)>& frame_at,
                                            std::size_t frame_count, std::size_t initial,
                                            std::size_t last, const FrameMesh& mesh,
                                            const Camera& camera,
                                            const FlowSolverConfig& flow_config,
                                            const PoseEstimatorFn& estimate);

// CSV schema: frame,t_seconds,H_1,...,H_N
void write_pose_csv(const std::vector<PoseParams>& poses, double fps,
                    const std::filesystem::path& path);
std::vector<PoseParams> read_pose_csv(const std::filesystem::path& path);

}  // namespace frameflow
