#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "frameflow/basis.hpp"
#include "frameflow/camera.hpp"
#include "frameflow/flow.hpp"
#include "frameflow/mesh.hpp"
#include "frameflow/raster.hpp"
#include "frameflow/regressor.hpp"
#include "frameflow/rng.hpp"

namespace frameflow {

struct DatasetConfig {
  int count = 20000;
  double bound = 0.025;        // H_i ~ Uniform(-bound, bound)
  double test_fraction = 0.2;
  std::uint64_t seed = 1;
  int workers = 1;
  FrameConfig frame;
  Camera camera;
  FlowSolverConfig flow;
  std::filesystem::path out_dir;

  void validate() const;  // throws ConfigError
};

// Precomputed per-corpus state: the undeformed reference render and its
// silhouette, shared by every sample.
struct SyntheticScene {
  FrameMesh mesh;
  Camera camera;
  std::vector<Rgb> palette;
  Image reference;
  StructureMask mask;
  FlowSolverConfig flow;
};

SyntheticScene make_scene(const FrameConfig& frame, const Camera& camera,
                          const FlowSolverConfig& flow);

struct Sample {
  FlowField flow;    // denoised
  PoseParams label;
  std::uint64_t seed = 0;
};

// One uniformly drawn pose per sample: deform, rasterize, solve flow against
// the reference render, zero it outside the mask.
Sample generate_sample(const SyntheticScene& scene, std::uint64_t sample_seed, double bound);

PoseParams draw_pose(Rng& rng, std::size_t n_sections, double bound);

struct SampleRecord {
  int index = 0;
  std::string flow_path;  // relative to the manifest directory
  std::uint64_t seed = 0;
  PoseParams label;
};

struct Manifest {
  std::vector<SampleRecord> records;
  std::size_t n_sections = 0;
};

// Writes count .flo files plus manifest.csv; deterministic for a fixed seed
// and independent of the worker count.
Manifest generate_dataset(const DatasetConfig& config);

// Seeded shuffle then partition into (train, test); disjoint and exhaustive.
std::pair<Manifest, Manifest> split(const Manifest& manifest, double fraction, std::uint64_t seed);

// CSV schema: index,flow_path,seed,H_1,...,H_N
void write_manifest_csv(const Manifest& manifest, const std::filesystem::path& path);
Manifest read_manifest_csv(const std::filesystem::path& path);

// Loads the manifest's flow files into training samples, dividing flow values
// by input_norm.
std::vector<TrainSample> load_training_samples(const Manifest& manifest,
                                               const std::filesystem::path& dir,
                                               double input_norm);

// Largest |u| or |v| over the first `limit` flows; used to pick an input
// normalization. Returns at least 1e-6.
double max_flow_magnitude(const Manifest& manifest, const std::filesystem::path& dir,
                          std::size_t limit = 100);

}  // namespace frameflow
