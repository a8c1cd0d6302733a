#include "frameflow/dataset.hpp"

#include <algorithm>
#include <atomic>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <memory>
#include <mutex>
#include <numeric>
#include <string>
#include <thread>

#include "frameflow/errors.hpp"
#include "frameflow/rng.hpp"

namespace frameflow {

void DatasetConfig::validate() const {
  if (count < 1) {
    throw ConfigError("dataset count must be >= 1");
  }
  if (!(bound > 0.0)) {
    throw ConfigError("dataset bound must be positive");
  }
  if (test_fraction < 0.0 || !(test_fraction < 1.0)) {
    throw ConfigError("test_fraction must be in [0, 1)");
  }
  if (workers < 1) {
    throw ConfigError("workers must be >= 1");
  }
  frame.validate();
  camera.validate();
  flow.validate();
}

SyntheticScene make_scene(const FrameConfig& frame, const Camera& camera,
                          const FlowSolverConfig& flow) {
  SyntheticScene scene;
  scene.mesh = build_frame_mesh(frame);
  scene.camera = camera;
  scene.palette = story_palette(scene.mesh);
  const RasterOutput ref = rasterize_full(scene.mesh, camera, scene.palette);
  scene.reference = ref.color;
  scene.mask = ref.mask;
  scene.flow = flow;
  return scene;
}

PoseParams draw_pose(Rng& rng, std::size_t n_sections, double bound) {
  PoseParams pose(n_sections);
  for (double& h : pose) {
    h = rng.uniform(-bound, bound);
  }
  return pose;
}

Sample generate_sample(const SyntheticScene& scene, std::uint64_t sample_seed, double bound) {
  Rng rng(sample_seed);
  Sample sample;
  sample.seed = sample_seed;
  sample.label = draw_pose(rng, scene.mesh.layout.section_count(), bound);
  const FrameMesh deformed = deform_mesh(scene.mesh, sample.label);
  const Image current = rasterize(deformed, scene.camera, scene.palette);
  sample.flow = apply_mask(dense_flow(scene.reference, current, scene.flow), scene.mask);
  return sample;
}

namespace {

std::string flow_file_name(int index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "flow_%06d.flo", index);
  return buf;
}

}  // namespace

Manifest generate_dataset(const DatasetConfig& config) {
  config.validate();
  std::error_code ec;
  std::filesystem::create_directories(config.out_dir, ec);
  if (ec) {
    throw IoError("cannot create dataset directory " + config.out_dir.string());
  }

  const SyntheticScene scene = make_scene(config.frame, config.camera, config.flow);

  Manifest manifest;
  manifest.n_sections = scene.mesh.layout.section_count();
  manifest.records.resize(config.count);

  // samples draw from per-index substreams, so any worker count produces
  // identical bytes
  std::atomic<int> next{0};
  std::atomic<bool> failed{false};
  std::string error_text;
  std::mutex error_mutex;

  auto worker = [&]() {
    for (;;) {
      const int index = next.fetch_add(1);
      if (index >= config.count || failed.load()) {
        return;
      }
      try {
        const std::uint64_t seed = substream_seed(config.seed, static_cast<std::uint64_t>(index));
        Sample sample = generate_sample(scene, seed, config.bound);
        const std::string name = flow_file_name(index);
        write_flo(sample.flow, config.out_dir / name);
        manifest.records[index] =
            SampleRecord{index, name, sample.seed, std::move(sample.label)};
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(error_mutex);
        failed.store(true);
        if (error_text.empty()) {
          error_text = e.what();
        }
      }
    }
  };

  if (config.workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < config.workers; ++i) {
      pool.emplace_back(worker);
    }
    for (std::thread& t : pool) {
      t.join();
    }
  }
  if (failed.load()) {
    throw IoError("dataset generation failed: " + error_text);
  }

  write_manifest_csv(manifest, config.out_dir / "manifest.csv");
  return manifest;
}

std::pair<Manifest, Manifest> split(const Manifest& manifest, double fraction,
                                    std::uint64_t seed) {
  if (fraction < 0.0 || !(fraction < 1.0)) {
    throw ConfigError("split fraction must be in [0, 1)");
  }
  std::vector<std::size_t> order(manifest.records.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(splitmix64(seed ^ 0x73706c69745f5f31ull));
  for (std::size_t i = order.size(); i > 1; --i) {
    std::swap(order[i - 1], order[rng.below(i)]);
  }
  const std::size_t n_test = static_cast<std::size_t>(
      std::llround(fraction * static_cast<double>(manifest.records.size())));

  Manifest train, test;
  train.n_sections = test.n_sections = manifest.n_sections;
  for (std::size_t i = 0; i < order.size(); ++i) {
    (i < n_test ? test : train).records.push_back(manifest.records[order[i]]);
  }
  return {std::move(train), std::move(test)};
}

void write_manifest_csv(const Manifest& manifest, const std::filesystem::path& path) {
  std::FILE* f = std::fopen(path.string().c_str(), "w");
  if (!f) {
    throw IoError("cannot open " + path.string() + " for writing");
  }
  std::fprintf(f, "index,flow_path,seed");
  for (std::size_t i = 1; i <= manifest.n_sections; ++i) {
    std::fprintf(f, ",H_%zu", i);
  }
  std::fprintf(f, "\n");
  for (const SampleRecord& r : manifest.records) {
    std::fprintf(f, "%d,%s,%" PRIu64, r.index, r.flow_path.c_str(), r.seed);
    for (double h : r.label) {
      std::fprintf(f, ",%.17g", h);
    }
    std::fprintf(f, "\n");
  }
  std::fclose(f);
}

std::vector<TrainSample> load_training_samples(const Manifest& manifest,
                                               const std::filesystem::path& dir,
                                               double input_norm) {
  if (!(input_norm > 0.0)) {
    throw ConfigError("input_norm must be positive");
  }
  std::vector<TrainSample> samples;
  samples.reserve(manifest.records.size());
  const float inv = static_cast<float>(1.0 / input_norm);
  for (const SampleRecord& r : manifest.records) {
    const FlowField flow = read_flo(dir / r.flow_path);
    TrainSample s;
    s.label = r.label;
    s.input.resize(flow.u.size() * 2);
    for (std::size_t i = 0; i < flow.u.size(); ++i) {
      s.input[i] = flow.u[i] * inv;
      s.input[flow.u.size() + i] = flow.v[i] * inv;
    }
    samples.push_back(std::move(s));
  }
  return samples;
}

double max_flow_magnitude(const Manifest& manifest, const std::filesystem::path& dir,
                          std::size_t limit) {
  double best = 1e-6;
  const std::size_t n = std::min(limit, manifest.records.size());
  for (std::size_t i = 0; i < n; ++i) {
    const FlowField flow = read_flo(dir / manifest.records[i].flow_path);
    for (float u : flow.u) {
      best = std::max(best, std::abs(static_cast<double>(u)));
    }
    for (float v : flow.v) {
      best = std::max(best, std::abs(static_cast<double>(v)));
    }
  }
  return best;
}

Manifest read_manifest_csv(const std::filesystem::path& path) {
  std::FILE* f = std::fopen(path.string().c_str(), "r");
  if (!f) {
    throw IoError("cannot open " + path.string());
  }
  Manifest manifest;
  char line[4096];
  bool header = true;
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
      if (cells.size() < 4) {
        std::fclose(f);
        throw IoError("manifest header too short in " + path.string());
      }
      manifest.n_sections = cells.size() - 3;
      header = false;
      continue;
    }
    if (cells.size() != manifest.n_sections + 3) {
      std::fclose(f);
      throw IoError("manifest row width mismatch in " + path.string());
    }
    SampleRecord r;
    r.index = std::atoi(cells[0].c_str());
    r.flow_path = cells[1];
    r.seed = std::strtoull(cells[2].c_str(), nullptr, 10);
    for (std::size_t i = 0; i < manifest.n_sections; ++i) {
      r.label.push_back(std::strtod(cells[3 + i].c_str(), nullptr));
    }
    manifest.records.push_back(std::move(r));
  }
  std::fclose(f);
  if (header) {
    throw IoError("empty manifest: " + path.string());
  }
  return manifest;
}

}  // namespace frameflow
