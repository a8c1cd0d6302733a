#include "frameflow/cli.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "frameflow/analysis.hpp"
#include "frameflow/basis.hpp"
#include "frameflow/dataset.hpp"
#include "frameflow/errors.hpp"
#include "frameflow/flow.hpp"
#include "frameflow/image.hpp"
#include "frameflow/mesh.hpp"
#include "frameflow/pipeline.hpp"
#include "frameflow/raster.hpp"
#include "frameflow/regressor.hpp"
#include "frameflow/version.hpp"

namespace frameflow {

namespace fs = std::filesystem;

namespace {

FrameConfig frame_from_config(const ConfigFile& config) {
  config.require_known_keys(
      "frame", {"story_elevations", "plan_width", "plan_depth", "column_side", "beam_width",
                "beam_depth", "slab_thickness", "max_segment_height", "layout_preset",
                "section_heights", "total_height"});
  FrameConfig frame;
  frame.story_elevations =
      config.get_double_list("frame", "story_elevations", frame.story_elevations);
  frame.plan_width = config.get_double("frame", "plan_width", frame.plan_width);
  frame.plan_depth = config.get_double("frame", "plan_depth", frame.plan_depth);
  frame.column_side = config.get_double("frame", "column_side", frame.column_side);
  frame.beam_width = config.get_double("frame", "beam_width", frame.beam_width);
  frame.beam_depth = config.get_double("frame", "beam_depth", frame.beam_depth);
  frame.slab_thickness = config.get_double("frame", "slab_thickness", frame.slab_thickness);
  frame.max_segment_height =
      config.get_double("frame", "max_segment_height", frame.max_segment_height);

  const std::string preset = config.get_string("frame", "layout_preset", "full");
  if (preset == "full") {
    frame.layout = layout_full_span();
  } else if (preset == "raised") {
    frame.layout = layout_raised_base();
  } else {
    throw ConfigError("frame.layout_preset must be 'full' or 'raised', got '" + preset + "'");
  }
  if (config.has("frame", "section_heights")) {
    frame.layout.heights = config.get_double_list("frame", "section_heights", {});
    frame.layout.total_height =
        config.get_double("frame", "total_height", frame.layout.heights.back());
  } else if (config.has("frame", "total_height")) {
    frame.layout.total_height = config.get_double("frame", "total_height", 0.0);
  }
  frame.validate();
  return frame;
}

Camera camera_from_config(const ConfigFile& config) {
  config.require_known_keys(
      "camera", {"kind", "width", "height", "scale", "focal", "center_y", "center_z", "eye_x"});
  Camera camera;
  const std::string kind = config.get_string("camera", "kind", "orthographic");
  if (kind == "orthographic") {
    camera.kind = Projection::kOrthographic;
  } else if (kind == "pinhole") {
    camera.kind = Projection::kPinhole;
  } else {
    throw ConfigError("camera.kind must be 'orthographic' or 'pinhole', got '" + kind + "'");
  }
  camera.width = config.get_int("camera", "width", camera.width);
  camera.height = config.get_int("camera", "height", camera.height);
  camera.scale = config.get_double("camera", "scale", camera.scale);
  camera.focal = config.get_double("camera", "focal", camera.focal);
  camera.position.y = config.get_double("camera", "center_y", camera.position.y);
  camera.position.z = config.get_double("camera", "center_z", camera.position.z);
  camera.position.x = config.get_double("camera", "eye_x", camera.position.x);
  camera.validate();
  return camera;
}

FlowSolverConfig solver_from_config(const ConfigFile& config) {
  config.require_known_keys("solver", {"alpha", "iterations", "levels", "factor"});
  FlowSolverConfig solver;
  solver.alpha = config.get_double("solver", "alpha", solver.alpha);
  solver.iterations = config.get_int("solver", "iterations", solver.iterations);
  solver.levels = config.get_int("solver", "levels", solver.levels);
  solver.factor = config.get_double("solver", "factor", solver.factor);
  solver.validate();
  return solver;
}

PoseParams pose_from_config(const ConfigFile& config, const std::string& section,
                            const std::string& key, std::size_t n_sections) {
  PoseParams pose = config.get_double_list(section, key, PoseParams(n_sections, 0.0));
  if (pose.size() != n_sections) {
    throw ConfigError(section + "." + key + ": expected " + std::to_string(n_sections) +
                      " offsets");
  }
  return pose;
}

void write_run_manifest(const fs::path& dir, const std::string& subcommand,
                        const RunOptions& opts) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  std::FILE* f = std::fopen((dir / "run_manifest.txt").string().c_str(), "w");
  if (!f) {
    throw IoError("cannot write run manifest in " + dir.string());
  }
  std::fprintf(f, "tool = frameflow %s\n", kVersion);
  std::fprintf(f, "subcommand = %s\n", subcommand.c_str());
  std::fprintf(f, "config_hash = %016" PRIx64 "\n", opts.config.content_hash());
  if (opts.seed) {
    std::fprintf(f, "seed_override = %" PRIu64 "\n", *opts.seed);
  }
  std::fprintf(f, "workers = %d\n", opts.workers);
  for (const auto& [section, entries] : opts.config.sections()) {
    for (const auto& [key, value] : entries) {
      std::fprintf(f, "%s.%s = %s\n", section.c_str(), key.c_str(), value.c_str());
    }
  }
  std::fclose(f);
}

std::vector<fs::path> list_frames(const fs::path& dir) {
  if (!fs::is_directory(dir)) {
    throw IoError("frames_dir " + dir.string() + " is not a directory");
  }
  std::vector<fs::path> frames;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string ext = entry.path().extension().string();
    if (entry.is_regular_file() && (ext == ".pgm" || ext == ".ppm")) {
      frames.push_back(entry.path());
    }
  }
  std::sort(frames.begin(), frames.end());
  if (frames.empty()) {
    throw IoError("no .pgm/.ppm frames in " + dir.string());
  }
  return frames;
}

std::string require_key(const ConfigFile& config, const std::string& section,
                        const std::string& key) {
  const auto value = config.find(section, key);
  if (!value || value->empty()) {
    throw ConfigError("missing required config key [" + section + "] " + key);
  }
  return *value;
}

}  // namespace

int cmd_render(const RunOptions& opts) {
  const ConfigFile& config = opts.config;
  config.require_known_keys("render",
                            {"out", "pose", "pad_multiple", "mask_out", "obj_out"});
  const FrameConfig frame = frame_from_config(config);
  const Camera camera = camera_from_config(config);
  const fs::path out = require_key(config, "render", "out");

  const FrameMesh mesh = build_frame_mesh(frame);
  const PoseParams pose =
      pose_from_config(config, "render", "pose", mesh.layout.section_count());
  const FrameMesh posed = deform_mesh(mesh, pose);
  const std::vector<Rgb> palette = story_palette(mesh);

  Image img = rasterize(posed, camera, palette);
  const int multiple = config.get_int("render", "pad_multiple", 0);
  if (multiple > 0) {
    img = pad_height_to_multiple(img, multiple);
  }
  write_run_manifest(out.parent_path().empty() ? fs::path(".") : out.parent_path(), "render",
                     opts);
  write_pnm(img, out);

  if (config.has("render", "mask_out")) {
    StructureMask mask = silhouette_mask(posed, camera);
    if (multiple > 0) {
      Image as_img = Image::zeros(mask.width, mask.height, 1);
      for (std::size_t i = 0; i < mask.on.size(); ++i) {
        as_img.pixels[i] = mask.on[i] ? 1.0f : 0.0f;
      }
      as_img = pad_height_to_multiple(as_img, multiple);
      StructureMask padded = StructureMask::all_off(as_img.width, as_img.height);
      for (std::size_t i = 0; i < padded.on.size(); ++i) {
        padded.on[i] = as_img.pixels[i] > 0.5f ? 1 : 0;
      }
      mask = padded;
    }
    write_mask_pgm(mask, config.get_string("render", "mask_out", ""));
  }
  if (config.has("render", "obj_out")) {
    write_obj(posed, config.get_string("render", "obj_out", ""));
  }
  std::printf("rendered %dx%d image to %s\n", img.width, img.height, out.string().c_str());
  return kExitOk;
}

int cmd_flow(const RunOptions& opts) {
  const ConfigFile& config = opts.config;
  config.require_known_keys("flow",
                            {"image_a", "image_b", "out", "color_out", "color_max", "mask"});
  const FlowSolverConfig solver = solver_from_config(config);
  const fs::path image_a = require_key(config, "flow", "image_a");
  const fs::path image_b = require_key(config, "flow", "image_b");
  const fs::path out = require_key(config, "flow", "out");

  const Image first = read_pnm(image_a);
  const Image second = read_pnm(image_b);
  FlowField flow = dense_flow(first, second, solver);
  if (config.has("flow", "mask")) {
    flow = apply_mask(flow, read_mask_pgm(config.get_string("flow", "mask", "")));
  }
  write_run_manifest(out.parent_path().empty() ? fs::path(".") : out.parent_path(), "flow", opts);
  write_flo(flow, out);
  if (config.has("flow", "color_out")) {
    const double color_max = config.get_double("flow", "color_max", 10.0);
    write_pnm(flow_to_color(flow, color_max), config.get_string("flow", "color_out", ""));
  }
  std::printf("flow %dx%d written to %s\n", flow.width, flow.height, out.string().c_str());
  return kExitOk;
}

int cmd_generate(const RunOptions& opts) {
  const ConfigFile& config = opts.config;
  config.require_known_keys("generate",
                            {"count", "bound", "test_fraction", "seed", "out_dir"});
  DatasetConfig dataset;
  dataset.frame = frame_from_config(config);
  dataset.camera = camera_from_config(config);
  dataset.flow = solver_from_config(config);
  dataset.count = config.get_int("generate", "count", dataset.count);
  dataset.bound = config.get_double("generate", "bound", dataset.bound);
  dataset.test_fraction = config.get_double("generate", "test_fraction", dataset.test_fraction);
  dataset.seed = opts.seed.value_or(config.get_u64("generate", "seed", dataset.seed));
  dataset.workers = opts.workers;
  dataset.out_dir = require_key(config, "generate", "out_dir");
  dataset.validate();

  write_run_manifest(dataset.out_dir, "generate", opts);
  const Manifest manifest = generate_dataset(dataset);
  const auto [train_manifest, test_manifest] =
      split(manifest, dataset.test_fraction, dataset.seed);
  write_manifest_csv(train_manifest, dataset.out_dir / "manifest_train.csv");
  write_manifest_csv(test_manifest, dataset.out_dir / "manifest_test.csv");

  // reference render and mask for inspection and reuse
  const SyntheticScene scene = make_scene(dataset.frame, dataset.camera, dataset.flow);
  write_pnm(scene.reference, dataset.out_dir / "reference.ppm");
  write_mask_pgm(scene.mask, dataset.out_dir / "mask.pgm");

  std::printf("dataset: %zu train / %zu test samples in %s\n", train_manifest.records.size(),
              test_manifest.records.size(), dataset.out_dir.string().c_str());
  return kExitOk;
}

int cmd_train(const RunOptions& opts) {
  const ConfigFile& config = opts.config;
  config.require_known_keys(
      "train", {"dataset_dir", "weights_out", "curve_out", "learning_rate", "batch", "decay",
                "epochs", "l2", "seed", "arch", "channels", "input_norm"});
  const fs::path dataset_dir = require_key(config, "train", "dataset_dir");
  const fs::path weights_out = require_key(config, "train", "weights_out");

  TrainConfig tc;
  tc.learning_rate = config.get_double("train", "learning_rate", tc.learning_rate);
  tc.batch_size = config.get_int("train", "batch", tc.batch_size);
  tc.decay = config.get_double("train", "decay", tc.decay);
  tc.epochs = config.get_int("train", "epochs", tc.epochs);
  tc.l2_factor = config.get_double("train", "l2", tc.l2_factor);
  tc.seed = opts.seed.value_or(config.get_u64("train", "seed", tc.seed));
  tc.validate();

  const Manifest train_manifest = read_manifest_csv(dataset_dir / "manifest_train.csv");
  const Manifest test_manifest = read_manifest_csv(dataset_dir / "manifest_test.csv");
  if (train_manifest.records.empty()) {
    throw ConfigError("training manifest is empty");
  }

  double input_norm = config.get_double("train", "input_norm", 0.0);
  if (!(input_norm > 0.0)) {
    input_norm = max_flow_magnitude(train_manifest, dataset_dir);
  }
  const FlowField probe = read_flo(dataset_dir / train_manifest.records.front().flow_path);

  const std::string arch = config.get_string("train", "arch", "flatten");
  std::vector<double> channels_d =
      config.get_double_list("train", "channels", {8, 16, 32, 32});
  std::vector<int> channels(channels_d.begin(), channels_d.end());
  const int n_outputs = static_cast<int>(train_manifest.n_sections);
  RegressorSpec spec;
  if (arch == "gap") {
    spec = make_conv_gap_spec(probe.height, probe.width, input_norm, channels, n_outputs);
  } else if (arch == "flatten") {
    spec = make_conv_flatten_spec(probe.height, probe.width, input_norm, channels, n_outputs);
  } else {
    throw ConfigError("train.arch must be 'gap' or 'flatten', got '" + arch + "'");
  }

  const std::vector<TrainSample> train_set =
      load_training_samples(train_manifest, dataset_dir, input_norm);
  const std::vector<TrainSample> test_set =
      load_training_samples(test_manifest, dataset_dir, input_norm);

  Regressor net(spec, tc.seed);
  const std::vector<EpochStats> curve = train(net, train_set, test_set, tc);

  write_run_manifest(weights_out.parent_path().empty() ? fs::path(".")
                                                       : weights_out.parent_path(),
                     "train", opts);
  net.save(weights_out);
  if (config.has("train", "curve_out")) {
    write_loss_curve_csv(curve, config.get_string("train", "curve_out", ""));
  }
  std::printf("trained %d epochs: final train loss %.6g, test mse %.6g\n", tc.epochs,
              curve.back().train_loss, mean_mse(net, test_set));
  return kExitOk;
}

int cmd_estimate(const RunOptions& opts) {
  const ConfigFile& config = opts.config;
  config.require_known_keys(
      "estimate", {"frames_dir", "initial", "last", "fps", "estimator", "weights", "out"});
  const FrameConfig frame = frame_from_config(config);
  const Camera camera = camera_from_config(config);
  const FlowSolverConfig solver = solver_from_config(config);
  const fs::path out = require_key(config, "estimate", "out");

  SequenceSpec spec;
  spec.frames = list_frames(require_key(config, "estimate", "frames_dir"));
  spec.initial = static_cast<std::size_t>(config.get_int("estimate", "initial", 0));
  spec.last = static_cast<std::size_t>(
      config.get_int("estimate", "last", static_cast<int>(spec.frames.size()) - 1));
  spec.fps = config.get_double("estimate", "fps", 30.0);

  const FrameMesh mesh = build_frame_mesh(frame);
  const std::string estimator = config.get_string("estimate", "estimator", "lsq");

  PoseEstimatorFn estimate;
  std::optional<FlowBasis> basis;
  std::optional<Regressor> net;
  if (estimator == "lsq") {
    basis = build_flow_basis(mesh, camera);
    estimate = [&basis](const FlowField& flow) { return estimate_lsq(flow, *basis); };
  } else if (estimator == "regressor") {
    net.emplace(Regressor::load(require_key(config, "estimate", "weights")));
    estimate = [&net](const FlowField& flow) { return predict(*net, flow); };
  } else {
    throw ConfigError("estimate.estimator must be 'lsq' or 'regressor', got '" + estimator + "'");
  }

  const std::vector<PoseParams> poses = run_sequence(spec, mesh, camera, solver, estimate);
  write_run_manifest(out.parent_path().empty() ? fs::path(".") : out.parent_path(), "estimate",
                     opts);
  write_pose_csv(poses, spec.fps, out);
  std::printf("estimated %zu frames (window %zu..%zu) to %s\n", poses.size(), spec.initial,
              spec.last, out.string().c_str());
  return kExitOk;
}

int cmd_analyze(const RunOptions& opts) {
  const ConfigFile& config = opts.config;
  config.require_known_keys("analyze", {"poses", "points", "fps", "window", "out_prefix"});
  const FrameConfig frame = frame_from_config(config);
  const fs::path poses_path = require_key(config, "analyze", "poses");
  const std::string out_prefix = require_key(config, "analyze", "out_prefix");
  const double fps = config.get_double("analyze", "fps", 30.0);
  const std::string window_name = config.get_string("analyze", "window", "none");
  Window window;
  if (window_name == "none") {
    window = Window::kNone;
  } else if (window_name == "hann") {
    window = Window::kHann;
  } else {
    throw ConfigError("analyze.window must be 'none' or 'hann', got '" + window_name + "'");
  }
  const std::vector<double> points = config.get_double_list("analyze", "points", {1.0});

  const std::vector<PoseParams> poses = read_pose_csv(poses_path);
  const fs::path prefix(out_prefix);
  write_run_manifest(prefix.parent_path().empty() ? fs::path(".") : prefix.parent_path(),
                     "analyze", opts);

  std::string summary = "y_norm,dominant_hz\n";
  for (std::size_t i = 0; i < points.size(); ++i) {
    const DisplacementSeries series = displacement_at(poses, frame.layout, points[i], fps);
    const Spectrum spectrum = fft_spectrum(series, window);
    const double peak = dominant_frequency(spectrum, true);
    char tag[32];
    std::snprintf(tag, sizeof(tag), "_p%zu", i);
    write_series_csv(series, out_prefix + tag + "_displacement.csv");
    write_spectrum_csv(spectrum, out_prefix + tag + "_spectrum.csv");
    char row[128];
    std::snprintf(row, sizeof(row), "%.9g,%.9g\n", points[i], peak);
    summary += row;
    std::printf("point y=%.4g: dominant frequency %.4g Hz\n", points[i], peak);
  }
  std::FILE* f = std::fopen((out_prefix + "_summary.csv").c_str(), "w");
  if (!f) {
    throw IoError("cannot write " + out_prefix + "_summary.csv");
  }
  std::fputs(summary.c_str(), f);
  std::fclose(f);
  return kExitOk;
}

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"structural displacement from image sequences"};
  app.set_version_flag("--version", std::string("frameflow ") + kVersion);
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> overrides;
  std::uint64_t seed_flag = 0;
  bool seed_set = false;
  int workers = 1;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "configuration file")->required();
    sub->add_option("--set", overrides, "override a config value (section.key=value)");
    sub->add_option("--seed", seed_flag, "override the run seed")
        ->each([&seed_set](const std::string&) { seed_set = true; });
    sub->add_option("--workers", workers, "worker threads where supported");
  };

  CLI::App* render = app.add_subcommand("render", "rasterize the (deformed) frame model");
  CLI::App* flow = app.add_subcommand("flow", "dense optical flow between two images");
  CLI::App* generate = app.add_subcommand("generate", "synthesize a training dataset");
  CLI::App* train_cmd = app.add_subcommand("train", "train the pose regressor");
  CLI::App* estimate = app.add_subcommand("estimate", "recover poses for a frame sequence");
  CLI::App* analyze = app.add_subcommand("analyze", "displacement histories and spectra");
  for (CLI::App* sub : {render, flow, generate, train_cmd, estimate, analyze}) {
    add_common(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    RunOptions opts{ConfigFile::parse_file(config_path), std::nullopt, workers};
    for (const std::string& assignment : overrides) {
      opts.config.apply_override(assignment);
    }
    if (seed_set) {
      opts.seed = seed_flag;
    }
    if (workers < 1) {
      throw ConfigError("--workers must be >= 1");
    }

    if (render->parsed()) return cmd_render(opts);
    if (flow->parsed()) return cmd_flow(opts);
    if (generate->parsed()) return cmd_generate(opts);
    if (train_cmd->parsed()) return cmd_train(opts);
    if (estimate->parsed()) return cmd_estimate(opts);
    if (analyze->parsed()) return cmd_analyze(opts);
    return kExitUsage;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const ShapeError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const DomainError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const IoError& e) {
    std::fprintf(stderr, "io error: %s\n", e.what());
    return kExitIo;
  } catch (const NumericError& e) {
    std::fprintf(stderr, "numerical error: %s\n", e.what());
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  }
}

}  // namespace frameflow
