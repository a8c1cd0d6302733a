#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "frameflow/flow.hpp"
#include "frameflow/geometry.hpp"

namespace frameflow {

// Dense CHW tensor, double precision.
struct Tensor {
  int c = 0;
  int h = 0;
  int w = 0;
  std::vector<double> data;

  static Tensor zeros(int c, int h, int w);
  std::size_t size() const { return data.size(); }
  double& at(int ch, int y, int x) { return data[(static_cast<std::size_t>(ch) * h + y) * w + x]; }
  double at(int ch, int y, int x) const { return data[(static_cast<std::size_t>(ch) * h + y) * w + x]; }
};

enum class LayerKind : std::uint32_t {
  kConv = 1,     // 3x3 (or kxk) convolution, zero padding k/2, given stride
  kRelu = 2,
  kGlobalAvgPool = 3,
  kFlatten = 4,
  kDense = 5,
};

struct LayerDesc {
  LayerKind kind;
  int a = 0;  // conv: in channels;  dense: in features
  int b = 0;  // conv: out channels; dense: out features
  int k = 0;  // conv: kernel size
  int s = 0;  // conv: stride
};

struct RegressorSpec {
  int in_c = 2;
  int in_h = 0;
  int in_w = 0;
  double input_scale = 1.0;  // flow values are divided by this before the net
  std::vector<LayerDesc> layers;
};

// Stride-2 conv blocks with relu, global average pool, dense head to
// n_outputs. Channel widths are per block.
RegressorSpec make_conv_gap_spec(int in_h, int in_w, double input_scale,
                                 const std::vector<int>& channels, int n_outputs);

// Same conv trunk but the head flattens the final map instead of pooling it,
// keeping the spatial layout visible to the dense layer.
RegressorSpec make_conv_flatten_spec(int in_h, int in_w, double input_scale,
                                     const std::vector<int>& channels, int n_outputs);

class Layer;

// Trainable map from a denoised flow field to the pose parameters.
class Regressor {
 public:
  explicit Regressor(RegressorSpec spec, std::uint64_t init_seed = 1);

  const RegressorSpec& spec() const { return spec_; }
  int output_size() const;

  std::vector<double> forward(const Tensor& input) const;

  // Forward with caches, then backpropagation of d(loss)/d(output).
  // Parameter gradients are accumulated into grads().
  std::vector<double> forward_train(const Tensor& input);
  void backward(const std::vector<double>& grad_output);

  // Flat views over every trainable parameter and its gradient.
  std::vector<double*> parameters();
  std::vector<const double*> parameters() const;
  std::size_t parameter_count() const;
  double squared_weight_norm() const;
  void zero_grads();
  std::vector<double*> gradients();

  void save(const std::filesystem::path& path) const;
  static Regressor load(const std::filesystem::path& path);

  Regressor(Regressor&&) noexcept;
  Regressor& operator=(Regressor&&) noexcept;
  ~Regressor();

 private:
  RegressorSpec spec_;
  std::vector<std::unique_ptr<Layer>> layers_;
};

// (u, v) scaled by 1 / input_scale into a 2-channel tensor.
Tensor encode_flow(const FlowField& flow, double input_scale);

// Forward pass on a flow field; dimensions must match the spec.
PoseParams predict(const Regressor& net, const FlowField& flow);

// Mean squared error over the N components plus l2_factor times the squared
// L2 norm of all weights.
double mse_loss(const PoseParams& predicted, const PoseParams& target,
                const std::vector<const double*>& weights, std::size_t weight_count,
                double l2_factor);

// Loss without a weight term.
double mse_loss(const PoseParams& predicted, const PoseParams& target);

struct TrainConfig {
  double learning_rate = 0.01;
  int batch_size = 20;
  double decay = 0.94;  // multiplicative, per epoch
  int epochs = 30;
  double l2_factor = 1e-4;
  std::uint64_t seed = 1;

  void validate() const;  // throws ConfigError
};

struct TrainSample {
  std::vector<float> input;  // CHW, already scaled
  PoseParams label;
};

struct EpochStats {
  double train_loss = 0.0;  // epoch mean of minibatch losses (mse + l2 term)
  double test_loss = 0.0;   // test mse + l2 term at epoch end
};

// Minibatch SGD on mse_loss with per-epoch learning-rate decay. Deterministic
// for a fixed seed. Throws ConfigError on an empty training set.
std::vector<EpochStats> train(Regressor& net, const std::vector<TrainSample>& train_set,
                              const std::vector<TrainSample>& test_set, const TrainConfig& config);

// Mean over samples of the squared-error term alone (no weight penalty).
double mean_mse(const Regressor& net, const std::vector<TrainSample>& samples);

void write_loss_curve_csv(const std::vector<EpochStats>& curve, const std::filesystem::path& path);

}  // namespace frameflow
