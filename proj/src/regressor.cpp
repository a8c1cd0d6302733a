#include "frameflow/regressor.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <memory>
#include <numeric>
#include <string>

#include "frameflow/errors.hpp"
#include "frameflow/rng.hpp"

namespace frameflow {

Tensor Tensor::zeros(int c, int h, int w) {
  Tensor t;
  t.c = c;
  t.h = h;
  t.w = w;
  t.data.assign(static_cast<std::size_t>(c) * h * w, 0.0);
  return t;
}

// ---------------------------------------------------------------- layers

class Layer {
 public:
  virtual ~Layer() = default;

  virtual void out_shape(int& c, int& h, int& w) const = 0;

  // pure inference path
  virtual Tensor apply(const Tensor& in) const = 0;
  // training path, caches whatever backward needs
  virtual Tensor apply_train(const Tensor& in) { return apply(in); }
  // propagates d(loss)/d(out) to d(loss)/d(in), accumulating weight grads
  virtual Tensor backward(const Tensor& grad_out) = 0;

  virtual void collect_params(std::vector<double*>&) {}
  virtual void collect_params(std::vector<const double*>&) const {}
  virtual void collect_grads(std::vector<double*>&) {}
  virtual void init_weights(Rng&) {}
};

namespace {

class ConvLayer : public Layer {
 public:
  ConvLayer(int in_c, int out_c, int kernel, int stride, int in_h, int in_w)
      : in_c_(in_c), out_c_(out_c), k_(kernel), s_(stride), in_h_(in_h), in_w_(in_w) {
    pad_ = k_ / 2;
    out_h_ = (in_h_ + 2 * pad_ - k_) / s_ + 1;
    out_w_ = (in_w_ + 2 * pad_ - k_) / s_ + 1;
    if (out_h_ <= 0 || out_w_ <= 0) {
      throw ConfigError("conv layer collapses the map to zero size");
    }
    weights_.assign(static_cast<std::size_t>(out_c_) * in_c_ * k_ * k_, 0.0);
    bias_.assign(out_c_, 0.0);
    wgrad_.assign(weights_.size(), 0.0);
    bgrad_.assign(bias_.size(), 0.0);
  }

  void out_shape(int& c, int& h, int& w) const override {
    c = out_c_;
    h = out_h_;
    w = out_w_;
  }

  Tensor apply(const Tensor& in) const override {
    Tensor out = Tensor::zeros(out_c_, out_h_, out_w_);
    for (int oc = 0; oc < out_c_; ++oc) {
      const double* wbase = &weights_[static_cast<std::size_t>(oc) * in_c_ * k_ * k_];
      for (int oy = 0; oy < out_h_; ++oy) {
        for (int ox = 0; ox < out_w_; ++ox) {
          double acc = bias_[oc];
          const int y0 = oy * s_ - pad_;
          const int x0 = ox * s_ - pad_;
          for (int ic = 0; ic < in_c_; ++ic) {
            const double* wc = wbase + static_cast<std::size_t>(ic) * k_ * k_;
            for (int ky = 0; ky < k_; ++ky) {
              const int y = y0 + ky;
              if (y < 0 || y >= in_h_) continue;
              for (int kx = 0; kx < k_; ++kx) {
                const int x = x0 + kx;
                if (x < 0 || x >= in_w_) continue;
                acc += wc[ky * k_ + kx] * in.at(ic, y, x);
              }
            }
          }
          out.at(oc, oy, ox) = acc;
        }
      }
    }
    return out;
  }

  Tensor apply_train(const Tensor& in) override {
    input_ = in;
    return apply(in);
  }

  Tensor backward(const Tensor& grad_out) override {
    Tensor grad_in = Tensor::zeros(in_c_, in_h_, in_w_);
    for (int oc = 0; oc < out_c_; ++oc) {
      double* wg = &wgrad_[static_cast<std::size_t>(oc) * in_c_ * k_ * k_];
      const double* wbase = &weights_[static_cast<std::size_t>(oc) * in_c_ * k_ * k_];
      for (int oy = 0; oy < out_h_; ++oy) {
        for (int ox = 0; ox < out_w_; ++ox) {
          const double g = grad_out.at(oc, oy, ox);
          if (g == 0.0) continue;
          bgrad_[oc] += g;
          const int y0 = oy * s_ - pad_;
          const int x0 = ox * s_ - pad_;
          for (int ic = 0; ic < in_c_; ++ic) {
            const double* wc = wbase + static_cast<std::size_t>(ic) * k_ * k_;
            double* wgc = wg + static_cast<std::size_t>(ic) * k_ * k_;
            for (int ky = 0; ky < k_; ++ky) {
              const int y = y0 + ky;
              if (y < 0 || y >= in_h_) continue;
              for (int kx = 0; kx < k_; ++kx) {
                const int x = x0 + kx;
                if (x < 0 || x >= in_w_) continue;
                wgc[ky * k_ + kx] += g * input_.at(ic, y, x);
                grad_in.at(ic, y, x) += g * wc[ky * k_ + kx];
              }
            }
          }
        }
      }
    }
    return grad_in;
  }

  void collect_params(std::vector<double*>& p) override {
    for (double& w : weights_) p.push_back(&w);
    for (double& b : bias_) p.push_back(&b);
  }
  void collect_params(std::vector<const double*>& p) const override {
    for (const double& w : weights_) p.push_back(&w);
    for (const double& b : bias_) p.push_back(&b);
  }
  void collect_grads(std::vector<double*>& g) override {
    for (double& w : wgrad_) g.push_back(&w);
    for (double& b : bgrad_) g.push_back(&b);
  }
  void init_weights(Rng& rng) override {
    const double bound = 1.0 / std::sqrt(static_cast<double>(in_c_) * k_ * k_);
    for (double& w : weights_) {
      w = rng.uniform(-bound, bound);
    }
  }

 private:
  int in_c_, out_c_, k_, s_, in_h_, in_w_, pad_, out_h_, out_w_;
  std::vector<double> weights_, bias_, wgrad_, bgrad_;
  Tensor input_;
};

class ReluLayer : public Layer {
 public:
  ReluLayer(int c, int h, int w) : c_(c), h_(h), w_(w) {}

  void out_shape(int& c, int& h, int& w) const override {
    c = c_;
    h = h_;
    w = w_;
  }

  Tensor apply(const Tensor& in) const override {
    Tensor out = in;
    for (double& v : out.data) {
      v = v > 0.0 ? v : 0.0;
    }
    return out;
  }

  Tensor apply_train(const Tensor& in) override {
    input_ = in;
    return apply(in);
  }

  Tensor backward(const Tensor& grad_out) override {
    Tensor grad_in = grad_out;
    for (std::size_t i = 0; i < grad_in.data.size(); ++i) {
      if (input_.data[i] <= 0.0) {
        grad_in.data[i] = 0.0;
      }
    }
    return grad_in;
  }

 private:
  int c_, h_, w_;
  Tensor input_;
};

class GlobalAvgPoolLayer : public Layer {
 public:
  GlobalAvgPoolLayer(int c, int h, int w) : c_(c), h_(h), w_(w) {}

  void out_shape(int& c, int& h, int& w) const override {
    c = c_;
    h = 1;
    w = 1;
  }

  Tensor apply(const Tensor& in) const override {
    Tensor out = Tensor::zeros(c_, 1, 1);
    const double inv = 1.0 / (static_cast<double>(h_) * w_);
    for (int c = 0; c < c_; ++c) {
      double acc = 0.0;
      for (int y = 0; y < h_; ++y) {
        for (int x = 0; x < w_; ++x) {
          acc += in.at(c, y, x);
        }
      }
      out.data[c] = acc * inv;
    }
    return out;
  }

  Tensor backward(const Tensor& grad_out) override {
    Tensor grad_in = Tensor::zeros(c_, h_, w_);
    const double inv = 1.0 / (static_cast<double>(h_) * w_);
    for (int c = 0; c < c_; ++c) {
      const double g = grad_out.data[c] * inv;
      for (int y = 0; y < h_; ++y) {
        for (int x = 0; x < w_; ++x) {
          grad_in.at(c, y, x) = g;
        }
      }
    }
    return grad_in;
  }

 private:
  int c_, h_, w_;
};

class FlattenLayer : public Layer {
 public:
  FlattenLayer(int c, int h, int w) : c_(c), h_(h), w_(w) {}

  void out_shape(int& c, int& h, int& w) const override {
    c = c_ * h_ * w_;
    h = 1;
    w = 1;
  }

  Tensor apply(const Tensor& in) const override {
    Tensor out = in;
    out.c = c_ * h_ * w_;
    out.h = 1;
    out.w = 1;
    return out;
  }

  Tensor backward(const Tensor& grad_out) override {
    Tensor grad_in = grad_out;
    grad_in.c = c_;
    grad_in.h = h_;
    grad_in.w = w_;
    return grad_in;
  }

 private:
  int c_, h_, w_;
};

class DenseLayer : public Layer {
 public:
  DenseLayer(int in_n, int out_n) : in_n_(in_n), out_n_(out_n) {
    weights_.assign(static_cast<std::size_t>(out_n_) * in_n_, 0.0);
    bias_.assign(out_n_, 0.0);
    wgrad_.assign(weights_.size(), 0.0);
    bgrad_.assign(bias_.size(), 0.0);
  }

  void out_shape(int& c, int& h, int& w) const override {
    c = out_n_;
    h = 1;
    w = 1;
  }

  Tensor apply(const Tensor& in) const override {
    Tensor out = Tensor::zeros(out_n_, 1, 1);
    for (int o = 0; o < out_n_; ++o) {
      const double* row = &weights_[static_cast<std::size_t>(o) * in_n_];
      double acc = bias_[o];
      for (int i = 0; i < in_n_; ++i) {
        acc += row[i] * in.data[i];
      }
      out.data[o] = acc;
    }
    return out;
  }

  Tensor apply_train(const Tensor& in) override {
    input_ = in;
    return apply(in);
  }

  Tensor backward(const Tensor& grad_out) override {
    Tensor grad_in = Tensor::zeros(in_n_, 1, 1);
    for (int o = 0; o < out_n_; ++o) {
      const double g = grad_out.data[o];
      bgrad_[o] += g;
      double* wg = &wgrad_[static_cast<std::size_t>(o) * in_n_];
      const double* row = &weights_[static_cast<std::size_t>(o) * in_n_];
      for (int i = 0; i < in_n_; ++i) {
        wg[i] += g * input_.data[i];
        grad_in.data[i] += g * row[i];
      }
    }
    return grad_in;
  }

  void collect_params(std::vector<double*>& p) override {
    for (double& w : weights_) p.push_back(&w);
    for (double& b : bias_) p.push_back(&b);
  }
  void collect_params(std::vector<const double*>& p) const override {
    for (const double& w : weights_) p.push_back(&w);
    for (const double& b : bias_) p.push_back(&b);
  }
  void collect_grads(std::vector<double*>& g) override {
    for (double& w : wgrad_) g.push_back(&w);
    for (double& b : bgrad_) g.push_back(&b);
  }
  void init_weights(Rng& rng) override {
    const double bound = 1.0 / std::sqrt(static_cast<double>(in_n_));
    for (double& w : weights_) {
      w = rng.uniform(-bound, bound);
    }
  }

 private:
  int in_n_, out_n_;
  std::vector<double> weights_, bias_, wgrad_, bgrad_;
  Tensor input_;
};

}  // namespace

// ---------------------------------------------------------------- specs

RegressorSpec make_conv_gap_spec(int in_h, int in_w, double input_scale,
                                 const std::vector<int>& channels, int n_outputs) {
  RegressorSpec spec;
  spec.in_c = 2;
  spec.in_h = in_h;
  spec.in_w = in_w;
  spec.input_scale = input_scale;
  int c = spec.in_c;
  for (int ch : channels) {
    spec.layers.push_back({LayerKind::kConv, c, ch, 3, 2});
    spec.layers.push_back({LayerKind::kRelu});
    c = ch;
  }
  spec.layers.push_back({LayerKind::kGlobalAvgPool});
  spec.layers.push_back({LayerKind::kDense, c, n_outputs});
  return spec;
}

RegressorSpec make_conv_flatten_spec(int in_h, int in_w, double input_scale,
                                     const std::vector<int>& channels, int n_outputs) {
  RegressorSpec spec;
  spec.in_c = 2;
  spec.in_h = in_h;
  spec.in_w = in_w;
  spec.input_scale = input_scale;
  int c = spec.in_c;
  int h = in_h;
  int w = in_w;
  for (int ch : channels) {
    spec.layers.push_back({LayerKind::kConv, c, ch, 3, 2});
    spec.layers.push_back({LayerKind::kRelu});
    c = ch;
    h = (h + 2 * 1 - 3) / 2 + 1;
    w = (w + 2 * 1 - 3) / 2 + 1;
  }
  spec.layers.push_back({LayerKind::kFlatten});
  spec.layers.push_back({LayerKind::kDense, c * h * w, n_outputs});
  return spec;
}

// ---------------------------------------------------------------- regressor

Regressor::Regressor(RegressorSpec spec, std::uint64_t init_seed) : spec_(std::move(spec)) {
  if (spec_.in_c <= 0 || spec_.in_h <= 0 || spec_.in_w <= 0) {
    throw ConfigError("regressor input dimensions must be positive");
  }
  if (!(spec_.input_scale > 0.0)) {
    throw ConfigError("regressor input_scale must be positive");
  }
  int c = spec_.in_c;
  int h = spec_.in_h;
  int w = spec_.in_w;
  for (const LayerDesc& d : spec_.layers) {
    switch (d.kind) {
      case LayerKind::kConv:
        if (d.a != c) {
          throw ConfigError("conv layer expects " + std::to_string(d.a) + " channels, got " +
                            std::to_string(c));
        }
        layers_.push_back(std::make_unique<ConvLayer>(d.a, d.b, d.k, d.s, h, w));
        break;
      case LayerKind::kRelu:
        layers_.push_back(std::make_unique<ReluLayer>(c, h, w));
        break;
      case LayerKind::kGlobalAvgPool:
        layers_.push_back(std::make_unique<GlobalAvgPoolLayer>(c, h, w));
        break;
      case LayerKind::kFlatten:
        layers_.push_back(std::make_unique<FlattenLayer>(c, h, w));
        break;
      case LayerKind::kDense:
        if (d.a != c * h * w) {
          throw ConfigError("dense layer expects " + std::to_string(d.a) + " inputs, got " +
                            std::to_string(c * h * w));
        }
        layers_.push_back(std::make_unique<DenseLayer>(d.a, d.b));
        break;
      default:
        throw ConfigError("unknown layer kind");
    }
    layers_.back()->out_shape(c, h, w);
  }
  if (layers_.empty() || h != 1 || w != 1) {
    throw ConfigError("regressor must end in a vector output");
  }

  Rng rng(splitmix64(init_seed));
  for (auto& layer : layers_) {
    layer->init_weights(rng);
  }
}

Regressor::Regressor(Regressor&&) noexcept = default;
Regressor& Regressor::operator=(Regressor&&) noexcept = default;
Regressor::~Regressor() = default;

int Regressor::output_size() const {
  int c = spec_.in_c, h = spec_.in_h, w = spec_.in_w;
  for (const auto& layer : layers_) {
    layer->out_shape(c, h, w);
  }
  return c;
}

std::vector<double> Regressor::forward(const Tensor& input) const {
  if (input.c != spec_.in_c || input.h != spec_.in_h || input.w != spec_.in_w) {
    throw ShapeError("regressor input shape mismatch");
  }
  Tensor t = input;
  for (const auto& layer : layers_) {
    t = layer->apply(t);
  }
  return t.data;
}

std::vector<double> Regressor::forward_train(const Tensor& input) {
  if (input.c != spec_.in_c || input.h != spec_.in_h || input.w != spec_.in_w) {
    throw ShapeError("regressor input shape mismatch");
  }
  Tensor t = input;
  for (auto& layer : layers_) {
    t = layer->apply_train(t);
  }
  return t.data;
}

void Regressor::backward(const std::vector<double>& grad_output) {
  Tensor g;
  g.c = static_cast<int>(grad_output.size());
  g.h = 1;
  g.w = 1;
  g.data = grad_output;
  for (auto it = layers_.rbegin(); it != layers_.rend(); ++it) {
    g = (*it)->backward(g);
  }
}

std::vector<double*> Regressor::parameters() {
  std::vector<double*> p;
  for (auto& layer : layers_) {
    layer->collect_params(p);
  }
  return p;
}

std::vector<const double*> Regressor::parameters() const {
  std::vector<const double*> p;
  for (const auto& layer : layers_) {
    layer->collect_params(p);
  }
  return p;
}

std::size_t Regressor::parameter_count() const { return parameters().size(); }

double Regressor::squared_weight_norm() const {
  double acc = 0.0;
  for (const double* p : parameters()) {
    acc += *p * *p;
  }
  return acc;
}

void Regressor::zero_grads() {
  std::vector<double*> g;
  for (auto& layer : layers_) {
    layer->collect_grads(g);
  }
  for (double* p : g) {
    *p = 0.0;
  }
}

std::vector<double*> Regressor::gradients() {
  std::vector<double*> g;
  for (auto& layer : layers_) {
    layer->collect_grads(g);
  }
  return g;
}

// ---------------------------------------------------------------- io

namespace {
constexpr char kWeightsMagic[8] = {'F', 'F', 'R', 'E', 'G', 'R', '0', '1'};

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

template <typename T>
void write_raw(std::FILE* f, const T& value) {
  if (std::fwrite(&value, sizeof(T), 1, f) != 1) {
    throw IoError("short write while saving regressor weights");
  }
}

template <typename T>
T read_raw(std::FILE* f) {
  T value;
  if (std::fread(&value, sizeof(T), 1, f) != 1) {
    throw IoError("truncated regressor weights file");
  }
  return value;
}
}  // namespace

void Regressor::save(const std::filesystem::path& path) const {
  FilePtr f(std::fopen(path.string().c_str(), "wb"));
  if (!f) {
    throw IoError("cannot open " + path.string() + " for writing");
  }
  if (std::fwrite(kWeightsMagic, 1, 8, f.get()) != 8) {
    throw IoError("short write to " + path.string());
  }
  write_raw<std::uint32_t>(f.get(), static_cast<std::uint32_t>(spec_.in_c));
  write_raw<std::uint32_t>(f.get(), static_cast<std::uint32_t>(spec_.in_h));
  write_raw<std::uint32_t>(f.get(), static_cast<std::uint32_t>(spec_.in_w));
  write_raw<float>(f.get(), static_cast<float>(spec_.input_scale));
  write_raw<std::uint32_t>(f.get(), static_cast<std::uint32_t>(spec_.layers.size()));
  for (const LayerDesc& d : spec_.layers) {
    write_raw<std::uint32_t>(f.get(), static_cast<std::uint32_t>(d.kind));
    write_raw<std::int32_t>(f.get(), d.a);
    write_raw<std::int32_t>(f.get(), d.b);
    write_raw<std::int32_t>(f.get(), d.k);
    write_raw<std::int32_t>(f.get(), d.s);
  }
  const auto params = parameters();
  write_raw<std::uint64_t>(f.get(), params.size());
  for (const double* p : params) {
    write_raw<float>(f.get(), static_cast<float>(*p));
  }
}

Regressor Regressor::load(const std::filesystem::path& path) {
  FilePtr f(std::fopen(path.string().c_str(), "rb"));
  if (!f) {
    throw IoError("cannot open " + path.string());
  }
  char magic[8];
  if (std::fread(magic, 1, 8, f.get()) != 8 || std::memcmp(magic, kWeightsMagic, 8) != 0) {
    throw IoError(path.string() + " is not a regressor weights file");
  }
  RegressorSpec spec;
  spec.in_c = static_cast<int>(read_raw<std::uint32_t>(f.get()));
  spec.in_h = static_cast<int>(read_raw<std::uint32_t>(f.get()));
  spec.in_w = static_cast<int>(read_raw<std::uint32_t>(f.get()));
  spec.input_scale = read_raw<float>(f.get());
  const std::uint32_t n_layers = read_raw<std::uint32_t>(f.get());
  for (std::uint32_t i = 0; i < n_layers; ++i) {
    LayerDesc d;
    d.kind = static_cast<LayerKind>(read_raw<std::uint32_t>(f.get()));
    d.a = read_raw<std::int32_t>(f.get());
    d.b = read_raw<std::int32_t>(f.get());
    d.k = read_raw<std::int32_t>(f.get());
    d.s = read_raw<std::int32_t>(f.get());
    spec.layers.push_back(d);
  }
  Regressor net(spec, 0);
  const auto params = net.parameters();
  const std::uint64_t count = read_raw<std::uint64_t>(f.get());
  if (count != params.size()) {
    throw IoError("weight count mismatch in " + path.string());
  }
  for (double* p : params) {
    *p = read_raw<float>(f.get());
  }
  return net;
}

// ---------------------------------------------------------------- training

Tensor encode_flow(const FlowField& flow, double input_scale) {
  Tensor t = Tensor::zeros(2, flow.height, flow.width);
  const double inv = 1.0 / input_scale;
  const std::size_t n = flow.u.size();
  for (std::size_t i = 0; i < n; ++i) {
    t.data[i] = flow.u[i] * inv;
    t.data[n + i] = flow.v[i] * inv;
  }
  return t;
}

PoseParams predict(const Regressor& net, const FlowField& flow) {
  if (flow.width != net.spec().in_w || flow.height != net.spec().in_h) {
    throw ShapeError("flow dimensions do not match the regressor input");
  }
  return net.forward(encode_flow(flow, net.spec().input_scale));
}

double mse_loss(const PoseParams& predicted, const PoseParams& target) {
  if (predicted.size() != target.size()) {
    throw ShapeError("pose length mismatch in loss: " + std::to_string(predicted.size()) +
                     " vs " + std::to_string(target.size()));
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const double d = predicted[i] - target[i];
    acc += d * d;
  }
  return acc / static_cast<double>(predicted.size());
}

double mse_loss(const PoseParams& predicted, const PoseParams& target,
                const std::vector<const double*>& weights, std::size_t weight_count,
                double l2_factor) {
  double norm2 = 0.0;
  for (std::size_t i = 0; i < weight_count; ++i) {
    norm2 += *weights[i] * *weights[i];
  }
  return mse_loss(predicted, target) + l2_factor * norm2;
}

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) {
    throw ConfigError("learning_rate must be positive");
  }
  if (batch_size < 1) {
    throw ConfigError("batch_size must be >= 1");
  }
  if (!(decay > 0.0) || decay > 1.0) {
    throw ConfigError("decay must be in (0, 1]");
  }
  if (epochs < 1) {
    throw ConfigError("epochs must be >= 1");
  }
  if (l2_factor < 0.0) {
    throw ConfigError("l2_factor must be non-negative");
  }
}

namespace {

Tensor sample_tensor(const TrainSample& s, const RegressorSpec& spec) {
  Tensor t;
  t.c = spec.in_c;
  t.h = spec.in_h;
  t.w = spec.in_w;
  t.data.assign(s.input.begin(), s.input.end());
  if (t.data.size() != static_cast<std::size_t>(t.c) * t.h * t.w) {
    throw ShapeError("training sample size does not match the regressor input");
  }
  return t;
}

}  // namespace

std::vector<EpochStats> train(Regressor& net, const std::vector<TrainSample>& train_set,
                              const std::vector<TrainSample>& test_set,
                              const TrainConfig& config) {
  config.validate();
  if (train_set.empty()) {
    throw ConfigError("training set is empty");
  }

  const auto params = net.parameters();
  const auto grads = net.gradients();
  const std::size_t n_params = params.size();

  Rng rng(splitmix64(config.seed ^ 0x7261696e3a5f5f31ull));
  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), 0);

  const int n_outputs = net.output_size();
  std::vector<EpochStats> curve;
  double lr = config.learning_rate;

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    // Fisher-Yates with the deterministic stream
    for (std::size_t i = order.size(); i > 1; --i) {
      const std::size_t j = rng.below(i);
      std::swap(order[i - 1], order[j]);
    }

    double epoch_loss = 0.0;
    std::size_t n_batches = 0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t stop = std::min(order.size(), start + config.batch_size);
      const double inv_batch = 1.0 / static_cast<double>(stop - start);

      net.zero_grads();
      double batch_mse = 0.0;
      for (std::size_t s = start; s < stop; ++s) {
        const TrainSample& sample = train_set[order[s]];
        const Tensor input = sample_tensor(sample, net.spec());
        const std::vector<double> pred = net.forward_train(input);
        if (pred.size() != sample.label.size()) {
          throw ShapeError("label length does not match the regressor output");
        }
        batch_mse += mse_loss(pred, sample.label);
        std::vector<double> grad(pred.size());
        for (std::size_t i = 0; i < pred.size(); ++i) {
          grad[i] = 2.0 * (pred[i] - sample.label[i]) / n_outputs * inv_batch;
        }
        net.backward(grad);
      }
      batch_mse *= inv_batch;
      const double batch_loss = batch_mse + config.l2_factor * net.squared_weight_norm();

      for (std::size_t i = 0; i < n_params; ++i) {
        const double g = *grads[i] + 2.0 * config.l2_factor * *params[i];
        *params[i] -= lr * g;
      }

      epoch_loss += batch_loss;
      ++n_batches;
    }

    EpochStats stats;
    stats.train_loss = epoch_loss / static_cast<double>(n_batches);
    stats.test_loss = test_set.empty()
                          ? 0.0
                          : mean_mse(net, test_set) + config.l2_factor * net.squared_weight_norm();
    curve.push_back(stats);
    lr *= config.decay;
  }
  return curve;
}

double mean_mse(const Regressor& net, const std::vector<TrainSample>& samples) {
  if (samples.empty()) {
    return 0.0;
  }
  double acc = 0.0;
  for (const TrainSample& s : samples) {
    const Tensor input = sample_tensor(s, net.spec());
    acc += mse_loss(net.forward(input), s.label);
  }
  return acc / static_cast<double>(samples.size());
}

void write_loss_curve_csv(const std::vector<EpochStats>& curve,
                          const std::filesystem::path& path) {
  std::FILE* f = std::fopen(path.string().c_str(), "w");
  if (!f) {
    throw IoError("cannot open " + path.string() + " for writing");
  }
  std::fprintf(f, "epoch,train_loss,test_loss\n");
  for (std::size_t e = 0; e < curve.size(); ++e) {
    std::fprintf(f, "%zu,%.17g,%.17g\n", e + 1, curve[e].train_loss, curve[e].test_loss);
  }
  std::fclose(f);
}

}  // namespace frameflow
