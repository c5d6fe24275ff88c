// Copyright 2026 The voxdesk Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "voxdesk/errors.hpp"
#include "voxdesk/nnet/tensor.hpp"

namespace voxdesk::nnet {

enum class LayerKind : std::uint8_t {
  kConv2d = 1,
  kDense = 2,
  kRelu = 3,
  kGlobalAvgPool = 4,
  kL2Normalize = 5,
  kSoftmax = 6,
};

// kTime averages a [C, H, W] map over W only and flattens to [C * H].
enum class PoolAxes : std::uint8_t { kSpatial = 0, kTime = 1 };

struct Layer {
  LayerKind kind = LayerKind::kRelu;
  std::string name;
  int in_channels = 0;
  int out_channels = 0;
  int kernel_h = 0;
  int kernel_w = 0;
  int stride_h = 1;
  int stride_w = 1;
  PoolAxes pool = PoolAxes::kSpatial;

  bool has_params() const {
    return kind == LayerKind::kConv2d || kind == LayerKind::kDense;
  }
  std::string weight_name() const { return name + ".weight"; }
  std::string bias_name() const { return name + ".bias"; }

  friend bool operator==(const Layer&, const Layer&) = default;
};

inline Shape infer_output_shape(const Layer& layer, const Shape& in) {
  auto mismatch = [&](const std::string& what) {
    return ShapeError("layer '" + layer.name + "': " + what + ", got input " +
                      to_string(in));
  };
  switch (layer.kind) {
    case LayerKind::kConv2d: {
      if (in.size() != 3 || in[0] != layer.in_channels) {
        throw mismatch("expected [" + std::to_string(layer.in_channels) +
                       ", H, W]");
      }
      const int oh = (in[1] - layer.kernel_h) / layer.stride_h + 1;
      const int ow = (in[2] - layer.kernel_w) / layer.stride_w + 1;
      if (in[1] < layer.kernel_h || in[2] < layer.kernel_w) {
        throw mismatch("input smaller than kernel");
      }
      return {layer.out_channels, oh, ow};
    }
    case LayerKind::kDense:
      if (element_count(in) != layer.in_channels) {
        throw mismatch("expected " + std::to_string(layer.in_channels) +
                       " input features");
      }
      return {layer.out_channels};
    case LayerKind::kGlobalAvgPool:
      if (in.size() != 3) throw mismatch("expected [C, H, W]");
      if (layer.pool == PoolAxes::kTime) return {in[0] * in[1]};
      return {in[0]};
    case LayerKind::kL2Normalize:
    case LayerKind::kSoftmax:
      if (in.size() != 1) throw mismatch("expected a vector");
      return in;
    case LayerKind::kRelu:
      return in;
  }
  throw ShapeError("unknown layer kind");
}

/// Sequential network: ordered layers plus named parameter tensors.
template <typename Scalar>
class Model {
 public:
  using Params = std::map<std::string, Tensor<Scalar>>;

  Model() = default;
  explicit Model(Shape input_shape, std::uint64_t rng_seed = 0,
                 std::string tag = {})
      : input_shape_(std::move(input_shape)),
        shapes_{input_shape_},
        rng_seed_(rng_seed),
        tag_(std::move(tag)) {
    if (input_shape_.empty()) throw ShapeError("model input shape is empty");
    for (int d : input_shape_) {
      if (d <= 0) throw ShapeError("model input shape must be positive: " + to_string(input_shape_));
    }
  }

  /// Rebuilds a model from stored descriptors, validating shapes and names.
  static Model from_parts(Shape input_shape, std::vector<Layer> layers,
                          Params params, std::set<std::string> frozen,
                          std::uint64_t rng_seed, std::string tag) {
    Model m(std::move(input_shape), rng_seed, std::move(tag));
    for (auto& layer : layers) m.append(std::move(layer), /*init=*/false);
    for (const auto& [name, expected] : m.expected_param_shapes()) {
      auto it = params.find(name);
      if (it == params.end()) {
        throw ModelError("missing parameter '" + name + "'");
      }
      if (it->second.shape() != expected) {
        throw ShapeError("parameter '" + name + "' has shape " +
                         to_string(it->second.shape()) + ", expected " +
                         to_string(expected));
      }
    }
    if (params.size() != m.expected_param_shapes().size()) {
      throw ModelError("checkpoint carries unexpected parameters");
    }
    for (const auto& name : frozen) {
      if (!params.count(name)) throw ModelError("unknown frozen parameter '" + name + "'");
    }
    m.params_ = std::move(params);
    m.frozen_ = std::move(frozen);
    return m;
  }

  Model& conv2d(std::string name, int out_channels, int kernel_h, int kernel_w,
                int stride_h = 1, int stride_w = 1) {
    const Shape& in = output_shape();
    Layer l;
    l.kind = LayerKind::kConv2d;
    l.name = std::move(name);
    l.in_channels = in.empty() ? 0 : in[0];
    l.out_channels = out_channels;
    l.kernel_h = kernel_h;
    l.kernel_w = kernel_w;
    l.stride_h = stride_h;
    l.stride_w = stride_w;
    if (out_channels <= 0 || kernel_h <= 0 || kernel_w <= 0 || stride_h <= 0 ||
        stride_w <= 0) {
      throw ShapeError("conv2d '" + l.name + "': sizes must be positive");
    }
    return append(std::move(l), true);
  }

  Model& dense(std::string name, int out_features) {
    Layer l;
    l.kind = LayerKind::kDense;
    l.name = std::move(name);
    l.in_channels = static_cast<int>(element_count(output_shape()));
    l.out_channels = out_features;
    if (out_features <= 0) throw ShapeError("dense '" + l.name + "': size must be positive");
    return append(std::move(l), true);
  }

  Model& relu() { return append(simple(LayerKind::kRelu, "relu"), false); }
  Model& global_avg_pool(PoolAxes axes = PoolAxes::kSpatial) {
    Layer l = simple(LayerKind::kGlobalAvgPool, "pool");
    l.pool = axes;
    return append(std::move(l), false);
  }
  Model& l2_normalize() { return append(simple(LayerKind::kL2Normalize, "l2norm"), false); }
  Model& softmax() { return append(simple(LayerKind::kSoftmax, "softmax"), false); }

  void freeze(const std::string& param) {
    if (!params_.count(param)) throw InvalidArgument("unknown parameter '" + param + "'");
    frozen_.insert(param);
  }
  void freeze_all() {
    for (const auto& [name, _] : params_) frozen_.insert(name);
  }
  void unfreeze_all() { frozen_.clear(); }
  bool is_trainable(const std::string& param) const {
    return params_.count(param) && !frozen_.count(param);
  }

  const Shape& input_shape() const { return input_shape_; }
  const Shape& output_shape() const { return shapes_.back(); }
  // shape_at(i) is the input shape of layer i; shape_at(layers().size()) the output.
  const Shape& shape_at(std::size_t i) const { return shapes_.at(i); }
  const std::vector<Layer>& layers() const { return layers_; }
  Params& params() { return params_; }
  const Params& params() const { return params_; }
  const std::set<std::string>& frozen() const { return frozen_; }
  std::uint64_t rng_seed() const { return rng_seed_; }
  const std::string& tag() const { return tag_; }
  void set_tag(std::string tag) { tag_ = std::move(tag); }

  bool ends_with_softmax() const {
    return !layers_.empty() && layers_.back().kind == LayerKind::kSoftmax;
  }

  template <typename Other>
  Model<Other> cast() const {
    typename Model<Other>::Params p;
    for (const auto& [name, t] : params_) p.emplace(name, t.template cast<Other>());
    return Model<Other>::from_parts(input_shape_, layers_, std::move(p), frozen_,
                                    rng_seed_, tag_);
  }

  friend bool operator==(const Model& a, const Model& b) {
    return a.input_shape_ == b.input_shape_ && a.layers_ == b.layers_ &&
           a.params_ == b.params_ && a.frozen_ == b.frozen_ &&
           a.rng_seed_ == b.rng_seed_ && a.tag_ == b.tag_;
  }

 private:
  static Layer simple(LayerKind kind, const char* prefix) {
    Layer l;
    l.kind = kind;
    l.name = prefix;
    return l;
  }

  std::map<std::string, Shape> expected_param_shapes() const {
    std::map<std::string, Shape> out;
    for (const auto& l : layers_) {
      if (l.kind == LayerKind::kConv2d) {
        out[l.weight_name()] = {l.out_channels, l.in_channels, l.kernel_h, l.kernel_w};
        out[l.bias_name()] = {l.out_channels};
      } else if (l.kind == LayerKind::kDense) {
        out[l.weight_name()] = {l.out_channels, l.in_channels};
        out[l.bias_name()] = {l.out_channels};
      }
    }
    return out;
  }

  Model& append(Layer layer, bool init) {
    if (input_shape_.empty()) throw ShapeError("model has no input shape");
    if (layer.has_params()) {
      if (params_.count(layer.weight_name()) ||
          std::any_of(layers_.begin(), layers_.end(),
                      [&](const Layer& l) { return l.has_params() && l.name == layer.name; })) {
        throw ModelError("duplicate parameter prefix '" + layer.name + "'");
      }
    }
    Shape out = infer_output_shape(layer, shapes_.back());
    if (init && layer.has_params()) initialize(layer);
    layers_.push_back(std::move(layer));
    shapes_.push_back(std::move(out));
    return *this;
  }

  void initialize(const Layer& l) {
    Shape w_shape;
    int fan_in = 0;
    if (l.kind == LayerKind::kConv2d) {
      w_shape = {l.out_channels, l.in_channels, l.kernel_h, l.kernel_w};
      fan_in = l.in_channels * l.kernel_h * l.kernel_w;
    } else {
      w_shape = {l.out_channels, l.in_channels};
      fan_in = l.in_channels;
    }
    // Per-layer stream so inserting a layer never perturbs the others' init.
    std::mt19937_64 rng(rng_seed_ ^ (0x9E3779B97F4A7C15ULL * (layers_.size() + 1)));
    std::normal_distribution<double> normal(0.0, std::sqrt(2.0 / fan_in));
    Tensor<Scalar> w(w_shape);
    for (Eigen::Index i = 0; i < w.size(); ++i) w[i] = static_cast<Scalar>(normal(rng));
    params_.emplace(l.weight_name(), std::move(w));
    params_.emplace(l.bias_name(), Tensor<Scalar>({l.out_channels}));
  }

  Shape input_shape_;
  std::vector<Layer> layers_;
  std::vector<Shape> shapes_;
  Params params_;
  std::set<std::string> frozen_;
  std::uint64_t rng_seed_ = 0;
  std::string tag_;
};

template <typename Scalar>
using Gradients = std::map<std::string, Tensor<Scalar>>;

/// Layer inputs recorded by forward(); values[i] feeds layer i, values.back() is the output.
template <typename Scalar>
struct Trace {
  std::vector<Tensor<Scalar>> values;

  bool empty() const { return values.empty(); }
  std::size_t layers_run() const { return values.empty() ? 0 : values.size() - 1; }
  const Tensor<Scalar>& output() const {
    if (values.empty()) throw StateError("trace is empty: forward was not run");
    return values.back();
  }
};

template <typename Scalar>
struct BackwardResult {
  Gradients<Scalar> params;
  Tensor<Scalar> input_grad;
};

namespace detail {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using RowMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

// Unfolds a [C, H, W] input into a (C*kh*kw) x (OH*OW) patch matrix.
template <typename Scalar>
Matrix<Scalar> im2col(const Tensor<Scalar>& in, const Layer& l, const Shape& out) {
  const int c_in = in.shape()[0], h = in.shape()[1], w = in.shape()[2];
  const int oh = out[1], ow = out[2];
  Matrix<Scalar> cols(c_in * l.kernel_h * l.kernel_w, oh * ow);
  const Scalar* src = in.data().data();
  for (int c = 0; c < c_in; ++c) {
    for (int i = 0; i < l.kernel_h; ++i) {
      for (int j = 0; j < l.kernel_w; ++j) {
        const int row = (c * l.kernel_h + i) * l.kernel_w + j;
        for (int y = 0; y < oh; ++y) {
          const Scalar* line = src + (c * h + y * l.stride_h + i) * w + j;
          for (int x = 0; x < ow; ++x) {
            cols(row, y * ow + x) = line[x * l.stride_w];
          }
        }
      }
    }
  }
  return cols;
}

template <typename Scalar>
void col2im_add(const Matrix<Scalar>& cols, const Layer& l, const Shape& out,
                Tensor<Scalar>& grad_in) {
  const int c_in = grad_in.shape()[0], h = grad_in.shape()[1], w = grad_in.shape()[2];
  const int oh = out[1], ow = out[2];
  Scalar* dst = grad_in.data().data();
  for (int c = 0; c < c_in; ++c) {
    for (int i = 0; i < l.kernel_h; ++i) {
      for (int j = 0; j < l.kernel_w; ++j) {
        const int row = (c * l.kernel_h + i) * l.kernel_w + j;
        for (int y = 0; y < oh; ++y) {
          Scalar* line = dst + (c * h + y * l.stride_h + i) * w + j;
          for (int x = 0; x < ow; ++x) {
            line[x * l.stride_w] += cols(row, y * ow + x);
          }
        }
      }
    }
  }
}

template <typename Scalar>
Eigen::Map<const RowMatrix<Scalar>> weight_matrix(const Tensor<Scalar>& w) {
  const Eigen::Index rows = w.shape()[0];
  return {w.data().data(), rows, w.size() / rows};
}

template <typename Scalar>
Tensor<Scalar> layer_forward(const Model<Scalar>& model, std::size_t index,
                             const Tensor<Scalar>& in) {
  const Layer& l = model.layers()[index];
  const Shape& out_shape = model.shape_at(index + 1);
  Tensor<Scalar> out(out_shape);
  switch (l.kind) {
    case LayerKind::kConv2d: {
      const auto w = weight_matrix(model.params().at(l.weight_name()));
      const auto& b = model.params().at(l.bias_name()).data();
      const Matrix<Scalar> cols = im2col(in, l, out_shape);
      Eigen::Map<RowMatrix<Scalar>> y(out.data().data(), l.out_channels,
                                      out.size() / l.out_channels);
      y.noalias() = w * cols;
      y.colwise() += b;
      break;
    }
    case LayerKind::kDense: {
      const auto w = weight_matrix(model.params().at(l.weight_name()));
      out.data().noalias() = w * in.data();
      out.data() += model.params().at(l.bias_name()).data();
      break;
    }
    case LayerKind::kRelu:
      out.data() = in.data().cwiseMax(Scalar(0));
      break;
    case LayerKind::kGlobalAvgPool: {
      const Eigen::Index rows = out.size();
      Eigen::Map<const RowMatrix<Scalar>> x(in.data().data(), rows, in.size() / rows);
      out.data() = x.rowwise().mean();
      break;
    }
    case LayerKind::kL2Normalize: {
      const Scalar norm = in.data().norm();
      out.data() = in.data() / std::max(norm, std::numeric_limits<Scalar>::min());
      break;
    }
    case LayerKind::kSoftmax: {
      const Scalar mx = in.data().maxCoeff();
      out.data() = (in.data().array() - mx).exp().matrix();
      out.data() /= out.data().sum();
      break;
    }
  }
  return out;
}

}  // namespace detail

/// Runs the first n_layers layers (all by default) and records every intermediate value.
template <typename Scalar>
Trace<Scalar> forward(const Model<Scalar>& model, Tensor<Scalar> input,
                      std::size_t n_layers = std::numeric_limits<std::size_t>::max()) {
  if (input.shape() != model.input_shape()) {
    throw ShapeError("model '" + model.tag() + "' expects input " +
                     to_string(model.input_shape()) + ", got " + to_string(input.shape()));
  }
  n_layers = std::min(n_layers, model.layers().size());
  Trace<Scalar> trace;
  trace.values.reserve(n_layers + 1);
  trace.values.push_back(std::move(input));
  for (std::size_t i = 0; i < n_layers; ++i) {
    trace.values.push_back(detail::layer_forward(model, i, trace.values.back()));
  }
  return trace;
}

/// Forward pass stopping before a trailing softmax, for training on logits.
template <typename Scalar>
Trace<Scalar> forward_logits(const Model<Scalar>& model, Tensor<Scalar> input) {
  const std::size_t n = model.layers().size() - (model.ends_with_softmax() ? 1 : 0);
  return forward(model, std::move(input), n);
}

template <typename Scalar>
Tensor<Scalar> infer(const Model<Scalar>& model, Tensor<Scalar> input) {
  if (model.layers().empty()) throw ModelError("model '" + model.tag() + "' has no layers");
  Tensor<Scalar> x = std::move(input);
  if (x.shape() != model.input_shape()) {
    throw ShapeError("model '" + model.tag() + "' expects input " +
                     to_string(model.input_shape()) + ", got " + to_string(x.shape()));
  }
  for (std::size_t i = 0; i < model.layers().size(); ++i) {
    x = detail::layer_forward(model, i, x);
  }
  return x;
}

/// Reverse-mode pass over a recorded trace. Frozen parameters get no entry.
template <typename Scalar>
BackwardResult<Scalar> backward(const Model<Scalar>& model, const Trace<Scalar>& trace,
                                const Tensor<Scalar>& loss_grad) {
  using namespace detail;
  if (trace.empty()) throw StateError("backward called before forward");
  if (trace.layers_run() > model.layers().size()) {
    throw StateError("trace does not belong to this model");
  }
  if (loss_grad.shape() != trace.output().shape()) {
    throw ShapeError("loss gradient shape " + to_string(loss_grad.shape()) +
                     " does not match output " + to_string(trace.output().shape()));
  }
  BackwardResult<Scalar> result;
  Tensor<Scalar> grad = loss_grad;
  for (std::size_t idx = trace.layers_run(); idx-- > 0;) {
    const Layer& l = model.layers()[idx];
    const Tensor<Scalar>& in = trace.values[idx];
    const Tensor<Scalar>& out = trace.values[idx + 1];
    Tensor<Scalar> grad_in(in.shape());
    switch (l.kind) {
      case LayerKind::kConv2d: {
        const auto w = weight_matrix(model.params().at(l.weight_name()));
        const Matrix<Scalar> cols = im2col(in, l, out.shape());
        Eigen::Map<const RowMatrix<Scalar>> dy(grad.data().data(), l.out_channels,
                                               grad.size() / l.out_channels);
        if (model.is_trainable(l.weight_name())) {
          Tensor<Scalar> dw({l.out_channels, l.in_channels, l.kernel_h, l.kernel_w});
          Eigen::Map<RowMatrix<Scalar>>(dw.data().data(), l.out_channels, cols.rows())
              .noalias() = dy * cols.transpose();
          result.params.emplace(l.weight_name(), std::move(dw));
        }
        if (model.is_trainable(l.bias_name())) {
          result.params.emplace(l.bias_name(),
                                Tensor<Scalar>({l.out_channels}, dy.rowwise().sum()));
        }
        const Matrix<Scalar> dcols = w.transpose() * dy;
        col2im_add(dcols, l, out.shape(), grad_in);
        break;
      }
      case LayerKind::kDense: {
        const auto w = weight_matrix(model.params().at(l.weight_name()));
        if (model.is_trainable(l.weight_name())) {
          Tensor<Scalar> dw({l.out_channels, l.in_channels});
          Eigen::Map<RowMatrix<Scalar>>(dw.data().data(), l.out_channels, l.in_channels)
              .noalias() = grad.data() * in.data().transpose();
          result.params.emplace(l.weight_name(), std::move(dw));
        }
        if (model.is_trainable(l.bias_name())) {
          result.params.emplace(l.bias_name(), Tensor<Scalar>({l.out_channels}, grad.data()));
        }
        grad_in.data().noalias() = w.transpose() * grad.data();
        break;
      }
      case LayerKind::kRelu:
        grad_in.data() =
            (in.data().array() > Scalar(0)).select(grad.data().array(), Scalar(0)).matrix();
        break;
      case LayerKind::kGlobalAvgPool: {
        const Eigen::Index rows = out.size();
        const Eigen::Index cols_n = in.size() / rows;
        Eigen::Map<RowMatrix<Scalar>> dx(grad_in.data().data(), rows, cols_n);
        dx = (grad.data() / static_cast<Scalar>(cols_n)).replicate(1, cols_n);
        break;
      }
      case LayerKind::kL2Normalize: {
        const Scalar norm = std::max(in.data().norm(), std::numeric_limits<Scalar>::min());
        const Vector<Scalar>& y = out.data();
        grad_in.data() = (grad.data() - y * y.dot(grad.data())) / norm;
        break;
      }
      case LayerKind::kSoftmax: {
        const Vector<Scalar>& y = out.data();
        grad_in.data() = y.cwiseProduct(grad.data() -
                                        Vector<Scalar>::Constant(y.size(), y.dot(grad.data())));
        break;
      }
    }
    grad = std::move(grad_in);
  }
  result.input_grad = std::move(grad);
  return result;
}

template <typename Scalar>
void accumulate(Gradients<Scalar>& into, const Gradients<Scalar>& g, Scalar scale = Scalar(1)) {
  for (const auto& [name, t] : g) {
    auto it = into.find(name);
    if (it == into.end()) {
      Tensor<Scalar> scaled(t.shape(), t.data() * scale);
      into.emplace(name, std::move(scaled));
    } else {
      it->second.data() += scale * t.data();
    }
  }
}

}  // namespace voxdesk::nnet
