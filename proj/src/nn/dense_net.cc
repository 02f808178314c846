// Copyright 2026 The pillfl Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "pillfl/nn/dense_net.h"

#include <cmath>
#include <string>
#include <utility>

#include "pillfl/common/errors.h"
#include "pillfl/common/rng.h"

namespace pillfl {

DenseNet::DenseNet(std::vector<int> dims) : layout_(std::move(dims)) {
  const int layers = layout_.num_layers();
  weights.reserve(layers);
  biases.reserve(layers);
  for (int l = 0; l < layers; ++l) {
    weights.push_back(
        Eigen::MatrixXd::Zero(layout_.fan_out(l), layout_.fan_in(l)));
    biases.push_back(Eigen::VectorXd::Zero(layout_.fan_out(l)));
  }
}

DenseNet DenseNet::glorot_uniform(std::vector<int> dims, std::uint64_t seed) {
  DenseNet net(std::move(dims));
  Rng rng(seed);
  for (int l = 0; l < net.num_layers(); ++l) {
    const double limit =
        std::sqrt(6.0 / (net.layout_.fan_in(l) + net.layout_.fan_out(l)));
    auto& w = net.weights[l];
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) {
        w(r, c) = (2.0 * uniform01(rng) - 1.0) * limit;
      }
    }
  }
  return net;
}

ParamVector DenseNet::flatten() const {
  Eigen::VectorXd values(static_cast<Eigen::Index>(layout_.size()));
  Eigen::Index pos = 0;
  for (int l = 0; l < num_layers(); ++l) {
    const auto& w = weights[l];
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) values[pos++] = w(r, c);
    }
    values.segment(pos, biases[l].size()) = biases[l];
    pos += biases[l].size();
  }
  return ParamVector(layout_, std::move(values));
}

DenseNet DenseNet::unflatten(const ParamVector& params) {
  if (params.layout().is_flat()) {
    throw ShapeError("cannot unflatten a vector without layer dims");
  }
  DenseNet net(params.layout().dims());
  const auto& v = params.values();
  Eigen::Index pos = 0;
  for (int l = 0; l < net.num_layers(); ++l) {
    auto& w = net.weights[l];
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = v[pos++];
    }
    net.biases[l] = v.segment(pos, net.biases[l].size());
    pos += net.biases[l].size();
  }
  return net;
}

namespace {

void check_input(const DenseNet& net, const Matrix& x) {
  if (net.num_layers() == 0) throw ShapeError("network has no layers");
  if (x.cols() != net.input_dim()) {
    throw ShapeError("input width " + std::to_string(x.cols()) +
                     " does not match network input " +
                     std::to_string(net.input_dim()));
  }
}

void check_labels(const DenseNet& net, const Matrix& x,
                  std::span<const int> labels) {
  check_input(net, x);
  if (x.rows() == 0) throw EmptyInputError("empty batch");
  if (static_cast<Eigen::Index>(labels.size()) != x.rows()) {
    throw ShapeError("label count does not match sample count");
  }
  for (int y : labels) {
    if (y < 0 || y >= net.num_outputs()) {
      throw InvalidArgumentError("label " + std::to_string(y) +
                                 " outside [0, " +
                                 std::to_string(net.num_outputs()) + ")");
    }
  }
}

// Pre-activations per layer; activations[0] is the input batch.
struct ForwardTrace {
  std::vector<Matrix> activations;
  std::vector<Matrix> preactivations;
};

ForwardTrace trace_forward(const DenseNet& net, const Matrix& x) {
  ForwardTrace trace;
  const int layers = net.num_layers();
  trace.activations.reserve(layers);
  trace.preactivations.reserve(layers);
  trace.activations.push_back(x);
  for (int l = 0; l < layers; ++l) {
    Matrix z = trace.activations.back() * net.weights[l].transpose();
    z.rowwise() += net.biases[l].transpose();
    if (l + 1 < layers) trace.activations.push_back(z.cwiseMax(0.0));
    trace.preactivations.push_back(std::move(z));
  }
  return trace;
}

// Row-wise softmax, shifted by the row max.
Matrix softmax(const Matrix& logits) {
  Matrix p = logits;
  for (Eigen::Index r = 0; r < p.rows(); ++r) {
    const double mx = p.row(r).maxCoeff();
    p.row(r) = (p.row(r).array() - mx).exp();
    p.row(r) /= p.row(r).sum();
  }
  return p;
}

struct LayerGrads {
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;
};

LayerGrads backprop(const DenseNet& net, const Matrix& x,
                    std::span<const int> labels) {
  const ForwardTrace trace = trace_forward(net, x);
  const int layers = net.num_layers();
  const double inv_n = 1.0 / static_cast<double>(x.rows());

  Matrix delta = softmax(trace.preactivations.back());
  for (Eigen::Index r = 0; r < delta.rows(); ++r) delta(r, labels[r]) -= 1.0;
  delta *= inv_n;

  LayerGrads g;
  g.weights.resize(layers);
  g.biases.resize(layers);
  for (int l = layers - 1; l >= 0; --l) {
    g.weights[l] = delta.transpose() * trace.activations[l];
    g.biases[l] = delta.colwise().sum().transpose();
    if (l > 0) {
      Matrix upstream = delta * net.weights[l];
      delta = (trace.preactivations[l - 1].array() > 0.0)
                  .select(upstream, 0.0);
    }
  }
  return g;
}

}  // namespace

Matrix DenseNet::forward(const Matrix& batch) const {
  check_input(*this, batch);
  Matrix a = batch;
  for (int l = 0; l < num_layers(); ++l) {
    Matrix z = a * weights[l].transpose();
    z.rowwise() += biases[l].transpose();
    if (l + 1 < num_layers()) {
      a = z.cwiseMax(0.0);
    } else {
      a = std::move(z);
    }
  }
  return a;
}

double mean_cross_entropy(const DenseNet& net, const Matrix& x,
                          std::span<const int> labels) {
  check_labels(net, x, labels);
  const Matrix logits = net.forward(x);
  double total = 0.0;
  for (Eigen::Index r = 0; r < logits.rows(); ++r) {
    const double mx = logits.row(r).maxCoeff();
    const double lse =
        mx + std::log((logits.row(r).array() - mx).exp().sum());
    total += lse - logits(r, labels[r]);
  }
  return total / static_cast<double>(logits.rows());
}

ParamVector grad(const DenseNet& net, const Matrix& x,
                 std::span<const int> labels) {
  check_labels(net, x, labels);
  LayerGrads g = backprop(net, x, labels);
  DenseNet as_net(net.dims());
  as_net.weights = std::move(g.weights);
  as_net.biases = std::move(g.biases);
  return as_net.flatten();
}

TrainResult sgd_train(const DenseNet& net, const Matrix& x,
                      std::span<const int> labels, const TrainOptions& options,
                      std::uint64_t seed) {
  if (x.rows() == 0) throw EmptyInputError("empty training data");
  check_labels(net, x, labels);
  if (options.epochs < 1) throw InvalidArgumentError("epochs must be >= 1");
  if (!(options.lr >= 0.0)) throw InvalidArgumentError("lr must be >= 0");

  const auto n = static_cast<Eigen::Index>(x.rows());
  const bool full_batch = options.batch_size <= 0 || options.batch_size >= n;
  const Eigen::Index batch = full_batch ? n : options.batch_size;

  DenseNet trained = net;
  Rng rng(seed);
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) order[i] = i;

  Matrix bx;
  std::vector<int> by;
  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    if (full_batch) {
      LayerGrads g = backprop(trained, x, labels);
      for (int l = 0; l < trained.num_layers(); ++l) {
        trained.weights[l] -= options.lr * g.weights[l];
        trained.biases[l] -= options.lr * g.biases[l];
      }
      continue;
    }
    for (Eigen::Index i = n - 1; i > 0; --i) {
      const auto j = static_cast<Eigen::Index>(rng() % static_cast<std::uint64_t>(i + 1));
      std::swap(order[i], order[j]);
    }
    for (Eigen::Index start = 0; start < n; start += batch) {
      const Eigen::Index size = std::min(batch, n - start);
      bx.resize(size, x.cols());
      by.resize(static_cast<std::size_t>(size));
      for (Eigen::Index r = 0; r < size; ++r) {
        bx.row(r) = x.row(order[start + r]);
        by[r] = labels[order[start + r]];
      }
      LayerGrads g = backprop(trained, bx, by);
      for (int l = 0; l < trained.num_layers(); ++l) {
        trained.weights[l] -= options.lr * g.weights[l];
        trained.biases[l] -= options.lr * g.biases[l];
      }
    }
  }
  ParamVector update = net.flatten() - trained.flatten();
  return TrainResult{std::move(trained), std::move(update)};
}

std::vector<int> predict(const DenseNet& net, const Matrix& x) {
  const Matrix logits = net.forward(x);
  std::vector<int> out(static_cast<std::size_t>(logits.rows()));
  for (Eigen::Index r = 0; r < logits.rows(); ++r) {
    Eigen::Index arg = 0;
    logits.row(r).maxCoeff(&arg);
    out[r] = static_cast<int>(arg);
  }
  return out;
}

}  // namespace pillfl
