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

#ifndef PILLFL_NN_DENSE_NET_H_
#define PILLFL_NN_DENSE_NET_H_

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "pillfl/nn/param_vector.h"

namespace pillfl {

// Row-major so that gathering samples into a batch copies contiguous rows.
using Matrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Fully-connected classifier with ReLU hidden layers and raw-logit outputs.
// weights[l] is n_{l+1} x n_l, biases[l] has n_{l+1} entries.
class DenseNet {
 public:
  DenseNet() = default;
  // Zero-initialized network.
  explicit DenseNet(std::vector<int> dims);

  // Per-layer uniform init in +-sqrt(6 / (fan_in + fan_out)).
  static DenseNet glorot_uniform(std::vector<int> dims, std::uint64_t seed);

  static DenseNet unflatten(const ParamVector& params);
  ParamVector flatten() const;

  const std::vector<int>& dims() const { return layout_.dims(); }
  const ParamLayout& layout() const { return layout_; }
  int num_layers() const { return layout_.num_layers(); }
  int input_dim() const { return dims().front(); }
  int num_outputs() const { return dims().back(); }

  // Logits for a batch of samples stored one per row.
  Matrix forward(const Matrix& batch) const;

  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;

 private:
  ParamLayout layout_;
};

// Mean softmax cross-entropy of the network over a labeled batch.
double mean_cross_entropy(const DenseNet& net, const Matrix& x,
                          std::span<const int> labels);

// Gradient of mean_cross_entropy with respect to the flattened parameters.
ParamVector grad(const DenseNet& net, const Matrix& x,
                 std::span<const int> labels);

struct TrainOptions {
  int epochs = 1;
  double lr = 0.05;
  // <= 0 or >= sample count means full-batch.
  int batch_size = 32;
};

struct TrainResult {
  DenseNet net;
  // old_params - new_params, so that applying g - update reproduces `net`.
  ParamVector update;
};

// Mini-batch SGD. Batches follow a per-epoch shuffle drawn from `seed`.
TrainResult sgd_train(const DenseNet& net, const Matrix& x,
                      std::span<const int> labels, const TrainOptions& options,
                      std::uint64_t seed);

// Index of the largest logit per row (lowest index on ties).
std::vector<int> predict(const DenseNet& net, const Matrix& x);

}  // namespace pillfl

#endif  // PILLFL_NN_DENSE_NET_H_
