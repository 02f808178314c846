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

#ifndef PILLFL_NN_PARAM_VECTOR_H_
#define PILLFL_NN_PARAM_VECTOR_H_

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace pillfl {

// Addressing scheme for a flat parameter array of a dense network with layer
// widths dims = [n_0, n_1, ..., n_L]. Linear layer l (0-based, l < L) maps
// n_l inputs to n_{l+1} outputs. Layers are stored in order; within a layer
// the (n_{l+1} x n_l) weight matrix comes first in row-major order, followed
// by its n_{l+1} biases.
//
// Example, dims [2, 3, 2]: layer 0 weights occupy [0, 6), biases [6, 9);
// layer 1 weights [9, 15), biases [15, 17). weight_index(1, 0, 1) == 10.
//
// A flat layout (no dims) describes an unstructured vector of a given size;
// it supports arithmetic but not per-layer addressing.
class ParamLayout {
 public:
  ParamLayout() = default;
  explicit ParamLayout(std::vector<int> dims);
  static ParamLayout flat(std::size_t size);

  const std::vector<int>& dims() const { return dims_; }
  bool is_flat() const { return dims_.empty(); }
  int num_layers() const {
    return dims_.empty() ? 0 : static_cast<int>(dims_.size()) - 1;
  }
  int fan_in(int layer) const { return dims_[layer]; }
  int fan_out(int layer) const { return dims_[layer + 1]; }
  std::size_t size() const { return size_; }

  std::size_t layer_offset(int layer) const;
  std::size_t weight_index(int layer, int row, int col) const;
  std::size_t bias_index(int layer, int row) const;

  bool operator==(const ParamLayout& other) const {
    return size_ == other.size_ && dims_ == other.dims_;
  }

 private:
  void check_layer(int layer) const;

  std::vector<int> dims_;
  std::vector<std::size_t> offsets_;
  std::size_t size_ = 0;
};

// Flat model parameters or model update, tagged with its layout. Elementwise
// arithmetic requires identical layouts and throws ShapeError otherwise.
class ParamVector {
 public:
  ParamVector() = default;
  explicit ParamVector(ParamLayout layout);  // zero-filled
  ParamVector(ParamLayout layout, Eigen::VectorXd values);

  // Flat-layout vector, mostly for tests and 1-D examples.
  static ParamVector from(std::vector<double> values);

  const ParamLayout& layout() const { return layout_; }
  std::size_t size() const { return static_cast<std::size_t>(values_.size()); }
  const Eigen::VectorXd& values() const { return values_; }
  Eigen::VectorXd& values() { return values_; }

  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }

  ParamVector& operator+=(const ParamVector& other);
  ParamVector& operator-=(const ParamVector& other);
  ParamVector& operator*=(double s);

  // Hadamard product, written (.) in mask algebra.
  ParamVector masked(const ParamVector& mask) const;

  double dot(const ParamVector& other) const;
  double norm() const { return values_.norm(); }
  bool same_shape(const ParamVector& other) const {
    return layout_ == other.layout_;
  }

  bool operator==(const ParamVector& other) const {
    return same_shape(other) && values_ == other.values_;
  }

 private:
  ParamLayout layout_;
  Eigen::VectorXd values_;
};

ParamVector operator+(ParamVector a, const ParamVector& b);
ParamVector operator-(ParamVector a, const ParamVector& b);
ParamVector operator*(double s, ParamVector a);

void require_same_shape(const ParamVector& a, const ParamVector& b);

// Cosine similarity; 0 when either operand is the zero vector.
double cosine_similarity(const ParamVector& a, const ParamVector& b);
double euclidean_distance(const ParamVector& a, const ParamVector& b);

// 1 - mask, for binary masks.
ParamVector complement(const ParamVector& mask);

// Number of nonzero entries.
std::size_t count_nonzero(const ParamVector& v);

}  // namespace pillfl

#endif  // PILLFL_NN_PARAM_VECTOR_H_
