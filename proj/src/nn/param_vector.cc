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

#include "pillfl/nn/param_vector.h"

#include <string>
#include <utility>

#include "pillfl/common/errors.h"

namespace pillfl {

ParamLayout::ParamLayout(std::vector<int> dims) : dims_(std::move(dims)) {
  if (dims_.size() < 2) {
    throw ShapeError("layer dims need at least an input and an output width");
  }
  for (int d : dims_) {
    if (d <= 0) throw ShapeError("layer widths must be positive");
  }
  offsets_.reserve(dims_.size());
  std::size_t offset = 0;
  for (std::size_t l = 0; l + 1 < dims_.size(); ++l) {
    offsets_.push_back(offset);
    const auto in = static_cast<std::size_t>(dims_[l]);
    const auto out = static_cast<std::size_t>(dims_[l + 1]);
    offset += out * in + out;
  }
  offsets_.push_back(offset);
  size_ = offset;
}

ParamLayout ParamLayout::flat(std::size_t size) {
  ParamLayout layout;
  layout.size_ = size;
  return layout;
}

void ParamLayout::check_layer(int layer) const {
  if (layer < 0 || layer >= num_layers()) {
    throw ShapeError("layer index " + std::to_string(layer) +
                     " out of range for layout with " +
                     std::to_string(num_layers()) + " layers");
  }
}

std::size_t ParamLayout::layer_offset(int layer) const {
  check_layer(layer);
  return offsets_[layer];
}

std::size_t ParamLayout::weight_index(int layer, int row, int col) const {
  check_layer(layer);
  if (row < 0 || row >= fan_out(layer) || col < 0 || col >= fan_in(layer)) {
    throw ShapeError("weight coordinate out of range");
  }
  return offsets_[layer] + static_cast<std::size_t>(row) * fan_in(layer) + col;
}

std::size_t ParamLayout::bias_index(int layer, int row) const {
  check_layer(layer);
  if (row < 0 || row >= fan_out(layer)) {
    throw ShapeError("bias coordinate out of range");
  }
  return offsets_[layer] +
         static_cast<std::size_t>(fan_out(layer)) * fan_in(layer) + row;
}

ParamVector::ParamVector(ParamLayout layout)
    : layout_(std::move(layout)),
      values_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(layout_.size()))) {}

ParamVector::ParamVector(ParamLayout layout, Eigen::VectorXd values)
    : layout_(std::move(layout)), values_(std::move(values)) {
  if (static_cast<std::size_t>(values_.size()) != layout_.size()) {
    throw ShapeError("value count " + std::to_string(values_.size()) +
                     " does not match layout size " +
                     std::to_string(layout_.size()));
  }
}

ParamVector ParamVector::from(std::vector<double> values) {
  Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(
      values.data(), static_cast<Eigen::Index>(values.size()));
  return ParamVector(ParamLayout::flat(values.size()), std::move(v));
}

void require_same_shape(const ParamVector& a, const ParamVector& b) {
  if (!a.same_shape(b)) {
    throw ShapeError("parameter vectors have different shapes (" +
                     std::to_string(a.size()) + " vs " +
                     std::to_string(b.size()) + ")");
  }
}

ParamVector& ParamVector::operator+=(const ParamVector& other) {
  require_same_shape(*this, other);
  values_ += other.values_;
  return *this;
}

ParamVector& ParamVector::operator-=(const ParamVector& other) {
  require_same_shape(*this, other);
  values_ -= other.values_;
  return *this;
}

ParamVector& ParamVector::operator*=(double s) {
  values_ *= s;
  return *this;
}

ParamVector ParamVector::masked(const ParamVector& mask) const {
  require_same_shape(*this, mask);
  return ParamVector(layout_, values_.cwiseProduct(mask.values_));
}

double ParamVector::dot(const ParamVector& other) const {
  require_same_shape(*this, other);
  return values_.dot(other.values_);
}

ParamVector operator+(ParamVector a, const ParamVector& b) { return a += b; }
ParamVector operator-(ParamVector a, const ParamVector& b) { return a -= b; }
ParamVector operator*(double s, ParamVector a) { return a *= s; }

double cosine_similarity(const ParamVector& a, const ParamVector& b) {
  const double na = a.norm();
  const double nb = b.norm();
  if (na == 0.0 || nb == 0.0) return 0.0;
  return a.dot(b) / (na * nb);
}

double euclidean_distance(const ParamVector& a, const ParamVector& b) {
  require_same_shape(a, b);
  return (a.values() - b.values()).norm();
}

ParamVector complement(const ParamVector& mask) {
  return ParamVector(mask.layout(), 1.0 - mask.values().array());
}

std::size_t count_nonzero(const ParamVector& v) {
  return static_cast<std::size_t>((v.values().array() != 0.0).count());
}

}  // namespace pillfl
