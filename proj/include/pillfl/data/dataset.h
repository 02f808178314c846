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

#ifndef PILLFL_DATA_DATASET_H_
#define PILLFL_DATA_DATASET_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pillfl/nn/dense_net.h"

namespace pillfl {

struct LabeledDataset {
  Matrix features;  // n x d
  std::vector<int> labels;
  int num_classes = 0;

  std::size_t size() const { return labels.size(); }
  int dim() const { return static_cast<int>(features.cols()); }
  bool empty() const { return labels.empty(); }

  // Rows at `indices`, in that order.
  LabeledDataset subset(std::span<const std::size_t> indices) const;

  // Per-class sample counts, length num_classes.
  std::vector<std::size_t> class_counts() const;

  // Throws InvalidArgumentError when labels and features disagree or a label
  // is outside [0, num_classes).
  void validate() const;
};

// Reads an IDX image file (magic 0x00000803) and label file (0x00000801).
// Pixels are scaled by 1/255 and flattened row-major. num_classes is
// max(label) + 1.
LabeledDataset load_idx(const std::string& images_path,
                        const std::string& labels_path);

struct BlobsOptions {
  int classes = 3;
  int n_per_class = 1000;
  int dim = 8;
  double spread = 1.0;
  std::uint64_t seed = 0;
};

// Class c is an isotropic Gaussian with std `spread` around a center drawn
// uniformly from [-1, 1]^dim. Centers depend only on `seed`; samples also
// depend on `stream`, so a train/test pair shares one set of centers.
// Samples are interleaved by class (0, 1, ..., C-1, 0, 1, ...).
LabeledDataset synth_blobs(const BlobsOptions& options,
                           std::uint64_t stream = 0);

}  // namespace pillfl

#endif  // PILLFL_DATA_DATASET_H_
