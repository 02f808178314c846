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

#include "pillfl/data/dataset.h"

#include <algorithm>
#include <array>
#include <fstream>
#include <iterator>
#include <random>

#include "pillfl/common/errors.h"
#include "pillfl/common/rng.h"

namespace pillfl {

namespace {

constexpr std::uint32_t kImagesMagic = 0x00000803;
constexpr std::uint32_t kLabelsMagic = 0x00000801;

std::vector<unsigned char> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  return std::vector<unsigned char>(std::istreambuf_iterator<char>(in), {});
}

std::uint32_t read_be32(const std::vector<unsigned char>& bytes,
                        std::size_t offset, const std::string& path) {
  if (offset + 4 > bytes.size()) throw FormatError(path + ": truncated header");
  return (std::uint32_t{bytes[offset]} << 24) |
         (std::uint32_t{bytes[offset + 1]} << 16) |
         (std::uint32_t{bytes[offset + 2]} << 8) |
         std::uint32_t{bytes[offset + 3]};
}

}  // namespace

LabeledDataset LabeledDataset::subset(
    std::span<const std::size_t> indices) const {
  LabeledDataset out;
  out.num_classes = num_classes;
  out.features.resize(static_cast<Eigen::Index>(indices.size()),
                      features.cols());
  out.labels.reserve(indices.size());
  for (std::size_t r = 0; r < indices.size(); ++r) {
    if (indices[r] >= size()) throw InvalidArgumentError("index out of range");
    out.features.row(static_cast<Eigen::Index>(r)) =
        features.row(static_cast<Eigen::Index>(indices[r]));
    out.labels.push_back(labels[indices[r]]);
  }
  return out;
}

std::vector<std::size_t> LabeledDataset::class_counts() const {
  std::vector<std::size_t> counts(static_cast<std::size_t>(num_classes), 0);
  for (int y : labels) ++counts[static_cast<std::size_t>(y)];
  return counts;
}

void LabeledDataset::validate() const {
  if (static_cast<Eigen::Index>(labels.size()) != features.rows()) {
    throw InvalidArgumentError("label count does not match sample count");
  }
  for (int y : labels) {
    if (y < 0 || y >= num_classes) {
      throw InvalidArgumentError("label outside [0, num_classes)");
    }
  }
}

LabeledDataset load_idx(const std::string& images_path,
                        const std::string& labels_path) {
  const auto images = read_file(images_path);
  const auto labels = read_file(labels_path);

  if (read_be32(images, 0, images_path) != kImagesMagic) {
    throw FormatError(images_path + ": bad magic for an IDX image file");
  }
  if (read_be32(labels, 0, labels_path) != kLabelsMagic) {
    throw FormatError(labels_path + ": bad magic for an IDX label file");
  }
  const std::size_t n = read_be32(images, 4, images_path);
  const std::size_t rows = read_be32(images, 8, images_path);
  const std::size_t cols = read_be32(images, 12, images_path);
  const std::size_t n_labels = read_be32(labels, 4, labels_path);
  if (n != n_labels) {
    throw FormatError("image count " + std::to_string(n) +
                      " does not match label count " +
                      std::to_string(n_labels));
  }
  const std::size_t d = rows * cols;
  if (images.size() < 16 + n * d) throw FormatError(images_path + ": truncated");
  if (labels.size() < 8 + n) throw FormatError(labels_path + ": truncated");

  LabeledDataset ds;
  ds.features.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  ds.labels.resize(n);
  int max_label = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      ds.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          images[16 + i * d + j] / 255.0;
    }
    ds.labels[i] = labels[8 + i];
    max_label = std::max(max_label, ds.labels[i]);
  }
  ds.num_classes = max_label + 1;
  return ds;
}

LabeledDataset synth_blobs(const BlobsOptions& options, std::uint64_t stream) {
  if (options.classes < 2) throw InvalidArgumentError("blobs need >= 2 classes");
  if (options.n_per_class < 1 || options.dim < 1) {
    throw InvalidArgumentError("blobs need positive sizes");
  }
  if (options.spread < 0.0) throw InvalidArgumentError("spread must be >= 0");

  const int c_count = options.classes;
  const int d = options.dim;
  Rng center_rng(derive_seed(options.seed, {tag_hash("centers")}));
  Eigen::MatrixXd centers(c_count, d);
  for (int c = 0; c < c_count; ++c) {
    for (int j = 0; j < d; ++j) centers(c, j) = 2.0 * uniform01(center_rng) - 1.0;
  }

  Rng rng(derive_seed(options.seed, {tag_hash("samples"), stream}));
  std::normal_distribution<double> normal(0.0, 1.0);
  LabeledDataset ds;
  ds.num_classes = c_count;
  const auto n = static_cast<Eigen::Index>(c_count) * options.n_per_class;
  ds.features.resize(n, d);
  ds.labels.resize(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    const int c = static_cast<int>(i % c_count);
    for (int j = 0; j < d; ++j) {
      ds.features(i, j) = centers(c, j) + options.spread * normal(rng);
    }
    ds.labels[static_cast<std::size_t>(i)] = c;
  }
  return ds;
}

}  // namespace pillfl
