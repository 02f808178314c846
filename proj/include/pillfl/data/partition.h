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

#ifndef PILLFL_DATA_PARTITION_H_
#define PILLFL_DATA_PARTITION_H_

#include <cstddef>
#include <cstdint>
#include <vector>

#include "pillfl/data/dataset.h"

namespace pillfl {

// Client shards and the optional server root set, as index lists into one
// LabeledDataset. Shards are pairwise disjoint and never touch the root set.
struct Partition {
  std::vector<std::vector<std::size_t>> shards;
  std::vector<std::size_t> root_indices;

  // Indices in [0, n) that are not in the root set, ascending.
  std::vector<std::size_t> non_root(std::size_t n) const;
};

// Draws `n_root` indices uniformly without replacement. The returned
// partition has no shards; pass it as `base` to a client partitioner.
Partition split_root(const LabeledDataset& ds, std::size_t n_root,
                     std::uint64_t seed);

// Root set biased towards `home_class`: each draw picks the home class with
// probability p and any other class with probability (1 - p) / (C - 1).
Partition split_root_biased(const LabeledDataset& ds, std::size_t n_root,
                            double p, int home_class, std::uint64_t seed);

// Uniform split of the non-root indices into `clients` shards whose sizes
// differ by at most one. Leftover samples go round-robin to the first shards.
Partition partition_iid(const LabeledDataset& ds, int clients,
                        std::uint64_t seed, const Partition& base = {});

// Label-skewed split with non-IID degree p in [1/C, 1]. Clients are divided
// into C contiguous groups; a sample of class c goes to group c with
// probability p, to each other group with probability (1 - p) / (C - 1), and
// then to a uniformly chosen client of that group.
Partition partition_noniid(const LabeledDataset& ds, int clients, double p,
                           std::uint64_t seed, const Partition& base = {});

// Group of a client under partition_noniid.
int noniid_group(int client, int clients, int classes);

}  // namespace pillfl

#endif  // PILLFL_DATA_PARTITION_H_
