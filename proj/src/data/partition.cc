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

#include "pillfl/data/partition.h"

#include <algorithm>
#include <numeric>

#include "pillfl/common/errors.h"
#include "pillfl/common/rng.h"

namespace pillfl {

namespace {

void shuffle_indices(std::vector<std::size_t>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const std::size_t j = rng() % i;
    std::swap(v[i - 1], v[j]);
  }
}

std::size_t uniform_below(Rng& rng, std::size_t n) { return rng() % n; }

}  // namespace

std::vector<std::size_t> Partition::non_root(std::size_t n) const {
  std::vector<bool> in_root(n, false);
  for (std::size_t i : root_indices) in_root[i] = true;
  std::vector<std::size_t> out;
  out.reserve(n - root_indices.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (!in_root[i]) out.push_back(i);
  }
  return out;
}

Partition split_root(const LabeledDataset& ds, std::size_t n_root,
                     std::uint64_t seed) {
  if (n_root >= ds.size()) {
    throw InvalidArgumentError("root set must be smaller than the dataset");
  }
  std::vector<std::size_t> all(ds.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  Rng rng(seed);
  shuffle_indices(all, rng);
  Partition p;
  p.root_indices.assign(all.begin(), all.begin() + static_cast<long>(n_root));
  std::sort(p.root_indices.begin(), p.root_indices.end());
  return p;
}

Partition split_root_biased(const LabeledDataset& ds, std::size_t n_root,
                            double p, int home_class, std::uint64_t seed) {
  const int classes = ds.num_classes;
  if (n_root >= ds.size()) {
    throw InvalidArgumentError("root set must be smaller than the dataset");
  }
  if (classes < 2 || p < 0.0 || p > 1.0 || home_class < 0 ||
      home_class >= classes) {
    throw InvalidArgumentError("invalid biased root parameters");
  }
  std::vector<std::vector<std::size_t>> by_class(static_cast<std::size_t>(classes));
  for (std::size_t i = 0; i < ds.size(); ++i) by_class[ds.labels[i]].push_back(i);
  Rng rng(seed);
  for (auto& bucket : by_class) shuffle_indices(bucket, rng);

  Partition out;
  std::vector<std::size_t> cursor(static_cast<std::size_t>(classes), 0);
  while (out.root_indices.size() < n_root) {
    int c = home_class;
    if (uniform01(rng) >= p) {
      c = static_cast<int>(uniform_below(rng, static_cast<std::size_t>(classes - 1)));
      if (c >= home_class) ++c;
    }
    // Exhausted classes fall through to the next class with samples left.
    for (int k = 0; k < classes && cursor[c] >= by_class[c].size(); ++k) {
      c = (c + 1) % classes;
    }
    out.root_indices.push_back(by_class[c][cursor[c]++]);
  }
  std::sort(out.root_indices.begin(), out.root_indices.end());
  return out;
}

Partition partition_iid(const LabeledDataset& ds, int clients,
                        std::uint64_t seed, const Partition& base) {
  std::vector<std::size_t> pool = base.non_root(ds.size());
  if (clients < 1) throw InvalidArgumentError("need at least one client");
  if (static_cast<std::size_t>(clients) > pool.size()) {
    throw InvalidArgumentError("more clients than available samples");
  }
  Rng rng(seed);
  shuffle_indices(pool, rng);
  Partition out;
  out.root_indices = base.root_indices;
  out.shards.resize(static_cast<std::size_t>(clients));
  for (std::size_t i = 0; i < pool.size(); ++i) {
    out.shards[i % static_cast<std::size_t>(clients)].push_back(pool[i]);
  }
  return out;
}

int noniid_group(int client, int clients, int classes) {
  return static_cast<int>(static_cast<long>(client) * classes / clients);
}

Partition partition_noniid(const LabeledDataset& ds, int clients, double p,
                           std::uint64_t seed, const Partition& base) {
  const int classes = ds.num_classes;
  if (classes < 2) throw InvalidArgumentError("non-IID split needs >= 2 classes");
  constexpr double kSlack = 1e-12;
  if (p < 1.0 / classes - kSlack || p > 1.0 + kSlack) {
    throw InvalidArgumentError("non-IID degree p must lie in [1/C, 1]");
  }
  if (clients < classes) {
    throw InvalidArgumentError("non-IID split needs at least one client per class group");
  }
  std::vector<std::vector<int>> groups(static_cast<std::size_t>(classes));
  for (int k = 0; k < clients; ++k) {
    groups[noniid_group(k, clients, classes)].push_back(k);
  }

  Rng rng(seed);
  Partition out;
  out.root_indices = base.root_indices;
  out.shards.resize(static_cast<std::size_t>(clients));
  for (std::size_t i : base.non_root(ds.size())) {
    const int label = ds.labels[i];
    int group = label;
    if (uniform01(rng) >= p) {
      group = static_cast<int>(uniform_below(rng, static_cast<std::size_t>(classes - 1)));
      if (group >= label) ++group;
    }
    const auto& members = groups[group];
    const int client = members[uniform_below(rng, members.size())];
    out.shards[client].push_back(i);
  }
  return out;
}

}  // namespace pillfl
