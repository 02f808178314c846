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

#include "pillfl/sim/metrics.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pillfl/common/errors.h"
#include "pillfl/common/rng.h"
#include "pillfl/defenses/aggregation.h"

namespace pillfl {

std::vector<int> select_clients(int round, int clients, double q,
                                std::uint64_t seed) {
  std::vector<int> ids(static_cast<std::size_t>(clients));
  std::iota(ids.begin(), ids.end(), 0);
  if (q >= 1.0) return ids;
  const auto take = static_cast<std::size_t>(
      std::min<double>(clients, std::ceil(q * clients - 1e-9)));
  Rng rng(derive_seed(seed, {tag_hash("select"), static_cast<std::uint64_t>(round)}));
  for (std::size_t i = 0; i < take; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng() % (ids.size() - i));
    std::swap(ids[i], ids[j]);
  }
  ids.resize(take);
  std::sort(ids.begin(), ids.end());
  return ids;
}

double error_rate(const DenseNet& net, const LabeledDataset& test) {
  if (test.empty()) throw EmptyInputError("error rate on an empty test set");
  const std::vector<int> pred = predict(net, test.features);
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) wrong += pred[i] != test.labels[i];
  return static_cast<double>(wrong) / static_cast<double>(pred.size());
}

StealthScores stealth_metrics(std::span<const ParamVector> updates,
                              const ParamVector* server_update, int m_assumed) {
  StealthScores out;
  const int n = static_cast<int>(updates.size());
  if (n == 0) return out;
  if (n == 1) {
    out.distance.assign(1, 0.0);
  } else {
    const int neighbors = std::clamp(krum_neighbors(n, m_assumed), 1, n - 1);
    out.distance = krum_scores(updates, neighbors);
  }
  if (server_update != nullptr) {
    std::vector<double> cos;
    cos.reserve(updates.size());
    for (const auto& u : updates) cos.push_back(cosine_similarity(u, *server_update));
    out.cosine = std::move(cos);
  }
  return out;
}

}  // namespace pillfl
