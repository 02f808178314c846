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

#include "pillfl/defenses/aggregation.h"

#include <algorithm>
#include <numeric>
#include <string>

#include "pillfl/common/errors.h"

namespace pillfl {

namespace {

void require_nonempty(std::span<const ParamVector> updates) {
  if (updates.empty()) throw EmptyInputError("no updates to aggregate");
  for (const auto& u : updates) require_same_shape(updates.front(), u);
}

std::vector<double> distances_to(std::span<const ParamVector> updates,
                                 const ParamVector& center) {
  std::vector<double> d;
  d.reserve(updates.size());
  for (const auto& u : updates) d.push_back(euclidean_distance(u, center));
  return d;
}

// Squared distances between every pair, row-major n x n.
std::vector<double> pairwise_sq(std::span<const ParamVector> updates) {
  const std::size_t n = updates.size();
  std::vector<double> d(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v =
          (updates[i].values() - updates[j].values()).squaredNorm();
      d[i * n + j] = v;
      d[j * n + i] = v;
    }
  }
  return d;
}

std::vector<double> scores_from_pairwise(const std::vector<double>& sq,
                                         std::span<const std::size_t> alive,
                                         std::size_t n, int neighbors) {
  std::vector<double> scores;
  scores.reserve(alive.size());
  std::vector<double> row;
  for (std::size_t i : alive) {
    row.clear();
    for (std::size_t j : alive) {
      if (j != i) row.push_back(sq[i * n + j]);
    }
    const auto k = std::min<std::size_t>(static_cast<std::size_t>(neighbors),
                                         row.size());
    std::partial_sort(row.begin(), row.begin() + static_cast<long>(k), row.end());
    scores.push_back(std::accumulate(row.begin(), row.begin() + static_cast<long>(k), 0.0));
  }
  return scores;
}

std::size_t argmin_first(const std::vector<double>& v) {
  return static_cast<std::size_t>(std::min_element(v.begin(), v.end()) - v.begin());
}

// Winners of `rounds` iterated Krum selections, in selection order.
std::vector<std::size_t> iterated_krum(std::span<const ParamVector> updates,
                                       int m, int rounds, bool clamp) {
  const std::size_t n = updates.size();
  const auto sq = pairwise_sq(updates);
  std::vector<std::size_t> alive(n);
  std::iota(alive.begin(), alive.end(), std::size_t{0});
  std::vector<std::size_t> winners;
  for (int r = 0; r < rounds; ++r) {
    int neighbors = krum_neighbors(static_cast<int>(alive.size()), m);
    if (clamp) neighbors = std::max(neighbors, 1);
    if (neighbors < 1) {
      winners.push_back(alive.front());
      alive.erase(alive.begin());
      continue;
    }
    const auto scores = scores_from_pairwise(sq, alive, n, neighbors);
    const std::size_t pos = argmin_first(scores);
    winners.push_back(alive[pos]);
    alive.erase(alive.begin() + static_cast<long>(pos));
  }
  return winners;
}

}  // namespace

ParamVector mean_update(std::span<const ParamVector> updates) {
  require_nonempty(updates);
  ParamVector sum(updates.front().layout());
  for (const auto& u : updates) sum += u;
  sum *= 1.0 / static_cast<double>(updates.size());
  return sum;
}

AggregationResult fedavg(std::span<const ParamVector> updates,
                         std::span<const double> weights) {
  require_nonempty(updates);
  if (weights.size() != updates.size()) {
    throw InvalidArgumentError("one weight per update required");
  }
  double total = 0.0;
  for (double w : weights) {
    if (w < 0.0) throw InvalidArgumentError("fedavg weights must be >= 0");
    total += w;
  }
  if (total <= 0.0) throw InvalidArgumentError("fedavg weights are all zero");
  ParamVector sum(updates.front().layout());
  for (std::size_t i = 0; i < updates.size(); ++i) {
    sum.values() += (weights[i] / total) * updates[i].values();
  }
  AggregationResult out;
  out.scores = distances_to(updates, sum);
  out.accepted.assign(updates.size(), true);
  out.global_update = std::move(sum);
  return out;
}

std::vector<double> krum_scores(std::span<const ParamVector> updates,
                                int neighbors) {
  require_nonempty(updates);
  if (neighbors < 0) throw InvalidArgumentError("negative neighbour count");
  std::vector<std::size_t> alive(updates.size());
  std::iota(alive.begin(), alive.end(), std::size_t{0});
  return scores_from_pairwise(pairwise_sq(updates), alive, updates.size(),
                              neighbors);
}

std::size_t krum_select(std::span<const ParamVector> updates, int m) {
  const int k = static_cast<int>(updates.size());
  if (m < 0 || k < m + 3) {
    throw InvalidArgumentError("Krum needs K >= m + 3 (K=" + std::to_string(k) +
                               ", m=" + std::to_string(m) + ")");
  }
  return argmin_first(krum_scores(updates, krum_neighbors(k, m)));
}

AggregationResult multi_krum(std::span<const ParamVector> updates, int m,
                             int c) {
  const int k = static_cast<int>(updates.size());
  if (m < 0 || k < m + 3) {
    throw InvalidArgumentError("Multi-Krum needs K >= m + 3");
  }
  if (c < 1 || c > k) throw InvalidArgumentError("Multi-Krum needs 1 <= c <= K");
  const auto winners = iterated_krum(updates, m, c, /*clamp=*/true);
  AggregationResult out;
  out.scores = krum_scores(updates, krum_neighbors(k, m));
  out.accepted.assign(updates.size(), false);
  ParamVector sum(updates.front().layout());
  for (std::size_t w : winners) {
    out.accepted[w] = true;
    sum += updates[w];
  }
  sum *= 1.0 / static_cast<double>(winners.size());
  out.global_update = std::move(sum);
  return out;
}

AggregationResult coord_median(std::span<const ParamVector> updates) {
  require_nonempty(updates);
  const std::size_t n = updates.size();
  const std::size_t d = updates.front().size();
  ParamVector med(updates.front().layout());
  std::vector<double> column(n);
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t i = 0; i < n; ++i) column[i] = updates[i][j];
    const std::size_t mid = n / 2;
    std::nth_element(column.begin(), column.begin() + static_cast<long>(mid), column.end());
    double value = column[mid];
    if (n % 2 == 0) {
      const double lower = *std::max_element(column.begin(), column.begin() + static_cast<long>(mid));
      value = 0.5 * (lower + value);
    }
    med[j] = value;
  }
  AggregationResult out;
  out.scores = distances_to(updates, med);
  out.accepted.assign(n, true);
  out.global_update = std::move(med);
  return out;
}

AggregationResult trim_mean(std::span<const ParamVector> updates, int b) {
  require_nonempty(updates);
  const int k = static_cast<int>(updates.size());
  if (b < 0 || 2 * b >= k) throw InvalidArgumentError("trim needs 0 <= 2b < K");
  const std::size_t n = updates.size();
  const std::size_t d = updates.front().size();
  ParamVector agg(updates.front().layout());
  std::vector<double> column(n);
  const auto lo = static_cast<std::size_t>(b);
  const std::size_t hi = n - lo;
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t i = 0; i < n; ++i) column[i] = updates[i][j];
    std::sort(column.begin(), column.end());
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += column[i];
    agg[j] = s / static_cast<double>(hi - lo);
  }
  AggregationResult out;
  out.scores = distances_to(updates, agg);
  out.accepted.assign(n, true);
  out.global_update = std::move(agg);
  return out;
}

AggregationResult bulyan(std::span<const ParamVector> updates, int m,
                         bool relaxed) {
  require_nonempty(updates);
  const int k = static_cast<int>(updates.size());
  if (m < 0) throw InvalidArgumentError("negative attacker count");
  if (k < 4 * m + 3 && !relaxed) {
    throw InvalidArgumentError("Bulyan needs K >= 4m + 3 (K=" +
                               std::to_string(k) + ", m=" + std::to_string(m) +
                               ")");
  }
  const int theta = std::max(1, k - 2 * m);
  const int beta = std::max(1, theta - 2 * m);
  const auto chosen = iterated_krum(updates, m, theta, /*clamp=*/true);

  const std::size_t d = updates.front().size();
  ParamVector agg(updates.front().layout());
  std::vector<double> column(chosen.size());
  std::vector<std::size_t> order(chosen.size());
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t i = 0; i < chosen.size(); ++i) column[i] = updates[chosen[i]][j];
    std::vector<double> sorted = column;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t mid = sorted.size() / 2;
    const double med = sorted.size() % 2 == 1
                           ? sorted[mid]
                           : 0.5 * (sorted[mid - 1] + sorted[mid]);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b2) {
      return std::abs(column[a] - med) < std::abs(column[b2] - med);
    });
    double s = 0.0;
    for (int i = 0; i < beta; ++i) s += column[order[static_cast<std::size_t>(i)]];
    agg[j] = s / beta;
  }
  AggregationResult out;
  out.scores = krum_scores(updates, std::max(1, krum_neighbors(k, m)));
  out.accepted.assign(updates.size(), false);
  for (std::size_t c : chosen) out.accepted[c] = true;
  out.global_update = std::move(agg);
  return out;
}

}  // namespace pillfl
