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

#include "pillfl/defenses/detectors.h"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>
#include <random>

#include "pillfl/common/errors.h"
#include "pillfl/common/rng.h"

namespace pillfl {

namespace {

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t mid = v.size() / 2;
  return v.size() % 2 == 1 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

ParamVector mean_of_selected(std::span<const ParamVector> updates,
                             const std::vector<bool>& keep) {
  ParamVector sum(updates.front().layout());
  int count = 0;
  for (std::size_t i = 0; i < updates.size(); ++i) {
    if (!keep[i]) continue;
    sum += updates[i];
    ++count;
  }
  if (count > 0) sum *= 1.0 / count;
  return sum;
}

void require_nonempty(std::span<const ParamVector> updates) {
  if (updates.empty()) throw EmptyInputError("no updates to aggregate");
  for (const auto& u : updates) require_same_shape(updates.front(), u);
}

}  // namespace

Eigen::VectorXd top_singular_direction(const Eigen::MatrixXd& a,
                                       int iterations, std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd v(a.cols());
  for (Eigen::Index j = 0; j < v.size(); ++j) v[j] = normal(rng);
  v.normalize();
  for (int it = 0; it < iterations; ++it) {
    Eigen::VectorXd next = a.transpose() * (a * v);
    const double n = next.norm();
    if (n == 0.0) break;
    v = next / n;
  }
  return v;
}

std::vector<int> two_means_1d(std::span<const double> values, double min_gap) {
  std::vector<int> labels(values.size(), 0);
  if (values.size() < 2) return labels;
  double lo = *std::min_element(values.begin(), values.end());
  double hi = *std::max_element(values.begin(), values.end());
  if (hi - lo < min_gap) return labels;
  for (int iter = 0; iter < 100; ++iter) {
    bool changed = false;
    for (std::size_t i = 0; i < values.size(); ++i) {
      // Equidistant points join the low cluster.
      const int label = std::abs(values[i] - hi) < std::abs(values[i] - lo) ? 1 : 0;
      changed |= label != labels[i];
      labels[i] = label;
    }
    double sum[2] = {0.0, 0.0};
    int count[2] = {0, 0};
    for (std::size_t i = 0; i < values.size(); ++i) {
      sum[labels[i]] += values[i];
      ++count[labels[i]];
    }
    if (count[0] > 0) lo = sum[0] / count[0];
    if (count[1] > 0) hi = sum[1] / count[1];
    if (!changed && iter > 0) break;
  }
  if (hi - lo < min_gap) std::fill(labels.begin(), labels.end(), 0);
  return labels;
}

AggregationResult dnc(std::span<const ParamVector> updates, int m,
                      const DncOptions& options, std::uint64_t seed) {
  require_nonempty(updates);
  const int n = static_cast<int>(updates.size());
  if (m < 0 || n <= m) throw InvalidArgumentError("DnC needs K > m");
  const auto d = static_cast<Eigen::Index>(updates.front().size());
  const int reject_count =
      static_cast<int>(std::ceil(options.filter_frac * m - 1e-12));

  std::vector<bool> keep(updates.size(), true);
  std::vector<double> score_sum(updates.size(), 0.0);
  std::vector<Eigen::Index> coords(static_cast<std::size_t>(d));
  std::iota(coords.begin(), coords.end(), Eigen::Index{0});

  for (int it = 0; it < options.iterations; ++it) {
    Rng rng(derive_seed(seed, {tag_hash("dnc"), static_cast<std::uint64_t>(it)}));
    const Eigen::Index sub = std::min<Eigen::Index>(d, options.subsample);
    if (sub < d) {
      // Partial Fisher-Yates: the first `sub` entries become the sample.
      for (Eigen::Index i = 0; i < sub; ++i) {
        const auto j = i + static_cast<Eigen::Index>(rng() % static_cast<std::uint64_t>(d - i));
        std::swap(coords[i], coords[j]);
      }
    }
    std::vector<Eigen::Index> picked(coords.begin(), coords.begin() + sub);
    std::sort(picked.begin(), picked.end());

    Eigen::MatrixXd a(n, sub);
    for (int i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < sub; ++j) a(i, j) = updates[i][picked[j]];
    }
    const Eigen::RowVectorXd mu = a.colwise().mean();
    a.rowwise() -= mu;
    const Eigen::VectorXd v = top_singular_direction(
        a, options.power_iterations, derive_seed(seed, {tag_hash("power"), static_cast<std::uint64_t>(it)}));
    const Eigen::VectorXd proj = a * v;

    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int x, int y) {
      return proj[x] * proj[x] > proj[y] * proj[y];
    });
    for (int i = 0; i < n; ++i) score_sum[i] += proj[i] * proj[i];
    for (int r = 0; r < reject_count && r < n; ++r) {
      const int idx = order[static_cast<std::size_t>(r)];
      if (proj[idx] * proj[idx] > 0.0) keep[idx] = false;
    }
  }

  AggregationResult out;
  out.scores.reserve(updates.size());
  for (double s : score_sum) out.scores.push_back(s / std::max(1, options.iterations));
  if (std::none_of(keep.begin(), keep.end(), [](bool k) { return k; })) {
    std::cerr << "warning: DnC rejected every client; using coordinate median\n";
    AggregationResult med = coord_median(updates);
    out.global_update = std::move(med.global_update);
    out.accepted.assign(updates.size(), false);
    return out;
  }
  out.global_update = mean_of_selected(updates, keep);
  out.accepted = std::move(keep);
  return out;
}

AggregationResult FlDetectorLite::aggregate(std::span<const ParamVector> updates,
                                            std::span<const int> client_ids,
                                            std::span<const double> weights) {
  require_nonempty(updates);
  if (client_ids.size() != updates.size()) {
    throw InvalidArgumentError("one client id per update required");
  }
  const bool warm = rounds_seen_ >= 2;

  // Raw inconsistency against each client's last recorded update.
  std::vector<double> raw(updates.size(), std::nan(""));
  std::vector<double> present;
  for (std::size_t i = 0; i < updates.size(); ++i) {
    auto it = last_update_.find(client_ids[i]);
    if (it == last_update_.end()) continue;
    raw[i] = euclidean_distance(updates[i], it->second);
    present.push_back(raw[i]);
  }
  double denom = 1.0;
  if (!present.empty()) {
    const double med = median_of(present);
    const double mx = *std::max_element(present.begin(), present.end());
    denom = med > 0.0 ? med : (mx > 0.0 ? mx : 1.0);
  }

  AggregationResult out;
  out.scores.assign(updates.size(), 0.0);
  std::vector<std::size_t> scored;
  std::vector<double> suspicion;
  for (std::size_t i = 0; i < updates.size(); ++i) {
    if (std::isnan(raw[i])) continue;
    auto& h = history_[client_ids[i]];
    h.push_back(raw[i] / denom);
    while (static_cast<int>(h.size()) > window_) h.pop_front();
    const double s = std::accumulate(h.begin(), h.end(), 0.0) / static_cast<double>(h.size());
    out.scores[i] = s;
    scored.push_back(i);
    suspicion.push_back(s);
  }
  for (std::size_t i = 0; i < updates.size(); ++i) {
    last_update_[client_ids[i]] = updates[i];
  }
  ++rounds_seen_;

  if (!warm) {
    AggregationResult avg = fedavg(updates, weights);
    out.global_update = std::move(avg.global_update);
    out.accepted.assign(updates.size(), true);
    return out;
  }

  std::vector<bool> keep(updates.size(), true);
  const auto labels = two_means_1d(suspicion);
  for (std::size_t k = 0; k < scored.size(); ++k) {
    if (labels[k] == 1) keep[scored[k]] = false;
  }
  out.global_update = mean_of_selected(updates, keep);
  out.accepted = std::move(keep);
  return out;
}

AggregationResult flame(std::span<const ParamVector> updates,
                        double noise_lambda, std::uint64_t seed) {
  require_nonempty(updates);
  const std::size_t n = updates.size();
  if (n < 3) throw InvalidArgumentError("Flame needs K >= 3");
  if (noise_lambda < 0.0) throw InvalidArgumentError("noise lambda must be >= 0");

  std::vector<double> mean_dist(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j) mean_dist[i] += 1.0 - cosine_similarity(updates[i], updates[j]);
    }
    mean_dist[i] /= static_cast<double>(n - 1);
  }
  const auto labels = two_means_1d(mean_dist);
  double sum[2] = {0.0, 0.0};
  int count[2] = {0, 0};
  for (std::size_t i = 0; i < n; ++i) {
    sum[labels[i]] += mean_dist[i];
    ++count[labels[i]];
  }
  int kept_label = 0;
  if (count[1] > count[0]) kept_label = 1;
  if (count[1] == count[0] && count[1] > 0 &&
      sum[1] / count[1] < sum[0] / count[0]) {
    kept_label = 1;
  }

  std::vector<bool> keep(n);
  std::vector<double> norms;
  for (std::size_t i = 0; i < n; ++i) {
    keep[i] = labels[i] == kept_label;
    if (keep[i]) norms.push_back(updates[i].norm());
  }
  const double clip = median_of(norms);

  ParamVector sum_clipped(updates.front().layout());
  for (std::size_t i = 0; i < n; ++i) {
    if (!keep[i]) continue;
    const double nrm = updates[i].norm();
    const double factor = nrm > clip && nrm > 0.0 ? clip / nrm : 1.0;
    sum_clipped.values() += factor * updates[i].values();
  }
  sum_clipped *= 1.0 / static_cast<double>(norms.size());

  const double sigma = noise_lambda * clip;
  if (sigma > 0.0) {
    Rng rng(seed);
    std::normal_distribution<double> normal(0.0, sigma);
    for (std::size_t j = 0; j < sum_clipped.size(); ++j) sum_clipped[j] += normal(rng);
  }

  AggregationResult out;
  out.global_update = std::move(sum_clipped);
  out.scores = std::move(mean_dist);
  out.accepted = std::move(keep);
  return out;
}

}  // namespace pillfl
