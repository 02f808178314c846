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

#ifndef PILLFL_DEFENSES_AGGREGATION_H_
#define PILLFL_DEFENSES_AGGREGATION_H_

#include <cstddef>
#include <span>
#include <vector>

#include "pillfl/nn/param_vector.h"

namespace pillfl {

// Output of every aggregation rule. scores[i] and accepted[i] refer to the
// i-th input update; what a score means depends on the rule (Krum distance
// score, trust score, suspicion score, distance to the aggregate).
struct AggregationResult {
  ParamVector global_update;
  std::vector<double> scores;
  std::vector<bool> accepted;
};

// Weighted mean. Weights must be non-negative and not all zero.
AggregationResult fedavg(std::span<const ParamVector> updates,
                         std::span<const double> weights);

// Unweighted mean of a non-empty list.
ParamVector mean_update(std::span<const ParamVector> updates);

// Krum score of each update: the sum of squared Euclidean distances to its
// `neighbors` nearest other updates.
std::vector<double> krum_scores(std::span<const ParamVector> updates,
                                int neighbors);

// Number of neighbours Krum uses for n updates and m assumed attackers.
inline int krum_neighbors(int n, int m) { return n - m - 2; }

// Index of the lowest Krum score (lowest index on ties). Requires K >= m + 3.
std::size_t krum_select(std::span<const ParamVector> updates, int m);

// Repeats Krum selection c times on the shrinking set and averages the
// winners. scores holds the Krum scores over the full input set.
AggregationResult multi_krum(std::span<const ParamVector> updates, int m,
                             int c);

// Coordinate-wise median; even counts use the midpoint of the central pair.
AggregationResult coord_median(std::span<const ParamVector> updates);

// Coordinate-wise mean after dropping the b largest and b smallest values.
AggregationResult trim_mean(std::span<const ParamVector> updates, int b);

// theta = K - 2m candidates by iterative Krum, then per coordinate the mean
// of the beta = theta - 2m values closest to the candidates' median.
// Requires K >= 4m + 3 unless `relaxed`, in which case Krum neighbour counts
// are clamped to at least one and beta to at least one.
AggregationResult bulyan(std::span<const ParamVector> updates, int m,
                         bool relaxed = false);

}  // namespace pillfl

#endif  // PILLFL_DEFENSES_AGGREGATION_H_
