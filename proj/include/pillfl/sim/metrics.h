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

#ifndef PILLFL_SIM_METRICS_H_
#define PILLFL_SIM_METRICS_H_

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "pillfl/data/dataset.h"
#include "pillfl/nn/dense_net.h"
#include "pillfl/nn/param_vector.h"

namespace pillfl {

// Participants of a round, ascending. q = 1 returns every client; otherwise
// ceil(q * K) distinct clients drawn from a round-derived seed.
std::vector<int> select_clients(int round, int clients, double q,
                                std::uint64_t seed);

// Fraction of misclassified samples. Throws EmptyInputError on an empty set.
double error_rate(const DenseNet& net, const LabeledDataset& test);

struct StealthScores {
  std::vector<double> distance;
  // Present when a server update was supplied.
  std::optional<std::vector<double>> cosine;
};

// Multi-Krum distance score of every update (neighbour count n - m - 2,
// clamped to [1, n - 1]) and, with a server update, the cosine to it.
StealthScores stealth_metrics(std::span<const ParamVector> updates,
                              const ParamVector* server_update, int m_assumed);

}  // namespace pillfl

#endif  // PILLFL_SIM_METRICS_H_
