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

#include "pillfl/defenses/trust.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "pillfl/common/errors.h"

namespace pillfl {

namespace {

AggregationResult weighted_by_trust(std::span<const ParamVector> updates,
                                    const ParamVector& server_update,
                                    std::vector<double> trust) {
  const double ref_norm = server_update.norm();
  double total = 0.0;
  for (double t : trust) total += t;
  ParamVector agg(server_update.layout());
  AggregationResult out;
  out.accepted.resize(updates.size());
  if (total > 0.0) {
    for (std::size_t i = 0; i < updates.size(); ++i) {
      out.accepted[i] = trust[i] > 0.0;
      const double n = updates[i].norm();
      if (trust[i] <= 0.0 || n == 0.0) continue;
      agg.values() += (trust[i] / total) * (ref_norm / n) * updates[i].values();
    }
  }
  out.global_update = std::move(agg);
  out.scores = std::move(trust);
  return out;
}

void check_inputs(std::span<const ParamVector> updates,
                  const ParamVector& server_update) {
  if (updates.empty()) throw EmptyInputError("no updates to aggregate");
  if (server_update.size() == 0) {
    throw EmptyInputError("trust aggregation needs a server update");
  }
  for (const auto& u : updates) require_same_shape(server_update, u);
}

}  // namespace

AggregationResult fltrust(std::span<const ParamVector> updates,
                          const ParamVector& server_update) {
  check_inputs(updates, server_update);
  std::vector<double> trust;
  trust.reserve(updates.size());
  for (const auto& u : updates) {
    trust.push_back(std::max(0.0, cosine_similarity(u, server_update)));
  }
  return weighted_by_trust(updates, server_update, std::move(trust));
}

AggregationResult dstrust(std::span<const ParamVector> updates,
                          const ParamVector& server_update) {
  check_inputs(updates, server_update);
  std::vector<double> trust(updates.size(), 0.0);
  std::vector<std::size_t> exact;
  double max_finite = 0.0;
  for (std::size_t i = 0; i < updates.size(); ++i) {
    const double cos = cosine_similarity(updates[i], server_update);
    const double dist = euclidean_distance(updates[i], server_update);
    if (dist == 0.0) {
      if (cos > 0.0) exact.push_back(i);
      continue;
    }
    trust[i] = std::max(0.0, cos / dist);
    max_finite = std::max(max_finite, trust[i]);
  }
  for (std::size_t i : exact) trust[i] = max_finite > 0.0 ? max_finite : 1.0;
  return weighted_by_trust(updates, server_update, std::move(trust));
}

}  // namespace pillfl
