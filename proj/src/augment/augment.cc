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

#include "pillfl/augment/augment.h"

#include <algorithm>

#include "pillfl/common/errors.h"
#include "pillfl/defenses/aggregation.h"

namespace pillfl {

void AugmentParams::validate() const {
  if (!(c_up > 1.0)) throw InvalidArgumentError("c_up must be > 1");
  if (!(c_down > 0.0 && c_down < 1.0)) {
    throw InvalidArgumentError("c_down must lie in (0, 1)");
  }
  if (c_iter < 1) throw InvalidArgumentError("c_iter must be >= 1");
  if (jitter < 0.0) throw InvalidArgumentError("jitter must be >= 0");
}

ParamVector extra_train(const DenseNet& global, const Matrix& x,
                        std::span<const int> labels, int epochs,
                        const TrainOptions& base, std::uint64_t seed) {
  if (x.rows() == 0) throw EmptyInputError("coalition holds no data");
  TrainOptions options = base;
  options.epochs = epochs;
  return sgd_train(global, x, labels, options, seed).update;
}

ParamVector estimate_benign(std::span<const ParamVector> normal_updates) {
  return mean_update(normal_updates);
}

ParamVector pill_poison(const Attack& attack, const AttackContext& ctx,
                        const ParamVector& pill_mask) {
  return attack.craft(ctx).masked(pill_mask);
}

ParamVector disconnection_update(const ParamVector& global_params,
                                 const ParamVector& reference) {
  require_same_shape(global_params, reference);
  const double lo = reference.size() > 0 ? reference.values().minCoeff() : 0.0;
  const double hi = reference.size() > 0 ? reference.values().maxCoeff() : 0.0;
  return ParamVector(global_params.layout(),
                     global_params.values().cwiseMax(lo).cwiseMin(hi));
}

ParamVector inject(const ParamVector& poisoned, const ParamVector& benign,
                   const ParamVector& reference,
                   const ParamVector& global_params, const PillMasks& masks) {
  require_same_shape(poisoned, benign);
  require_same_shape(poisoned, masks.pill);
  ParamVector out = poisoned + benign.masked(complement(masks.pill));
  const ParamVector zero_step = disconnection_update(global_params, reference);
  const auto& disc = masks.disconnect.values();
  for (std::size_t j = 0; j < out.size(); ++j) {
    if (disc[static_cast<Eigen::Index>(j)] != 0.0) out[j] = zero_step[j];
  }
  return out;
}

ParamVector sim_adjust(ParamVector update, const ParamVector& benign,
                       std::span<const ParamVector> normal_updates,
                       const ParamVector& m_all, const AugmentParams& params,
                       AdjustTrace* trace) {
  double s_max = 0.0;
  for (const auto& u : normal_updates) {
    s_max = std::max(s_max, cosine_similarity(benign, u));
  }
  const Eigen::ArrayXd mask = m_all.values().array();
  const Eigen::ArrayXd shrink = (1.0 - mask) + params.c_down * mask;
  const Eigen::ArrayXd grow = params.c_up * (1.0 - mask) + mask;

  AdjustTrace t;
  t.threshold = s_max;
  t.initial = cosine_similarity(benign, update);
  int iter = 0;
  while (cosine_similarity(benign, update) < s_max && iter < params.c_iter) {
    if (iter % 2 == 1) {
      update.values().array() *= grow;
    } else {
      update.values().array() *= shrink;
    }
    ++iter;
  }
  t.iterations = iter;
  t.final = cosine_similarity(benign, update);
  if (trace != nullptr) *trace = t;
  return update;
}

ParamVector dist_adjust(ParamVector update, const ParamVector& benign,
                        std::span<const ParamVector> normal_updates,
                        const AugmentParams& params, AdjustTrace* trace) {
  if (normal_updates.empty()) throw EmptyInputError("dist_adjust needs m >= 1");
  double dist_max = 0.0;
  for (const auto& u : normal_updates) {
    dist_max = std::max(dist_max, euclidean_distance(u, benign));
  }
  auto dist_after = [&](double c) {
    return (c * update.values() - benign.values()).norm();
  };
  const double factor =
      dist_after(params.c_down) < dist_after(params.c_up) ? params.c_down : params.c_up;

  AdjustTrace t;
  t.threshold = dist_max;
  double dist = euclidean_distance(update, benign);
  t.initial = dist;
  int iter = 0;
  while (dist >= dist_max) {
    const double next = dist_after(factor);
    if (!(next < dist)) break;
    update *= factor;
    dist = next;
    ++iter;
  }
  t.iterations = iter;
  t.final = dist;
  if (trace != nullptr) *trace = t;
  return update;
}

}  // namespace pillfl
