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

#include "pillfl/augment/coalition.h"

#include <random>
#include <utility>

#include "pillfl/common/errors.h"
#include "pillfl/common/rng.h"

namespace pillfl {

namespace {

LabeledDataset pool_data(std::span<const CoalitionMember> members) {
  LabeledDataset pooled;
  Eigen::Index rows = 0;
  for (const auto& m : members) rows += static_cast<Eigen::Index>(m.data->size());
  const LabeledDataset& first = *members.front().data;
  pooled.num_classes = first.num_classes;
  pooled.features.resize(rows, first.features.cols());
  Eigen::Index at = 0;
  for (const auto& m : members) {
    const auto n = static_cast<Eigen::Index>(m.data->size());
    pooled.features.middleRows(at, n) = m.data->features;
    pooled.labels.insert(pooled.labels.end(), m.data->labels.begin(), m.data->labels.end());
    at += n;
  }
  return pooled;
}

}  // namespace

Coalition::Coalition(CoalitionConfig config, std::vector<int> layer_dims)
    : config_(std::move(config)), attack_(make_attack(config_.attack)) {
  if (config_.augment && config_.attack != AttackKind::kNone) {
    config_.params.validate();
    blueprint_ = build_blueprint(layer_dims, layer_dims.back());
    const int layers = static_cast<int>(layer_dims.size()) - 1;
    state_.pattern_id = config_.pattern_id;
    pattern_spec(state_.pattern_id);  // validates the id
    state_.fe_boundary = config_.fe_boundary >= 0 ? config_.fe_boundary
                                                  : default_fe_boundary(layers);
    if (state_.fe_boundary < 1 || state_.fe_boundary >= layers) {
      throw InvalidArgumentError("FE boundary must lie in [1, L)");
    }
    state_.c_search = config_.c_search;
  }
}

CoalitionRound Coalition::run_round(const DenseNet& global, int round,
                                    std::span<const CoalitionMember> members) {
  if (members.empty()) throw EmptyInputError("coalition round without members");
  std::vector<ParamVector> honest;
  honest.reserve(members.size());
  for (const auto& m : members) {
    if (m.data == nullptr || m.data->empty()) {
      throw EmptyInputError("compromised client " + std::to_string(m.client_id) +
                            " holds no data");
    }
    honest.push_back(sgd_train(global, m.data->features, m.data->labels,
                               config_.train,
                               client_round_seed(config_.master_seed, "train",
                                                 m.client_id, round))
                         .update);
  }

  if (config_.attack == AttackKind::kNone) {
    CoalitionRound out;
    out.uploads = honest;
    out.honest_updates = std::move(honest);
    return out;
  }
  if (config_.augment) return run_augmented(global, round, members, std::move(honest));

  CoalitionRound out;
  AttackContext ctx;
  ctx.reference_update = estimate_benign(honest);
  ctx.compromised_updates = honest;
  ctx.round = round;
  ctx.m = static_cast<int>(members.size());
  ctx.knobs = config_.knobs;
  for (const auto& m : members) {
    ctx.seed = client_round_seed(config_.master_seed, "attack", m.client_id, round);
    out.uploads.push_back(attack_->craft(ctx));
  }
  out.honest_updates = std::move(honest);
  return out;
}

CoalitionRound Coalition::run_augmented(const DenseNet& global, int round,
                                        std::span<const CoalitionMember> members,
                                        std::vector<ParamVector> honest) {
  CoalitionRound out;
  const ParamVector params = global.flatten();
  const int m = static_cast<int>(members.size());

  // 1. Pill construction.
  if (!start_neuron_.has_value()) {
    Rng rng(derive_seed(config_.master_seed, {tag_hash("pill-start")}));
    start_neuron_ = static_cast<int>(rng() % static_cast<std::uint64_t>(global.dims()[1]));
  }
  std::optional<ParamVector> observed_global;
  PatternRoundContext pctx;
  pctx.round = round;
  if (params_at_upload_.has_value()) {
    observed_global = *params_at_upload_ - params;
    pctx.global_update = &*observed_global;
    pctx.own_update = &*last_upload_;
  }
  out.searched = pattern_step(state_, pctx);
  state_.last_masks = refresh_pill(global, blueprint_, state_, out.searched,
                                   *start_neuron_, config_.search);
  const PillMasks& masks = *state_.last_masks;

  // 2. Pill poisoning on the extra-trained reference.
  const int e_extra = config_.params.e_extra >= 0
                          ? std::min(config_.params.e_extra, m * config_.train.epochs)
                          : m * config_.train.epochs;
  const LabeledDataset pooled = pool_data(members);
  ParamVector reference =
      e_extra > 0
          ? extra_train(global, pooled.features, pooled.labels, e_extra, config_.train,
                        derive_seed(config_.master_seed,
                                    {tag_hash("extra"), static_cast<std::uint64_t>(round)}))
          : ParamVector(params.layout());
  AttackContext ctx;
  ctx.reference_update = reference;
  ctx.compromised_updates = honest;
  ctx.round = round;
  ctx.m = m;
  ctx.knobs = config_.knobs;
  ctx.seed = derive_seed(config_.master_seed,
                         {tag_hash("pill-attack"), static_cast<std::uint64_t>(round)});
  const ParamVector poisoned = pill_poison(*attack_, ctx, masks.pill);

  // 3. Injection, disconnection and the two adjustments.
  const ParamVector benign = estimate_benign(honest);
  ParamVector upload = inject(poisoned, benign, reference, params, masks);
  const ParamVector m_all = masks.all();
  upload = sim_adjust(std::move(upload), benign, honest, m_all, config_.params,
                      &out.sim_trace);
  upload = dist_adjust(std::move(upload), benign, honest, config_.params,
                       &out.dist_trace);

  const Eigen::ArrayXd outside = 1.0 - m_all.values().array();
  for (const auto& member : members) {
    ParamVector u = upload;
    if (config_.params.jitter > 0.0) {
      Rng rng(client_round_seed(config_.master_seed, "jitter", member.client_id, round));
      std::normal_distribution<double> normal(0.0, config_.params.jitter);
      for (std::size_t j = 0; j < u.size(); ++j) {
        u[j] += outside[static_cast<Eigen::Index>(j)] * u[j] * normal(rng);
      }
    }
    out.uploads.push_back(std::move(u));
  }

  params_at_upload_ = params;
  last_upload_ = upload;
  out.honest_updates = std::move(honest);
  out.reference = std::move(reference);
  out.benign_estimate = benign;
  out.masks = masks;
  return out;
}

}  // namespace pillfl
