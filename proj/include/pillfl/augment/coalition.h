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

#ifndef PILLFL_AUGMENT_COALITION_H_
#define PILLFL_AUGMENT_COALITION_H_

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "pillfl/attacks/attacks.h"
#include "pillfl/augment/augment.h"
#include "pillfl/data/dataset.h"
#include "pillfl/nn/dense_net.h"
#include "pillfl/pill/pattern.h"
#include "pillfl/pill/pill.h"

namespace pillfl {

struct CoalitionConfig {
  AttackKind attack = AttackKind::kNone;
  AttackKnobs knobs;
  // When false the raw attack output is uploaded.
  bool augment = false;
  AugmentParams params;
  SearchOptions search;
  int pattern_id = 1;
  // < 0 selects default_fe_boundary(L).
  int fe_boundary = -1;
  double c_search = kDefaultSearchThreshold;
  // Local training of the compromised clients (and the extra training).
  TrainOptions train;
  std::uint64_t master_seed = 0;
};

// One compromised client taking part in the round.
struct CoalitionMember {
  int client_id = 0;
  const LabeledDataset* data = nullptr;
};

struct CoalitionRound {
  // One upload per member, in member order.
  std::vector<ParamVector> uploads;
  std::vector<ParamVector> honest_updates;
  // Extra-trained reference update (augmented rounds only).
  std::optional<ParamVector> reference;
  std::optional<ParamVector> benign_estimate;
  std::optional<PillMasks> masks;
  SearchFlags searched;
  AdjustTrace sim_trace;
  AdjustTrace dist_trace;
};

// The malicious coalition. Owns the pill state (start neuron, pattern state,
// masks) across rounds and runs the augmentation pipeline once per round on
// behalf of every participating compromised client.
class Coalition {
 public:
  Coalition(CoalitionConfig config, std::vector<int> layer_dims);

  CoalitionRound run_round(const DenseNet& global, int round,
                           std::span<const CoalitionMember> members);

  const PatternState& pattern_state() const { return state_; }
  std::optional<int> start_neuron() const { return start_neuron_; }

 private:
  CoalitionRound run_augmented(const DenseNet& global, int round,
                               std::span<const CoalitionMember> members,
                               std::vector<ParamVector> honest);

  CoalitionConfig config_;
  Blueprint blueprint_;
  std::unique_ptr<Attack> attack_;
  PatternState state_;
  std::optional<int> start_neuron_;
  // Global parameters when the coalition last uploaded, and that upload.
  std::optional<ParamVector> params_at_upload_;
  std::optional<ParamVector> last_upload_;
};

}  // namespace pillfl

#endif  // PILLFL_AUGMENT_COALITION_H_
