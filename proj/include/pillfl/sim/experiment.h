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

#ifndef PILLFL_SIM_EXPERIMENT_H_
#define PILLFL_SIM_EXPERIMENT_H_

#include <functional>
#include <optional>
#include <vector>

#include "pillfl/augment/augment.h"
#include "pillfl/data/dataset.h"
#include "pillfl/data/partition.h"
#include "pillfl/nn/dense_net.h"
#include "pillfl/sim/config.h"

namespace pillfl {

struct ClientRecord {
  int client_id = 0;
  bool is_malicious = false;
  bool accepted = false;
  double distance_score = 0.0;
  std::optional<double> cosine_score;
  // Score reported by the active defense.
  double defense_score = 0.0;
};

struct RoundLog {
  int round = 0;
  // Test error of the model after this round's update.
  double error_rate = 0.0;
  std::vector<ClientRecord> clients;
  // cos(extra-trained reference, server update) when both exist.
  std::optional<double> reference_cosine;
  // Adjustment traces of the augmented coalition.
  AdjustTrace sim_trace;
  AdjustTrace dist_trace;
  double wall_seconds = 0.0;
};

struct ExperimentResult {
  DenseNet final_model;
  std::vector<RoundLog> rounds;
  // Length rounds + 1; entry 0 is the initial model.
  std::vector<double> error_series;
};

struct TaskData {
  LabeledDataset train;
  LabeledDataset test;
  Partition partition;
};

// Materializes the datasets, the root set and the client shards.
TaskData load_task(const ExperimentConfig& config);

using RoundCallback = std::function<void(const RoundLog&)>;

// Runs the full simulation. Failures inside the loop surface as RoundError.
ExperimentResult run_experiment(const ExperimentConfig& config,
                                const RoundCallback& on_round = {});
ExperimentResult run_experiment(const ExperimentConfig& config,
                                const TaskData& task,
                                const RoundCallback& on_round = {});

}  // namespace pillfl

#endif  // PILLFL_SIM_EXPERIMENT_H_
