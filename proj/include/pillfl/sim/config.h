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

#ifndef PILLFL_SIM_CONFIG_H_
#define PILLFL_SIM_CONFIG_H_

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pillfl/attacks/attacks.h"
#include "pillfl/augment/augment.h"
#include "pillfl/defenses/defense.h"
#include "pillfl/nn/dense_net.h"
#include "pillfl/pill/pill.h"

namespace pillfl {

enum class DatasetKind { kBlobs, kIdx };
enum class PartitionKind { kIid, kNonIid };

struct DatasetSpec {
  DatasetKind kind = DatasetKind::kBlobs;
  // Blobs.
  int classes = 3;
  int n_per_class = 1000;
  int test_per_class = 500;
  int dim = 8;
  double spread = 0.6;
  // IDX files; relative paths resolve against `data_dir`.
  std::string data_dir;
  std::string train_images;
  std::string train_labels;
  std::string test_images;
  std::string test_labels;
  // Server root set carved out of the training data.
  int root_size = 100;
  // Draw the root set from class 0 with probability partition.p and from
  // the other classes otherwise.
  bool root_noniid = false;
};

struct PartitionSpec {
  PartitionKind kind = PartitionKind::kIid;
  double p = 0.5;
};

struct ExperimentConfig {
  std::string name = "experiment";
  std::uint64_t seed = 1;
  int rounds = 150;
  int clients = 20;
  int malicious = 4;
  bool shuffle_malicious = false;
  // Participation fraction; 1 is cross-silo.
  double participation = 1.0;
  TrainOptions train{2, 0.05, 32};
  std::vector<int> model_dims{8, 16, 8, 3, 3};
  DatasetSpec dataset;
  PartitionSpec partition;
  AttackKind attack = AttackKind::kNone;
  AttackKnobs attack_knobs;
  DefenseOptions defense;
  int pill_pattern = 1;
  SearchOptions pill_search;
  double pill_c_search = 0.94;
  int pill_fe_boundary = -1;
  bool augment = false;
  AugmentParams augment_params;
  std::string out_dir = "runs/experiment";

  // Throws ConfigError on an inconsistent configuration.
  void validate() const;
};

// Builds a config from a JSON tree. Unknown keys are rejected.
ExperimentConfig config_from_json(const nlohmann::json& tree);
nlohmann::json config_to_json(const ExperimentConfig& config);

// Reads and parses a JSON config file.
nlohmann::json load_config_tree(const std::string& path);

// Applies `key=value` where key is a dotted path such as "defense.kind".
// The value is parsed as JSON when possible, otherwise taken as a string.
void apply_override(nlohmann::json& tree, const std::string& assignment);

}  // namespace pillfl

#endif  // PILLFL_SIM_CONFIG_H_
