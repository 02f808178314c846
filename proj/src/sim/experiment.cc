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

#include "pillfl/sim/experiment.h"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <numeric>
#include <string>

#include "pillfl/augment/coalition.h"
#include "pillfl/common/errors.h"
#include "pillfl/common/rng.h"
#include "pillfl/defenses/defense.h"
#include "pillfl/sim/metrics.h"

namespace pillfl {

namespace {

std::string resolve(const std::string& dir, const std::string& path) {
  if (dir.empty() || std::filesystem::path(path).is_absolute()) return path;
  return (std::filesystem::path(dir) / path).string();
}

std::vector<bool> malicious_flags(const ExperimentConfig& config) {
  std::vector<int> ids(static_cast<std::size_t>(config.clients));
  std::iota(ids.begin(), ids.end(), 0);
  if (config.shuffle_malicious) {
    Rng rng(derive_seed(config.seed, {tag_hash("malicious")}));
    std::shuffle(ids.begin(), ids.end(), rng);
  }
  std::vector<bool> flags(ids.size(), false);
  for (int i = 0; i < config.malicious; ++i) flags[static_cast<std::size_t>(ids[static_cast<std::size_t>(i)])] = true;
  return flags;
}

template <typename Fn>
auto staged(int round, const char* stage, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const RoundError&) {
    throw;
  } catch (const std::exception& e) {
    throw RoundError(round, stage, e.what());
  }
}

}  // namespace

TaskData load_task(const ExperimentConfig& config) {
  TaskData task;
  const DatasetSpec& ds = config.dataset;
  if (ds.kind == DatasetKind::kBlobs) {
    BlobsOptions opts;
    opts.classes = ds.classes;
    opts.n_per_class = ds.n_per_class;
    opts.dim = ds.dim;
    opts.spread = ds.spread;
    opts.seed = derive_seed(config.seed, {tag_hash("blobs")});
    task.train = synth_blobs(opts, 0);
    opts.n_per_class = ds.test_per_class;
    task.test = synth_blobs(opts, 1);
  } else {
    task.train = load_idx(resolve(ds.data_dir, ds.train_images),
                          resolve(ds.data_dir, ds.train_labels));
    task.test = load_idx(resolve(ds.data_dir, ds.test_images),
                         resolve(ds.data_dir, ds.test_labels));
    task.test.num_classes = task.train.num_classes =
        std::max(task.train.num_classes, task.test.num_classes);
  }
  if (task.train.dim() != config.model_dims.front()) {
    throw ConfigError("dataset feature width " + std::to_string(task.train.dim()) +
                      " does not match model input width");
  }
  if (task.train.num_classes > config.model_dims.back()) {
    throw ConfigError("dataset has more classes than model outputs");
  }
  if (static_cast<std::size_t>(ds.root_size) + static_cast<std::size_t>(config.clients) >
      task.train.size()) {
    throw ConfigError("not enough training samples for the root set and clients");
  }
  const std::uint64_t root_seed = derive_seed(config.seed, {tag_hash("root")});
  const auto root_size = static_cast<std::size_t>(ds.root_size);
  const Partition base =
      ds.root_noniid
          ? split_root_biased(task.train, root_size, config.partition.p, 0, root_seed)
          : split_root(task.train, root_size, root_seed);
  const std::uint64_t part_seed = derive_seed(config.seed, {tag_hash("partition")});
  try {
    task.partition = config.partition.kind == PartitionKind::kIid
                         ? partition_iid(task.train, config.clients, part_seed, base)
                         : partition_noniid(task.train, config.clients, config.partition.p,
                                            part_seed, base);
  } catch (const InvalidArgumentError& e) {
    throw ConfigError(std::string("partition: ") + e.what());
  }
  return task;
}

ExperimentResult run_experiment(const ExperimentConfig& config,
                                const RoundCallback& on_round) {
  config.validate();
  return run_experiment(config, load_task(config), on_round);
}

ExperimentResult run_experiment(const ExperimentConfig& config, const TaskData& task,
                                const RoundCallback& on_round) {
  config.validate();
  const std::uint64_t seed = config.seed;
  const std::vector<bool> is_malicious = malicious_flags(config);

  std::vector<LabeledDataset> shards;
  shards.reserve(task.partition.shards.size());
  for (const auto& idx : task.partition.shards) shards.push_back(task.train.subset(idx));
  const LabeledDataset root = task.train.subset(task.partition.root_indices);

  CoalitionConfig cc;
  cc.attack = config.attack;
  cc.knobs = config.attack_knobs;
  cc.augment = config.augment;
  cc.params = config.augment_params;
  cc.search = config.pill_search;
  cc.pattern_id = config.pill_pattern;
  cc.fe_boundary = config.pill_fe_boundary;
  cc.c_search = config.pill_c_search;
  cc.train = config.train;
  cc.master_seed = seed;
  Coalition coalition(cc, config.model_dims);

  std::unique_ptr<Defense> defense = make_defense(config.defense);
  const int m_assumed =
      config.defense.m_assumed >= 0 ? config.defense.m_assumed : config.malicious;

  ExperimentResult result;
  result.final_model =
      DenseNet::glorot_uniform(config.model_dims, derive_seed(seed, {tag_hash("init")}));
  result.error_series.push_back(error_rate(result.final_model, task.test));

  for (int t = 0; t < config.rounds; ++t) {
    const auto started = std::chrono::steady_clock::now();
    const DenseNet& global = result.final_model;
    const std::vector<int> participants =
        select_clients(t, config.clients, config.participation, seed);

    std::optional<ParamVector> server_update;
    if (defense->needs_server_update()) {
      server_update = staged(t, "server update", [&] {
        return sgd_train(global, root.features, root.labels, config.train,
                         derive_seed(seed, {tag_hash("server"), static_cast<std::uint64_t>(t)}))
            .update;
      });
    }

    std::vector<CoalitionMember> members;
    for (int id : participants) {
      if (is_malicious[static_cast<std::size_t>(id)]) {
        members.push_back({id, &shards[static_cast<std::size_t>(id)]});
      }
    }
    std::optional<CoalitionRound> crew;
    if (!members.empty()) {
      crew = staged(t, "coalition", [&] { return coalition.run_round(global, t, members); });
    }

    std::vector<ParamVector> updates;
    std::vector<double> weights;
    updates.reserve(participants.size());
    std::size_t next_member = 0;
    for (int id : participants) {
      const LabeledDataset& shard = shards[static_cast<std::size_t>(id)];
      if (is_malicious[static_cast<std::size_t>(id)]) {
        updates.push_back(crew->uploads[next_member++]);
      } else {
        updates.push_back(staged(t, "local training", [&] {
          if (shard.empty()) {
            throw EmptyInputError("client " + std::to_string(id) + " holds no data");
          }
          return sgd_train(global, shard.features, shard.labels, config.train,
                           client_round_seed(seed, "train", id, t))
              .update;
        }));
      }
      weights.push_back(static_cast<double>(shard.size()));
    }

    RoundInput input;
    input.updates = updates;
    input.client_ids = participants;
    input.weights = weights;
    input.server_update = server_update ? &*server_update : nullptr;
    input.m = m_assumed;
    input.seed = derive_seed(seed, {tag_hash("defense"), static_cast<std::uint64_t>(t)});
    const AggregationResult agg =
        staged(t, "aggregation", [&] { return defense->aggregate(input); });

    ParamVector params = global.flatten();
    params -= agg.global_update;
    result.final_model = DenseNet::unflatten(params);

    RoundLog log;
    log.round = t;
    log.error_rate = error_rate(result.final_model, task.test);
    const StealthScores stealth = stealth_metrics(
        updates, server_update ? &*server_update : nullptr, m_assumed);
    for (std::size_t i = 0; i < participants.size(); ++i) {
      ClientRecord rec;
      rec.client_id = participants[i];
      rec.is_malicious = is_malicious[static_cast<std::size_t>(participants[i])];
      rec.accepted = agg.accepted[i];
      rec.distance_score = stealth.distance[i];
      if (stealth.cosine) rec.cosine_score = (*stealth.cosine)[i];
      rec.defense_score = agg.scores[i];
      log.clients.push_back(rec);
    }
    if (crew) {
      if (crew->reference && server_update) {
        log.reference_cosine = cosine_similarity(*crew->reference, *server_update);
      }
      log.sim_trace = crew->sim_trace;
      log.dist_trace = crew->dist_trace;
    }
    log.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    result.error_series.push_back(log.error_rate);
    if (on_round) on_round(log);
    result.rounds.push_back(std::move(log));
  }
  return result;
}

}  // namespace pillfl
