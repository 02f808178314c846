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

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "pillfl/common/errors.h"
#include "pillfl/common/rng.h"
#include "pillfl/defenses/aggregation.h"
#include "pillfl/sim/config.h"
#include "pillfl/sim/experiment.h"
#include "pillfl/sim/logs.h"
#include "pillfl/sim/metrics.h"

namespace pillfl {
namespace {

namespace fs = std::filesystem;

ExperimentConfig small_config() {
  ExperimentConfig c;
  c.name = "small";
  c.seed = 5;
  c.rounds = 6;
  c.clients = 8;
  c.malicious = 2;
  c.train = {1, 0.05, 32};
  c.dataset.n_per_class = 120;
  c.dataset.test_per_class = 60;
  c.dataset.root_size = 30;
  c.model_dims = {8, 10, 6, 3, 3};
  return c;
}

std::string csv_text(const ExperimentResult& r) {
  std::ostringstream out;
  write_csv(out, r.rounds);
  return out.str();
}

TEST(ConfigTest, DefaultsRoundTrip) {
  const ExperimentConfig c;
  const nlohmann::json tree = config_to_json(c);
  EXPECT_EQ(config_to_json(config_from_json(tree)), tree);
  EXPECT_NO_THROW(c.validate());
}

TEST(ConfigTest, PartialTreeFillsDefaults) {
  const auto c = config_from_json(nlohmann::json::parse(
      R"({"rounds": 3, "defense": {"kind": "mkrum"}, "attack": {"kind": "trim"}})"));
  EXPECT_EQ(c.rounds, 3);
  EXPECT_EQ(c.defense.kind, DefenseKind::kMultiKrum);
  EXPECT_EQ(c.attack, AttackKind::kTrim);
  EXPECT_EQ(c.clients, ExperimentConfig{}.clients);
}

TEST(ConfigTest, UnknownKeysAreRejected) {
  EXPECT_THROW(config_from_json(nlohmann::json::parse(R"({"roundz": 3})")), ConfigError);
  EXPECT_THROW(config_from_json(nlohmann::json::parse(R"({"defense": {"kindd": "x"}})")),
               ConfigError);
  EXPECT_THROW(config_from_json(nlohmann::json::parse(R"({"defense": {"kind": "nope"}})")),
               ConfigError);
  EXPECT_THROW(config_from_json(nlohmann::json::parse(R"({"rounds": "many"})")), ConfigError);
}

TEST(ConfigTest, Overrides) {
  nlohmann::json tree = config_to_json(ExperimentConfig{});
  apply_override(tree, "defense.kind=median");
  apply_override(tree, "augment.c_up=3.5");
  apply_override(tree, "name=run one");
  apply_override(tree, "augment.enabled=true");
  const auto c = config_from_json(tree);
  EXPECT_EQ(c.defense.kind, DefenseKind::kMedian);
  EXPECT_DOUBLE_EQ(c.augment_params.c_up, 3.5);
  EXPECT_EQ(c.name, "run one");
  EXPECT_TRUE(c.augment);
  EXPECT_THROW(apply_override(tree, "no_equals_sign"), ConfigError);
}

TEST(ConfigTest, Validation) {
  auto bad = [](auto mutate) {
    ExperimentConfig c;
    mutate(c);
    EXPECT_THROW(c.validate(), ConfigError);
  };
  bad([](ExperimentConfig& c) { c.malicious = 10; });
  bad([](ExperimentConfig& c) { c.participation = 0.0; });
  bad([](ExperimentConfig& c) { c.participation = 1.5; });
  bad([](ExperimentConfig& c) { c.train.lr = 0.0; });
  bad([](ExperimentConfig& c) { c.train.epochs = 0; });
  bad([](ExperimentConfig& c) { c.model_dims = {8}; });
  bad([](ExperimentConfig& c) { c.model_dims = {5, 16, 8, 3, 3}; });
  bad([](ExperimentConfig& c) { c.pill_pattern = 7; });
  bad([](ExperimentConfig& c) { c.augment_params.c_down = 1.2; });
  bad([](ExperimentConfig& c) {
    c.defense.kind = DefenseKind::kFlTrust;
    c.dataset.root_size = 0;
  });
  bad([](ExperimentConfig& c) {
    c.defense.kind = DefenseKind::kBulyan;
    c.clients = 10;
    c.malicious = 2;
  });
  bad([](ExperimentConfig& c) {
    c.partition.kind = PartitionKind::kNonIid;
    c.partition.p = 0.1;
  });
}

TEST(ConfigTest, BundledConfigsParse) {
  const fs::path dir = fs::path(PILLFL_DATA_DIR).parent_path() / "configs";
  int seen = 0;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() != ".json") continue;
    const auto c = config_from_json(load_config_tree(entry.path().string()));
    EXPECT_NO_THROW(c.validate()) << entry.path();
    ++seen;
  }
  EXPECT_GE(seen, 2);
}

TEST(SelectClientsTest, CrossSilo) {
  EXPECT_EQ(select_clients(3, 5, 1.0, 9), (std::vector<int>{0, 1, 2, 3, 4}));
}

TEST(SelectClientsTest, CrossDevice) {
  const auto ids = select_clients(0, 50, 0.4, 9);
  EXPECT_EQ(ids.size(), 20u);
  EXPECT_EQ(std::set<int>(ids.begin(), ids.end()).size(), 20u);
  for (int id : ids) {
    EXPECT_GE(id, 0);
    EXPECT_LT(id, 50);
  }
  EXPECT_EQ(select_clients(0, 50, 0.4, 9), ids);
  EXPECT_NE(select_clients(1, 50, 0.4, 9), ids);
  EXPECT_EQ(select_clients(0, 7, 0.5, 1).size(), 4u);
}

TEST(SelectClientsTest, CoverageOverRounds) {
  std::set<int> seen;
  for (int t = 0; t < 50; ++t) {
    for (int id : select_clients(t, 50, 0.4, 3)) seen.insert(id);
  }
  EXPECT_EQ(seen.size(), 50u);
}

TEST(ErrorRateTest, Examples) {
  LabeledDataset ds;
  ds.num_classes = 10;
  ds.features = Matrix::Zero(100, 2);
  for (int i = 0; i < 100; ++i) ds.labels.push_back(i % 10);
  // A zero net predicts class 0 everywhere.
  EXPECT_DOUBLE_EQ(error_rate(DenseNet({2, 4, 10}), ds), 0.9);

  LabeledDataset two;
  two.num_classes = 2;
  two.features = Matrix(2, 1);
  two.features << -1.0, 1.0;
  two.labels = {0, 1};
  DenseNet perfect({1, 2});
  perfect.weights[0] << -1.0, 1.0;
  EXPECT_DOUBLE_EQ(error_rate(perfect, two), 0.0);
  EXPECT_THROW(error_rate(perfect, LabeledDataset{}), EmptyInputError);
}

TEST(ErrorRateTest, RandomNetIsNearChance) {
  BlobsOptions o;
  o.classes = 5;
  o.n_per_class = 400;
  o.seed = 1;
  const LabeledDataset ds = synth_blobs(o);
  double total = 0.0;
  const int nets = 40;
  for (int s = 0; s < nets; ++s) {
    total += error_rate(DenseNet::glorot_uniform({8, 16, 5}, static_cast<std::uint64_t>(s)), ds);
  }
  EXPECT_NEAR(total / nets, 0.8, 0.05);
}

TEST(StealthTest, IdenticalAndParallel) {
  const std::vector<ParamVector> same(5, ParamVector::from({1, 2}));
  const ParamVector server = ParamVector::from({2, 4});
  const auto s = stealth_metrics(same, &server, 1);
  for (double d : s.distance) EXPECT_EQ(d, 0.0);
  ASSERT_TRUE(s.cosine.has_value());
  for (double c : *s.cosine) EXPECT_NEAR(c, 1.0, 1e-15);
  EXPECT_FALSE(stealth_metrics(same, nullptr, 1).cosine.has_value());
}

TEST(StealthTest, MatchesKrumScores) {
  std::vector<ParamVector> u;
  for (int i = 0; i < 9; ++i) {
    u.push_back(ParamVector::from({0.1 * i * i, -0.3 * i, std::sin(static_cast<double>(i))}));
  }
  EXPECT_EQ(stealth_metrics(u, nullptr, 2).distance, krum_scores(u, krum_neighbors(9, 2)));
}

TEST(ExperimentTest, ZeroRounds) {
  ExperimentConfig c = small_config();
  c.rounds = 0;
  const ExperimentResult r = run_experiment(c);
  EXPECT_TRUE(r.rounds.empty());
  ASSERT_EQ(r.error_series.size(), 1u);
  EXPECT_EQ(r.final_model.flatten(),
            DenseNet::glorot_uniform(c.model_dims, derive_seed(c.seed, {tag_hash("init")}))
                .flatten());
  EXPECT_EQ(csv_text(r), std::string(kCsvHeader) + "\n");
}

TEST(ExperimentTest, CleanBaselineLearnsBlobs) {
  ExperimentConfig c;
  c.seed = 3;
  c.rounds = 100;
  c.malicious = 0;
  c.train = {1, 0.05, 32};
  const ExperimentResult r = run_experiment(c);
  ASSERT_EQ(r.error_series.size(), 101u);
  EXPECT_LT(r.error_series.back(), 0.10);
}

TEST(ExperimentTest, DeterministicLogs) {
  ExperimentConfig c = small_config();
  c.attack = AttackKind::kTrim;
  c.augment = true;
  c.defense.kind = DefenseKind::kFlTrust;
  const std::string a = csv_text(run_experiment(c));
  const std::string b = csv_text(run_experiment(c));
  EXPECT_EQ(a, b);
  c.seed = 6;
  EXPECT_NE(a, csv_text(run_experiment(c)));
}

TEST(ExperimentTest, RowAccountingUnderPartialParticipation) {
  ExperimentConfig c = small_config();
  c.participation = 0.5;
  c.attack = AttackKind::kSignFlip;
  const ExperimentResult r = run_experiment(c);
  std::size_t expected_rows = 0;
  for (int t = 0; t < c.rounds; ++t) {
    expected_rows += select_clients(t, c.clients, c.participation, c.seed).size();
    EXPECT_EQ(r.rounds[static_cast<std::size_t>(t)].clients.size(), 4u);
  }
  const std::string text = csv_text(r);
  EXPECT_EQ(static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')),
            expected_rows + 1);
  EXPECT_EQ(r.error_series.size(), static_cast<std::size_t>(c.rounds) + 1);
}

TEST(ExperimentTest, GroundTruthFlags) {
  ExperimentConfig c = small_config();
  c.attack = AttackKind::kTrim;
  c.defense.kind = DefenseKind::kMultiKrum;
  const ExperimentResult r = run_experiment(c);
  for (const auto& round : r.rounds) {
    for (const auto& rec : round.clients) {
      EXPECT_EQ(rec.is_malicious, rec.client_id < c.malicious);
      EXPECT_FALSE(rec.cosine_score.has_value());
    }
  }
}

TEST(ExperimentTest, BiasedRootSet) {
  ExperimentConfig c = small_config();
  c.dataset.root_size = 60;
  c.dataset.root_noniid = true;
  c.partition.p = 0.9;
  const TaskData task = load_task(c);
  ASSERT_EQ(task.partition.root_indices.size(), 60u);
  int home = 0;
  for (std::size_t i : task.partition.root_indices) home += task.train.labels[i] == 0;
  // Binomial(60, 0.9): mean 54, sd about 2.3.
  EXPECT_GE(home, 45);

  c.dataset.root_noniid = false;
  const TaskData plain = load_task(c);
  int plain_home = 0;
  for (std::size_t i : plain.partition.root_indices) plain_home += plain.train.labels[i] == 0;
  EXPECT_LE(plain_home, 35);

  c.dataset.root_noniid = true;
  c.partition.p = 0.2;
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(ExperimentTest, TrustRunsLogCosines) {
  ExperimentConfig c = small_config();
  c.attack = AttackKind::kTrim;
  c.augment = true;
  c.defense.kind = DefenseKind::kFlTrust;
  const ExperimentResult r = run_experiment(c);
  for (const auto& round : r.rounds) {
    EXPECT_TRUE(round.reference_cosine.has_value());
    for (const auto& rec : round.clients) EXPECT_TRUE(rec.cosine_score.has_value());
  }
}

TEST(ExperimentTest, InvalidConfigIsRejected) {
  ExperimentConfig c = small_config();
  c.malicious = 4;
  EXPECT_THROW(run_experiment(c), ConfigError);
}

TEST(ExperimentTest, MissingDataFiles) {
  ExperimentConfig c = small_config();
  c.dataset.kind = DatasetKind::kIdx;
  c.dataset.train_images = "/nonexistent/images";
  c.dataset.train_labels = "/nonexistent/labels";
  c.dataset.test_images = "/nonexistent/images";
  c.dataset.test_labels = "/nonexistent/labels";
  EXPECT_THROW(run_experiment(c), IoError);
}

TEST(ExperimentTest, StageErrorsCarryTheRound) {
  // Two participants are too few for Krum.
  ExperimentConfig c = small_config();
  c.participation = 0.25;
  c.defense.kind = DefenseKind::kKrum;
  try {
    run_experiment(c);
    ADD_FAILURE() << "expected a round error";
  } catch (const RoundError& e) {
    EXPECT_EQ(e.round(), 0);
    EXPECT_EQ(e.stage(), "aggregation");
    EXPECT_NE(std::string(e.what()).find("round 0, aggregation"), std::string::npos);
  }
}

TEST(LogsTest, HeaderOnlyForEmptyLog) {
  std::ostringstream out;
  write_csv(out, {});
  EXPECT_EQ(out.str(), std::string(kCsvHeader) + "\n");
}

TEST(LogsTest, CsvFields) {
  RoundLog log;
  log.round = 2;
  log.error_rate = 0.25;
  log.clients.push_back({7, true, false, 1.5, std::nullopt, 0.0});
  log.clients.push_back({8, false, true, 0.125, 0.5, 0.0});
  std::ostringstream out;
  write_csv(out, std::vector<RoundLog>{log});
  EXPECT_EQ(out.str(), std::string(kCsvHeader) +
                           "\n2,7,1,0,1.5,,0.25\n2,8,0,1,0.125,0.5,0.25\n");
}

TEST(LogsTest, SummaryRoundTrip) {
  ExperimentConfig c = small_config();
  c.rounds = 2;
  const ExperimentResult r = run_experiment(c);
  const fs::path dir = fs::temp_directory_path() / "pillfl_logs_test";
  fs::remove_all(dir);
  const LogPaths paths = write_logs(dir.string(), c, r);
  std::ifstream in(paths.summary);
  const nlohmann::json parsed = nlohmann::json::parse(in);
  EXPECT_EQ(parsed, make_summary(c, r));
  EXPECT_EQ(parsed["version"], version_string());
  EXPECT_EQ(parsed["seed"], c.seed);
  EXPECT_EQ(parsed["error_series"].size(), 3u);
  EXPECT_EQ(config_to_json(config_from_json(parsed["config"])), config_to_json(c));
  std::ifstream csv(paths.csv);
  std::string header;
  std::getline(csv, header);
  EXPECT_EQ(header, kCsvHeader);
  fs::remove_all(dir);
}

TEST(LogsTest, UnwritableDirectory) {
  ExperimentConfig c = small_config();
  c.rounds = 0;
  const ExperimentResult r = run_experiment(c);
  EXPECT_THROW(write_logs("/proc/pillfl/nope", c, r), IoError);
}

}  // namespace
}  // namespace pillfl
