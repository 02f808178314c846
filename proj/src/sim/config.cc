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

#include "pillfl/sim/config.h"

#include <cmath>
#include <fstream>
#include <sstream>

#include "pillfl/common/errors.h"

namespace pillfl {

namespace {

using nlohmann::json;

std::string direction_name(MinMaxDirection d) {
  switch (d) {
    case MinMaxDirection::kStd:
      return "std";
    case MinMaxDirection::kUnitVec:
      return "unit_vec";
    case MinMaxDirection::kSign:
      return "sign";
  }
  return "std";
}

MinMaxDirection parse_direction(const std::string& name) {
  if (name == "std") return MinMaxDirection::kStd;
  if (name == "unit_vec") return MinMaxDirection::kUnitVec;
  if (name == "sign") return MinMaxDirection::kSign;
  throw ConfigError("unknown min_max direction: " + name);
}

void check_keys(const json& given, const json& known, const std::string& prefix) {
  if (!given.is_object()) throw ConfigError("expected an object at '" + prefix + "'");
  for (const auto& [key, value] : given.items()) {
    const std::string path = prefix.empty() ? key : prefix + "." + key;
    if (!known.contains(key)) throw ConfigError("unknown config key: " + path);
    if (known.at(key).is_object()) check_keys(value, known.at(key), path);
  }
}

template <typename T>
T read(const json& tree, const char* section, const char* key) {
  const json& node = section == nullptr ? tree.at(key) : tree.at(section).at(key);
  try {
    return node.get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad value for ") +
                      (section == nullptr ? "" : std::string(section) + ".") + key +
                      ": " + e.what());
  }
}

json parse_scalar(const std::string& text) {
  json parsed = json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (parsed.is_discarded()) return json(text);
  return parsed;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (rounds < 0) throw ConfigError("rounds must be >= 0");
  if (clients < 1) throw ConfigError("clients must be >= 1");
  if (malicious < 0 || 2 * malicious >= clients) {
    throw ConfigError("malicious must satisfy 0 <= m < K/2");
  }
  if (!(participation > 0.0 && participation <= 1.0)) {
    throw ConfigError("participation must lie in (0, 1]");
  }
  if (train.epochs < 1) throw ConfigError("train.epochs must be >= 1");
  if (!(train.lr > 0.0)) throw ConfigError("train.lr must be positive");
  if (model_dims.size() < 2) throw ConfigError("model.dims needs at least two entries");
  for (int d : model_dims) {
    if (d < 1) throw ConfigError("model.dims entries must be positive");
  }
  if (dataset.kind == DatasetKind::kBlobs) {
    if (dataset.classes < 2 || dataset.n_per_class < 1 || dataset.test_per_class < 1 ||
        dataset.dim < 1 || !(dataset.spread > 0.0)) {
      throw ConfigError("invalid blobs dataset parameters");
    }
    if (model_dims.front() != dataset.dim) {
      throw ConfigError("model input width does not match dataset.dim");
    }
    if (model_dims.back() != dataset.classes) {
      throw ConfigError("model output width does not match dataset.classes");
    }
  } else if (dataset.train_images.empty() || dataset.train_labels.empty() ||
             dataset.test_images.empty() || dataset.test_labels.empty()) {
    throw ConfigError("idx dataset needs train/test image and label paths");
  }
  if (dataset.root_size < 0) throw ConfigError("dataset.root_size must be >= 0");
  if ((defense.kind == DefenseKind::kFlTrust || defense.kind == DefenseKind::kDsTrust) &&
      dataset.root_size == 0) {
    throw ConfigError("trust-based defenses need dataset.root_size > 0");
  }
  if (partition.kind == PartitionKind::kNonIid || dataset.root_noniid) {
    const int classes = model_dims.back();
    if (!(partition.p >= 1.0 / classes - 1e-12 && partition.p <= 1.0)) {
      throw ConfigError("partition.p must lie in [1/C, 1]");
    }
  }
  if (partition.kind == PartitionKind::kNonIid && clients < model_dims.back()) {
    throw ConfigError("non-IID split needs clients >= classes");
  }
  if (defense.kind == DefenseKind::kBulyan && !defense.bulyan_relaxed) {
    const int m = defense.m_assumed >= 0 ? defense.m_assumed : malicious;
    const int k = static_cast<int>(std::ceil(participation * clients));
    if (k < 4 * m + 3) {
      throw ConfigError("bulyan requires K >= 4m + 3; set defense.bulyan_relaxed");
    }
  }
  if (pill_pattern < 1 || pill_pattern > 6) throw ConfigError("pill.pattern must be 1..6");
  if (!(pill_c_search >= -1.0 && pill_c_search <= 1.0)) {
    throw ConfigError("pill.c_search must lie in [-1, 1]");
  }
  if (augment && attack != AttackKind::kNone) {
    if (model_dims.size() < 4) throw ConfigError("pill needs at least three linear layers");
    const int layers = static_cast<int>(model_dims.size()) - 1;
    if (pill_fe_boundary >= layers) throw ConfigError("pill.fe_boundary must be < L");
  }
  try {
    augment_params.validate();
  } catch (const InvalidArgumentError& e) {
    throw ConfigError(std::string("augment: ") + e.what());
  }
}

json config_to_json(const ExperimentConfig& c) {
  json t;
  t["name"] = c.name;
  t["seed"] = c.seed;
  t["rounds"] = c.rounds;
  t["clients"] = c.clients;
  t["malicious"] = c.malicious;
  t["shuffle_malicious"] = c.shuffle_malicious;
  t["participation"] = c.participation;
  t["train"] = {{"epochs", c.train.epochs},
                {"lr", c.train.lr},
                {"batch_size", c.train.batch_size}};
  t["model"] = {{"dims", c.model_dims}};
  t["dataset"] = {{"kind", c.dataset.kind == DatasetKind::kBlobs ? "blobs" : "idx"},
                  {"classes", c.dataset.classes},
                  {"n_per_class", c.dataset.n_per_class},
                  {"test_per_class", c.dataset.test_per_class},
                  {"dim", c.dataset.dim},
                  {"spread", c.dataset.spread},
                  {"data_dir", c.dataset.data_dir},
                  {"train_images", c.dataset.train_images},
                  {"train_labels", c.dataset.train_labels},
                  {"test_images", c.dataset.test_images},
                  {"test_labels", c.dataset.test_labels},
                  {"root_size", c.dataset.root_size},
                  {"root_noniid", c.dataset.root_noniid}};
  t["partition"] = {{"kind", c.partition.kind == PartitionKind::kIid ? "iid" : "noniid"},
                    {"p", c.partition.p}};
  const AttackKnobs& k = c.attack_knobs;
  t["attack"] = {{"kind", std::string(attack_name(c.attack))},
                 {"scale", k.scale},
                 {"trim_low_sigma", k.trim_low_sigma},
                 {"trim_high_sigma", k.trim_high_sigma},
                 {"lambda_max", k.lambda_max},
                 {"lambda_min", k.lambda_min},
                 {"lambda_steps", k.lambda_steps},
                 {"gamma_max", k.gamma_max},
                 {"gamma_steps", k.gamma_steps},
                 {"direction", direction_name(k.direction)}};
  const DefenseOptions& d = c.defense;
  t["defense"] = {{"kind", std::string(defense_name(d.kind))},
                  {"m_assumed", d.m_assumed},
                  {"mkrum_c", d.mkrum_c},
                  {"trim_b", d.trim_b},
                  {"bulyan_relaxed", d.bulyan_relaxed},
                  {"dnc_iterations", d.dnc.iterations},
                  {"dnc_subsample", d.dnc.subsample},
                  {"dnc_filter_frac", d.dnc.filter_frac},
                  {"fld_window", d.fld_window},
                  {"flame_noise", d.flame_noise}};
  t["pill"] = {{"pattern", c.pill_pattern},
               {"search", c.pill_search.rule == SearchRule::kMax ? "max" : "min"},
               {"c_search", c.pill_c_search},
               {"fe_boundary", c.pill_fe_boundary},
               {"signed_rank", c.pill_search.signed_rank}};
  const AugmentParams& a = c.augment_params;
  t["augment"] = {{"enabled", c.augment}, {"c_up", a.c_up},       {"c_down", a.c_down},
                  {"c_iter", a.c_iter},   {"e_extra", a.e_extra}, {"jitter", a.jitter}};
  t["output"] = {{"dir", c.out_dir}};
  return t;
}

ExperimentConfig config_from_json(const json& tree) {
  const json defaults = config_to_json(ExperimentConfig{});
  check_keys(tree, defaults, "");
  json t = defaults;
  t.merge_patch(tree);

  ExperimentConfig c;
  c.name = read<std::string>(t, nullptr, "name");
  c.seed = read<std::uint64_t>(t, nullptr, "seed");
  c.rounds = read<int>(t, nullptr, "rounds");
  c.clients = read<int>(t, nullptr, "clients");
  c.malicious = read<int>(t, nullptr, "malicious");
  c.shuffle_malicious = read<bool>(t, nullptr, "shuffle_malicious");
  c.participation = read<double>(t, nullptr, "participation");
  c.train.epochs = read<int>(t, "train", "epochs");
  c.train.lr = read<double>(t, "train", "lr");
  c.train.batch_size = read<int>(t, "train", "batch_size");
  c.model_dims = read<std::vector<int>>(t, "model", "dims");

  const auto dataset_kind = read<std::string>(t, "dataset", "kind");
  if (dataset_kind == "blobs") {
    c.dataset.kind = DatasetKind::kBlobs;
  } else if (dataset_kind == "idx") {
    c.dataset.kind = DatasetKind::kIdx;
  } else {
    throw ConfigError("unknown dataset.kind: " + dataset_kind);
  }
  c.dataset.classes = read<int>(t, "dataset", "classes");
  c.dataset.n_per_class = read<int>(t, "dataset", "n_per_class");
  c.dataset.test_per_class = read<int>(t, "dataset", "test_per_class");
  c.dataset.dim = read<int>(t, "dataset", "dim");
  c.dataset.spread = read<double>(t, "dataset", "spread");
  c.dataset.data_dir = read<std::string>(t, "dataset", "data_dir");
  c.dataset.train_images = read<std::string>(t, "dataset", "train_images");
  c.dataset.train_labels = read<std::string>(t, "dataset", "train_labels");
  c.dataset.test_images = read<std::string>(t, "dataset", "test_images");
  c.dataset.test_labels = read<std::string>(t, "dataset", "test_labels");
  c.dataset.root_size = read<int>(t, "dataset", "root_size");
  c.dataset.root_noniid = read<bool>(t, "dataset", "root_noniid");

  const auto partition_kind = read<std::string>(t, "partition", "kind");
  if (partition_kind == "iid") {
    c.partition.kind = PartitionKind::kIid;
  } else if (partition_kind == "noniid") {
    c.partition.kind = PartitionKind::kNonIid;
  } else {
    throw ConfigError("unknown partition.kind: " + partition_kind);
  }
  c.partition.p = read<double>(t, "partition", "p");

  c.attack = parse_attack_kind(read<std::string>(t, "attack", "kind"));
  c.defense.kind = parse_defense_kind(read<std::string>(t, "defense", "kind"));
  c.pill_search.rule = parse_search_rule(read<std::string>(t, "pill", "search"));
  AttackKnobs& k = c.attack_knobs;
  k.scale = read<double>(t, "attack", "scale");
  k.trim_low_sigma = read<double>(t, "attack", "trim_low_sigma");
  k.trim_high_sigma = read<double>(t, "attack", "trim_high_sigma");
  k.lambda_max = read<double>(t, "attack", "lambda_max");
  k.lambda_min = read<double>(t, "attack", "lambda_min");
  k.lambda_steps = read<int>(t, "attack", "lambda_steps");
  k.gamma_max = read<double>(t, "attack", "gamma_max");
  k.gamma_steps = read<int>(t, "attack", "gamma_steps");
  k.direction = parse_direction(read<std::string>(t, "attack", "direction"));

  DefenseOptions& d = c.defense;
  d.m_assumed = read<int>(t, "defense", "m_assumed");
  d.mkrum_c = read<int>(t, "defense", "mkrum_c");
  d.trim_b = read<int>(t, "defense", "trim_b");
  d.bulyan_relaxed = read<bool>(t, "defense", "bulyan_relaxed");
  d.dnc.iterations = read<int>(t, "defense", "dnc_iterations");
  d.dnc.subsample = read<int>(t, "defense", "dnc_subsample");
  d.dnc.filter_frac = read<double>(t, "defense", "dnc_filter_frac");
  d.fld_window = read<int>(t, "defense", "fld_window");
  d.flame_noise = read<double>(t, "defense", "flame_noise");

  c.pill_pattern = read<int>(t, "pill", "pattern");
  c.pill_c_search = read<double>(t, "pill", "c_search");
  c.pill_fe_boundary = read<int>(t, "pill", "fe_boundary");
  c.pill_search.signed_rank = read<bool>(t, "pill", "signed_rank");

  c.augment = read<bool>(t, "augment", "enabled");
  AugmentParams& a = c.augment_params;
  a.c_up = read<double>(t, "augment", "c_up");
  a.c_down = read<double>(t, "augment", "c_down");
  a.c_iter = read<int>(t, "augment", "c_iter");
  a.e_extra = read<int>(t, "augment", "e_extra");
  a.jitter = read<double>(t, "augment", "jitter");
  c.out_dir = read<std::string>(t, "output", "dir");

  c.validate();
  return c;
}

json load_config_tree(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  json tree = json::parse(in, nullptr, /*allow_exceptions=*/false);
  if (tree.is_discarded()) throw ConfigError("malformed JSON in " + path);
  return tree;
}

void apply_override(json& tree, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError("override must look like key=value: " + assignment);
  }
  const std::string key = assignment.substr(0, eq);
  json* node = &tree;
  std::istringstream parts(key);
  std::string part;
  std::vector<std::string> path;
  while (std::getline(parts, part, '.')) {
    if (part.empty()) throw ConfigError("empty path segment in override: " + key);
    path.push_back(part);
  }
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    node = &(*node)[path[i]];
    if (!node->is_object()) {
      if (!node->is_null()) throw ConfigError("override path is not an object: " + key);
      *node = json::object();
    }
  }
  (*node)[path.back()] = parse_scalar(assignment.substr(eq + 1));
}

}  // namespace pillfl
