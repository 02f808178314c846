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

// Command-line front end: `pillfl run` and `pillfl sweep`.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pillfl/common/errors.h"
#include "pillfl/sim/config.h"
#include "pillfl/sim/experiment.h"
#include "pillfl/sim/logs.h"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct RunArgs {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::vector<std::string> overrides;
  bool root_noniid = false;
  bool quiet = false;
};

pillfl::ExperimentConfig build_config(const std::string& path,
                                      const std::vector<std::string>& overrides,
                                      std::optional<std::uint64_t> seed,
                                      const std::string& out, bool root_noniid) {
  nlohmann::json tree = pillfl::load_config_tree(path);
  for (const auto& o : overrides) pillfl::apply_override(tree, o);
  pillfl::ExperimentConfig config = pillfl::config_from_json(tree);
  if (seed) config.seed = *seed;
  if (!out.empty()) config.out_dir = out;
  if (root_noniid) config.dataset.root_noniid = true;
  return config;
}

void run_one(const pillfl::ExperimentConfig& config, bool quiet) {
  pillfl::RoundCallback progress;
  if (!quiet) {
    progress = [&config](const pillfl::RoundLog& r) {
      if ((r.round + 1) % 10 == 0 || r.round + 1 == config.rounds) {
        std::cerr << config.name << " round " << r.round + 1 << "/" << config.rounds
                  << " error " << r.error_rate << "\n";
      }
    };
  }
  const pillfl::ExperimentResult result = pillfl::run_experiment(config, progress);
  const pillfl::LogPaths paths = pillfl::write_logs(config.out_dir, config, result);
  std::cout << config.name << ": final error " << result.error_series.back() << " -> "
            << paths.csv << "\n";
}

template <typename Fn>
int guarded(Fn&& fn) {
  try {
    fn();
    return 0;
  } catch (const pillfl::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Federated learning poisoning simulator"};
  app.require_subcommand(1);

  RunArgs run;
  CLI::App* run_cmd = app.add_subcommand("run", "Run one experiment");
  run_cmd->add_option("--config", run.config, "JSON config file")->required();
  run_cmd->add_option("--seed", run.seed, "Master seed (overrides the config)");
  run_cmd->add_option("--out", run.out, "Output directory (overrides the config)");
  run_cmd->add_option("--override", run.overrides, "Dotted key=value override");
  run_cmd->add_flag("--root-noniid", run.root_noniid,
                    "Bias the server root set towards class 0");
  run_cmd->add_flag("--quiet", run.quiet, "Suppress progress output");

  std::string sweep_dir;
  std::string sweep_out;
  bool sweep_quiet = false;
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "Run every config in a directory");
  sweep_cmd->add_option("--configs", sweep_dir, "Directory of JSON configs")->required();
  sweep_cmd->add_option("--out", sweep_out, "Parent output directory");
  sweep_cmd->add_flag("--quiet", sweep_quiet, "Suppress progress output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  if (*run_cmd) {
    return guarded([&] {
      run_one(build_config(run.config, run.overrides, run.seed, run.out,
                           run.root_noniid),
              run.quiet);
    });
  }
  return guarded([&] {
    std::vector<std::filesystem::path> files;
    std::error_code ec;
    for (const auto& entry : std::filesystem::directory_iterator(sweep_dir, ec)) {
      if (entry.path().extension() == ".json") files.push_back(entry.path());
    }
    if (ec) throw pillfl::ConfigError("cannot list " + sweep_dir + ": " + ec.message());
    if (files.empty()) throw pillfl::ConfigError("no .json configs in " + sweep_dir);
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
      const std::string out =
          sweep_out.empty() ? "" : (std::filesystem::path(sweep_out) / f.stem()).string();
      run_one(build_config(f.string(), {}, std::nullopt, out, false), sweep_quiet);
    }
  });
}
