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

#ifndef PILLFL_SIM_LOGS_H_
#define PILLFL_SIM_LOGS_H_

#include <ostream>
#include <span>
#include <string>

#include <nlohmann/json.hpp>

#include "pillfl/sim/config.h"
#include "pillfl/sim/experiment.h"

namespace pillfl {

inline constexpr char kCsvHeader[] =
    "round,client_id,is_malicious,accepted,distance_score,cosine_score,error_rate";

std::string version_string();

// One row per participating client per round. Missing cosine scores are
// written as empty fields.
void write_csv(std::ostream& out, std::span<const RoundLog> rounds);

nlohmann::json make_summary(const ExperimentConfig& config,
                            const ExperimentResult& result);

struct LogPaths {
  std::string csv;
  std::string summary;
};

// Writes `rounds.csv` and `summary.json` into `dir`, creating it if needed.
// Throws IoError when a file cannot be written.
LogPaths write_logs(const std::string& dir, const ExperimentConfig& config,
                    const ExperimentResult& result);

}  // namespace pillfl

#endif  // PILLFL_SIM_LOGS_H_
