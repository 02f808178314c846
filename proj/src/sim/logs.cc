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

#include "pillfl/sim/logs.h"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "pillfl/common/errors.h"

namespace pillfl {

namespace {

// Enough digits to parse back to the same double.
std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::string version_string() { return "pillfl 0.1.0"; }

void write_csv(std::ostream& out, std::span<const RoundLog> rounds) {
  out << kCsvHeader << '\n';
  for (const RoundLog& r : rounds) {
    const std::string err = format_double(r.error_rate);
    for (const ClientRecord& c : r.clients) {
      out << r.round << ',' << c.client_id << ',' << (c.is_malicious ? 1 : 0) << ','
          << (c.accepted ? 1 : 0) << ',' << format_double(c.distance_score) << ',';
      if (c.cosine_score) out << format_double(*c.cosine_score);
      out << ',' << err << '\n';
    }
  }
}

nlohmann::json make_summary(const ExperimentConfig& config,
                            const ExperimentResult& result) {
  nlohmann::json s;
  s["version"] = version_string();
  s["seed"] = config.seed;
  s["config"] = config_to_json(config);
  s["final_error"] = result.error_series.back();
  s["error_series"] = result.error_series;
  nlohmann::json ref = nlohmann::json::array();
  auto trace_json = [](const AdjustTrace& t) {
    return nlohmann::json{{"iterations", t.iterations},
                          {"threshold", t.threshold},
                          {"initial", t.initial},
                          {"final", t.final}};
  };
  nlohmann::json sim = nlohmann::json::array();
  nlohmann::json dist = nlohmann::json::array();
  for (const RoundLog& r : result.rounds) {
    ref.push_back(r.reference_cosine ? nlohmann::json(*r.reference_cosine)
                                     : nlohmann::json(nullptr));
    sim.push_back(trace_json(r.sim_trace));
    dist.push_back(trace_json(r.dist_trace));
  }
  s["diagnostics"] = {
      {"reference_cosine", ref}, {"sim_adjust", sim}, {"dist_adjust", dist}};
  return s;
}

LogPaths write_logs(const std::string& dir, const ExperimentConfig& config,
                    const ExperimentResult& result) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir + ": " + ec.message());
  LogPaths paths{(std::filesystem::path(dir) / "rounds.csv").string(),
                 (std::filesystem::path(dir) / "summary.json").string()};
  {
    std::ofstream csv(paths.csv, std::ios::binary);
    if (!csv) throw IoError("cannot write " + paths.csv);
    write_csv(csv, result.rounds);
    if (!csv) throw IoError("failed while writing " + paths.csv);
  }
  {
    std::ofstream js(paths.summary, std::ios::binary);
    if (!js) throw IoError("cannot write " + paths.summary);
    js << make_summary(config, result).dump(2) << '\n';
    if (!js) throw IoError("failed while writing " + paths.summary);
  }
  return paths;
}

}  // namespace pillfl
