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

#ifndef PILLFL_DEFENSES_DEFENSE_H_
#define PILLFL_DEFENSES_DEFENSE_H_

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>

#include "pillfl/defenses/aggregation.h"
#include "pillfl/defenses/detectors.h"
#include "pillfl/defenses/trust.h"

namespace pillfl {

enum class DefenseKind {
  kFedAvg,
  kKrum,
  kMultiKrum,
  kMedian,
  kTrim,
  kBulyan,
  kFlTrust,
  kDsTrust,
  kDnc,
  kFldLite,
  kFlameLite,
};

// Parses the `defense.kind` config names (fedavg, krum, mkrum, median, trim,
// bulyan, fltrust, dstrust, dnc, fld-lite, flame-lite).
DefenseKind parse_defense_kind(std::string_view name);
std::string_view defense_name(DefenseKind kind);

struct DefenseOptions {
  DefenseKind kind = DefenseKind::kFedAvg;
  // Number of attackers the rule assumes; < 0 means "use the true m".
  int m_assumed = -1;
  // Multi-Krum candidate count; < 0 means K - m.
  int mkrum_c = -1;
  // Trim parameter b; < 0 means m.
  int trim_b = -1;
  bool bulyan_relaxed = false;
  DncOptions dnc;
  int fld_window = 10;
  double flame_noise = 0.001;
};

// What the server sees in one round. Updates carry no provenance: which
// clients are malicious is never part of this struct.
struct RoundInput {
  std::span<const ParamVector> updates;
  std::span<const int> client_ids;
  std::span<const double> weights;
  // Reference update trained on the root set; required by trust rules.
  const ParamVector* server_update = nullptr;
  // Attacker count the rule should assume this round.
  int m = 0;
  std::uint64_t seed = 0;
};

class Defense {
 public:
  virtual ~Defense() = default;
  virtual AggregationResult aggregate(const RoundInput& input) = 0;
  virtual bool needs_server_update() const { return false; }
  virtual std::string_view name() const = 0;
};

std::unique_ptr<Defense> make_defense(const DefenseOptions& options);

}  // namespace pillfl

#endif  // PILLFL_DEFENSES_DEFENSE_H_
