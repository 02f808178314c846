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

#ifndef PILLFL_ATTACKS_ATTACKS_H_
#define PILLFL_ATTACKS_ATTACKS_H_

#include <cstdint>
#include <memory>
#include <string_view>
#include <vector>

#include "pillfl/nn/param_vector.h"

namespace pillfl {

enum class AttackKind { kNone, kSignFlip, kTrim, kKrum, kMinMax };

// Config names: none, sign_flip, trim, krum, min_max.
AttackKind parse_attack_kind(std::string_view name);
std::string_view attack_name(AttackKind kind);

enum class MinMaxDirection { kStd, kUnitVec, kSign };

struct AttackKnobs {
  // sign_flip
  double scale = 4.0;
  // trim: malicious value lies in [mu + lo*sigma, mu + hi*sigma] against
  // the sign of mu.
  double trim_low_sigma = 3.0;
  double trim_high_sigma = 4.0;
  // krum
  double lambda_max = 5.0;
  double lambda_min = 1e-5;
  int lambda_steps = 30;
  // min_max
  double gamma_max = 50.0;
  int gamma_steps = 20;
  MinMaxDirection direction = MinMaxDirection::kStd;
};

// Inputs of one attack invocation. Every attack is a deterministic function
// of this struct.
struct AttackContext {
  // The update the attack perturbs.
  ParamVector reference_update;
  // Honest updates of the compromised clients.
  std::vector<ParamVector> compromised_updates;
  int round = 0;
  int m = 0;
  AttackKnobs knobs;
  std::uint64_t seed = 0;
};

// -scale * reference.
ParamVector sign_flip(const AttackContext& ctx);

// Per coordinate, a value drawn uniformly from [mu+3s, mu+4s] when mu < 0
// and from [mu-4s, mu-3s] otherwise (mu, s: mean and population std of the
// compromised updates).
ParamVector trim_attack(const AttackContext& ctx);

// Largest lambda in (0, lambda_max] (bisection) such that the candidate
// -lambda * s / ||s||, with s the mean compromised update, is chosen by Krum
// over {candidate x m} + compromised updates. Candidates are listed first so
// they win ties. Falls back to lambda_min when no tested lambda succeeds and
// to sign_flip with scale 1 on the mean when ||s|| == 0.
ParamVector krum_attack(const AttackContext& ctx);

// Whether Krum (m assumed attackers, lowest index wins) picks a copy of
// `candidate` from {candidate x m} + compromised. Exposed for tests.
bool krum_accepts(const ParamVector& candidate,
                  const std::vector<ParamVector>& compromised, int m);

// mu + gamma * p with p the negated, unit-normalized coordinate-wise std and
// gamma the largest value in [0, gamma_max] found by bisection such that
// max_i ||out - u_i|| <= max_{i,k} ||u_i - u_k||.
ParamVector min_max_attack(const AttackContext& ctx);

// Uniform entry point used by the simulator and the pill pipeline.
class Attack {
 public:
  virtual ~Attack() = default;
  virtual ParamVector craft(const AttackContext& ctx) const = 0;
  virtual AttackKind kind() const = 0;
};

std::unique_ptr<Attack> make_attack(AttackKind kind);

}  // namespace pillfl

#endif  // PILLFL_ATTACKS_ATTACKS_H_
