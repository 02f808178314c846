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

#ifndef PILLFL_COMMON_RNG_H_
#define PILLFL_COMMON_RNG_H_

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>

namespace pillfl {

using Rng = std::mt19937_64;

// Stable 64-bit hash of a tag, for naming seed streams ("train", "server").
std::uint64_t tag_hash(std::string_view tag);

// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

// Derives a child seed from a base seed and an ordered list of integer
// components (client id, round, ...). Used so that every stochastic step has
// its own stream and results do not depend on execution order.
std::uint64_t derive_seed(std::uint64_t base,
                          std::initializer_list<std::uint64_t> parts);

// Seed of a per-client, per-round stochastic step (local training, attack
// sampling). Shared by the simulator and the malicious coalition so that a
// compromised client's honest update is the one it would have uploaded.
inline std::uint64_t client_round_seed(std::uint64_t master,
                                       std::string_view stream, int client,
                                       int round) {
  return derive_seed(master, {tag_hash(stream), static_cast<std::uint64_t>(client),
                              static_cast<std::uint64_t>(round)});
}

// Uniform double in [0, 1) using the top 53 bits of one draw.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace pillfl

#endif  // PILLFL_COMMON_RNG_H_
