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

#include "pillfl/attacks/attacks.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <utility>

#include "pillfl/common/errors.h"
#include "pillfl/common/rng.h"
#include "pillfl/defenses/aggregation.h"

namespace pillfl {

namespace {

constexpr std::array<std::pair<AttackKind, std::string_view>, 5> kNames = {{
    {AttackKind::kNone, "none"},
    {AttackKind::kSignFlip, "sign_flip"},
    {AttackKind::kTrim, "trim"},
    {AttackKind::kKrum, "krum"},
    {AttackKind::kMinMax, "min_max"},
}};

void require_compromised(const AttackContext& ctx, std::size_t minimum,
                         const char* who) {
  if (ctx.compromised_updates.size() < minimum) {
    throw InvalidArgumentError(std::string(who) + " needs at least " +
                               std::to_string(minimum) +
                               " compromised updates");
  }
  for (const auto& u : ctx.compromised_updates) {
    require_same_shape(ctx.compromised_updates.front(), u);
  }
}

// Coordinate-wise population standard deviation.
ParamVector coordinate_std(const std::vector<ParamVector>& updates,
                           const ParamVector& mean) {
  ParamVector var(mean.layout());
  for (const auto& u : updates) {
    var.values().array() += (u.values() - mean.values()).array().square();
  }
  var.values() = (var.values() / static_cast<double>(updates.size())).cwiseSqrt();
  return var;
}

template <AttackKind K, ParamVector (*Fn)(const AttackContext&)>
class FnAttack : public Attack {
 public:
  ParamVector craft(const AttackContext& ctx) const override { return Fn(ctx); }
  AttackKind kind() const override { return K; }
};

ParamVector no_attack(const AttackContext& ctx) { return ctx.reference_update; }

}  // namespace

AttackKind parse_attack_kind(std::string_view name) {
  for (const auto& [kind, n] : kNames) {
    if (n == name) return kind;
  }
  throw ConfigError("unknown attack kind '" + std::string(name) + "'");
}

std::string_view attack_name(AttackKind kind) {
  for (const auto& [k, n] : kNames) {
    if (k == kind) return n;
  }
  return "unknown";
}

ParamVector sign_flip(const AttackContext& ctx) {
  if (!(ctx.knobs.scale > 0.0)) throw InvalidArgumentError("sign_flip scale must be > 0");
  return -ctx.knobs.scale * ctx.reference_update;
}

ParamVector trim_attack(const AttackContext& ctx) {
  require_compromised(ctx, 1, "trim attack");
  const ParamVector mu = mean_update(ctx.compromised_updates);
  const ParamVector sigma = coordinate_std(ctx.compromised_updates, mu);
  const double lo = ctx.knobs.trim_low_sigma;
  const double hi = ctx.knobs.trim_high_sigma;
  Rng rng(ctx.seed);
  ParamVector out(mu.layout());
  for (std::size_t j = 0; j < mu.size(); ++j) {
    const double u = uniform01(rng);
    const double offset = (lo + (hi - lo) * u) * sigma[j];
    out[j] = mu[j] < 0.0 ? mu[j] + offset : mu[j] - offset;
  }
  return out;
}

bool krum_accepts(const ParamVector& candidate,
                  const std::vector<ParamVector>& compromised, int m) {
  std::vector<ParamVector> pool;
  pool.reserve(compromised.size() + static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) pool.push_back(candidate);
  pool.insert(pool.end(), compromised.begin(), compromised.end());
  const int n = static_cast<int>(pool.size());
  const int neighbors = std::max(1, krum_neighbors(n, m));
  const auto scores = krum_scores(pool, neighbors);
  const auto pick = static_cast<std::size_t>(
      std::min_element(scores.begin(), scores.end()) - scores.begin());
  return pick < static_cast<std::size_t>(m);
}

ParamVector krum_attack(const AttackContext& ctx) {
  require_compromised(ctx, 1, "krum attack");
  const ParamVector s = mean_update(ctx.compromised_updates);
  const double s_norm = s.norm();
  if (s_norm == 0.0) {
    AttackContext flipped = ctx;
    flipped.reference_update = s;
    flipped.knobs.scale = 1.0;
    return sign_flip(flipped);
  }
  const ParamVector direction = (-1.0 / s_norm) * s;
  const int m = std::max(1, ctx.m);
  auto candidate = [&](double lambda) { return lambda * direction; };

  const double lambda_max = ctx.knobs.lambda_max;
  if (krum_accepts(candidate(lambda_max), ctx.compromised_updates, m)) {
    return candidate(lambda_max);
  }
  double lo = 0.0;
  double hi = lambda_max;
  bool found = false;
  for (int step = 0; step < ctx.knobs.lambda_steps; ++step) {
    const double mid = 0.5 * (lo + hi);
    if (krum_accepts(candidate(mid), ctx.compromised_updates, m)) {
      lo = mid;
      found = true;
    } else {
      hi = mid;
    }
  }
  return candidate(found ? lo : ctx.knobs.lambda_min);
}

ParamVector min_max_attack(const AttackContext& ctx) {
  require_compromised(ctx, 2, "min-max attack");
  const auto& us = ctx.compromised_updates;
  const ParamVector mu = mean_update(us);

  double max_pair = 0.0;
  for (std::size_t i = 0; i < us.size(); ++i) {
    for (std::size_t k = i + 1; k < us.size(); ++k) {
      max_pair = std::max(max_pair, euclidean_distance(us[i], us[k]));
    }
  }
  if (max_pair == 0.0) return mu;

  ParamVector dir(mu.layout());
  switch (ctx.knobs.direction) {
    case MinMaxDirection::kStd:
      dir = -1.0 * coordinate_std(us, mu);
      break;
    case MinMaxDirection::kUnitVec:
      dir = -1.0 * mu;
      break;
    case MinMaxDirection::kSign:
      dir = ParamVector(mu.layout(), -mu.values().cwiseSign());
      break;
  }
  const double dn = dir.norm();
  if (dn == 0.0) return mu;
  dir *= 1.0 / dn;

  auto feasible = [&](double gamma) {
    const ParamVector out = mu + gamma * dir;
    for (const auto& u : us) {
      if (euclidean_distance(out, u) > max_pair) return false;
    }
    return true;
  };
  double lo = 0.0;
  double hi = ctx.knobs.gamma_max;
  if (feasible(hi)) {
    lo = hi;
  } else {
    for (int step = 0; step < ctx.knobs.gamma_steps; ++step) {
      const double mid = 0.5 * (lo + hi);
      if (feasible(mid)) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
  }
  return mu + lo * dir;
}

std::unique_ptr<Attack> make_attack(AttackKind kind) {
  switch (kind) {
    case AttackKind::kNone:
      return std::make_unique<FnAttack<AttackKind::kNone, no_attack>>();
    case AttackKind::kSignFlip:
      return std::make_unique<FnAttack<AttackKind::kSignFlip, sign_flip>>();
    case AttackKind::kTrim:
      return std::make_unique<FnAttack<AttackKind::kTrim, trim_attack>>();
    case AttackKind::kKrum:
      return std::make_unique<FnAttack<AttackKind::kKrum, krum_attack>>();
    case AttackKind::kMinMax:
      return std::make_unique<FnAttack<AttackKind::kMinMax, min_max_attack>>();
  }
  throw InvalidArgumentError("unknown attack kind");
}

}  // namespace pillfl
