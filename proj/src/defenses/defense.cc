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

#include "pillfl/defenses/defense.h"

#include <algorithm>
#include <array>
#include <utility>

#include "pillfl/common/errors.h"

namespace pillfl {

namespace {

constexpr std::array<std::pair<DefenseKind, std::string_view>, 11> kNames = {{
    {DefenseKind::kFedAvg, "fedavg"},
    {DefenseKind::kKrum, "krum"},
    {DefenseKind::kMultiKrum, "mkrum"},
    {DefenseKind::kMedian, "median"},
    {DefenseKind::kTrim, "trim"},
    {DefenseKind::kBulyan, "bulyan"},
    {DefenseKind::kFlTrust, "fltrust"},
    {DefenseKind::kDsTrust, "dstrust"},
    {DefenseKind::kDnc, "dnc"},
    {DefenseKind::kFldLite, "fld-lite"},
    {DefenseKind::kFlameLite, "flame-lite"},
}};

int krum_m(const RoundInput& in, const DefenseOptions& o) {
  const int n = static_cast<int>(in.updates.size());
  const int m = o.m_assumed >= 0 ? o.m_assumed : in.m;
  return std::clamp(m, 0, std::max(0, n - 3));
}

class StatelessDefense : public Defense {
 public:
  StatelessDefense(DefenseOptions options) : options_(std::move(options)) {}

  AggregationResult aggregate(const RoundInput& in) override {
    const int n = static_cast<int>(in.updates.size());
    const int m = options_.m_assumed >= 0 ? options_.m_assumed : in.m;
    switch (options_.kind) {
      case DefenseKind::kFedAvg:
        return fedavg(in.updates, in.weights);
      case DefenseKind::kKrum: {
        const int mk = krum_m(in, options_);
        const std::size_t pick = krum_select(in.updates, mk);
        AggregationResult out;
        out.global_update = in.updates[pick];
        out.scores = krum_scores(in.updates, krum_neighbors(n, mk));
        out.accepted.assign(in.updates.size(), false);
        out.accepted[pick] = true;
        return out;
      }
      case DefenseKind::kMultiKrum: {
        const int mk = krum_m(in, options_);
        const int c = options_.mkrum_c > 0 ? std::min(options_.mkrum_c, n) : n - mk;
        return multi_krum(in.updates, mk, c);
      }
      case DefenseKind::kMedian:
        return coord_median(in.updates);
      case DefenseKind::kTrim: {
        const int b = options_.trim_b >= 0 ? options_.trim_b : m;
        return trim_mean(in.updates, std::clamp(b, 0, (n - 1) / 2));
      }
      case DefenseKind::kBulyan:
        return bulyan(in.updates, m, options_.bulyan_relaxed);
      case DefenseKind::kFlTrust:
      case DefenseKind::kDsTrust:
        if (in.server_update == nullptr) {
          throw InvalidArgumentError("trust aggregation needs a server update");
        }
        return options_.kind == DefenseKind::kFlTrust
                   ? fltrust(in.updates, *in.server_update)
                   : dstrust(in.updates, *in.server_update);
      case DefenseKind::kDnc:
        return dnc(in.updates, std::clamp(m, 0, n - 1), options_.dnc, in.seed);
      case DefenseKind::kFlameLite:
        return flame(in.updates, options_.flame_noise, in.seed);
      case DefenseKind::kFldLite:
        break;
    }
    throw InvalidArgumentError("unsupported stateless defense");
  }

  bool needs_server_update() const override {
    return options_.kind == DefenseKind::kFlTrust ||
           options_.kind == DefenseKind::kDsTrust;
  }

  std::string_view name() const override { return defense_name(options_.kind); }

 private:
  DefenseOptions options_;
};

class FldDefense : public Defense {
 public:
  explicit FldDefense(int window) : detector_(window) {}

  AggregationResult aggregate(const RoundInput& in) override {
    return detector_.aggregate(in.updates, in.client_ids, in.weights);
  }
  std::string_view name() const override { return "fld-lite"; }

 private:
  FlDetectorLite detector_;
};

}  // namespace

DefenseKind parse_defense_kind(std::string_view name) {
  for (const auto& [kind, n] : kNames) {
    if (n == name) return kind;
  }
  throw ConfigError("unknown defense kind '" + std::string(name) + "'");
}

std::string_view defense_name(DefenseKind kind) {
  for (const auto& [k, n] : kNames) {
    if (k == kind) return n;
  }
  return "unknown";
}

std::unique_ptr<Defense> make_defense(const DefenseOptions& options) {
  if (options.kind == DefenseKind::kFldLite) {
    return std::make_unique<FldDefense>(options.fld_window);
  }
  return std::make_unique<StatelessDefense>(options);
}

}  // namespace pillfl
