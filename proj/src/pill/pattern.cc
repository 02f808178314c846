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

#include "pillfl/pill/pattern.h"

#include <string>

#include "pillfl/common/errors.h"

namespace pillfl {

namespace {

bool segment_flag(SearchStrategy strategy, const PatternState& state,
                  const PatternRoundContext& ctx, int first, int end) {
  switch (strategy) {
    case SearchStrategy::kOneTime:
      return false;
    case SearchStrategy::kRepeated:
      return true;
    case SearchStrategy::kAdaptive: {
      if (ctx.global_update == nullptr || ctx.own_update == nullptr) return false;
      const ParamVector& pill = state.last_masks->pill;
      const ParamVector mask = pill.masked(layer_range_mask(pill.layout(), first, end));
      return should_research(mask, *ctx.global_update, *ctx.own_update,
                             state.c_search);
    }
  }
  return false;
}

}  // namespace

PatternSpec pattern_spec(int pattern_id) {
  using S = SearchStrategy;
  switch (pattern_id) {
    case 1: return {S::kAdaptive, S::kAdaptive};
    case 2: return {S::kOneTime, S::kOneTime};
    case 3: return {S::kAdaptive, S::kRepeated};
    case 4: return {S::kRepeated, S::kAdaptive};
    case 5: return {S::kAdaptive, S::kOneTime};
    case 6: return {S::kOneTime, S::kAdaptive};
    default: break;
  }
  throw InvalidArgumentError("pattern id must be in 1..6, got " +
                             std::to_string(pattern_id));
}

bool should_research(const ParamVector& mask, const ParamVector& global_update,
                     const ParamVector& own_update, double threshold) {
  return cosine_similarity(global_update.masked(mask), own_update.masked(mask)) <
         threshold;
}

int default_fe_boundary(int num_layers) { return (num_layers + 1) / 2; }

SearchFlags pattern_step(const PatternState& state,
                         const PatternRoundContext& ctx) {
  const PatternSpec spec = pattern_spec(state.pattern_id);
  if (!state.last_masks.has_value()) return {true, true};
  const int layers = state.last_masks->pill.layout().num_layers();
  if (state.fe_boundary < 1 || state.fe_boundary >= layers) {
    throw InvalidArgumentError("FE boundary must lie in [1, L)");
  }
  return {segment_flag(spec.fe, state, ctx, 0, state.fe_boundary),
          segment_flag(spec.cls, state, ctx, state.fe_boundary, layers)};
}

PillMasks refresh_pill(const DenseNet& net, const Blueprint& blueprint,
                       const PatternState& state, SearchFlags flags,
                       int start_neuron, const SearchOptions& options) {
  if (!state.last_masks.has_value()) {
    return pill_search(net, blueprint, start_neuron, options);
  }
  if (!flags.fe && !flags.cls) return *state.last_masks;
  auto selected = state.last_masks->selected;
  const int layers = net.num_layers();
  if (flags.fe) rerank_layers(net, blueprint, selected, 1, state.fe_boundary, options);
  if (flags.cls) rerank_layers(net, blueprint, selected, state.fe_boundary, layers - 1, options);
  return build_pill_masks(net.layout(), std::move(selected));
}

}  // namespace pillfl
