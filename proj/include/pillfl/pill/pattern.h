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

#ifndef PILLFL_PILL_PATTERN_H_
#define PILLFL_PILL_PATTERN_H_

#include <optional>

#include "pillfl/nn/dense_net.h"
#include "pillfl/nn/param_vector.h"
#include "pillfl/pill/pill.h"

namespace pillfl {

inline constexpr double kDefaultSearchThreshold = 0.94;

enum class SearchStrategy { kOneTime, kRepeated, kAdaptive };

// Strategy of the feature-extractor (FE) and classifier (CLS) segments.
struct PatternSpec {
  SearchStrategy fe;
  SearchStrategy cls;
};

// Patterns 1..6:
//   1 adaptive / adaptive    2 one-time / one-time
//   3 adaptive / repeated    4 repeated / adaptive
//   5 adaptive / one-time    6 one-time / adaptive
PatternSpec pattern_spec(int pattern_id);

// True iff cos(mask . global_update, mask . own_update) < threshold.
// A zero operand has similarity 0.
bool should_research(const ParamVector& mask, const ParamVector& global_update,
                     const ParamVector& own_update,
                     double threshold = kDefaultSearchThreshold);

struct PatternState {
  int pattern_id = 1;
  // Linear layers [0, fe_boundary) form FE, the rest CLS.
  int fe_boundary = 2;
  double c_search = kDefaultSearchThreshold;
  std::optional<PillMasks> last_masks;
};

// Default FE/CLS split for an L-layer MLP: ceil(L / 2).
int default_fe_boundary(int num_layers);

// What the coalition observed since its last upload.
struct PatternRoundContext {
  int round = 0;
  // Change of the global model since the coalition's last upload.
  const ParamVector* global_update = nullptr;
  // The coalition's last uploaded update.
  const ParamVector* own_update = nullptr;
};

struct SearchFlags {
  bool fe = false;
  bool cls = false;
};

// Decides which segments to re-search this round. Without previous masks
// both segments are searched.
SearchFlags pattern_step(const PatternState& state,
                         const PatternRoundContext& ctx);

// Applies the flags: a full search when no masks exist yet, otherwise a
// re-rank of the flagged segments with the other segment frozen. The CLS
// re-rank is seeded from the frozen last FE selection.
PillMasks refresh_pill(const DenseNet& net, const Blueprint& blueprint,
                       const PatternState& state, SearchFlags flags,
                       int start_neuron, const SearchOptions& options);

}  // namespace pillfl

#endif  // PILLFL_PILL_PATTERN_H_
