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

#ifndef PILLFL_PILL_PILL_H_
#define PILLFL_PILL_PILL_H_

#include <cstddef>
#include <string_view>
#include <vector>

#include "pillfl/nn/dense_net.h"
#include "pillfl/nn/param_vector.h"

namespace pillfl {

// Pill neuron count per linear layer: one neuron per layer except the last
// two, which hold one neuron per class.
struct Blueprint {
  std::vector<int> widths;
};

// Requires at least three linear layers, an output width equal to
// num_classes, and at least num_classes units in the second-to-last layer.
Blueprint build_blueprint(const std::vector<int>& layer_dims, int num_classes);

enum class SearchRule { kMax, kMin };

SearchRule parse_search_rule(std::string_view name);

struct SearchOptions {
  SearchRule rule = SearchRule::kMax;
  // Rank by raw weight sums instead of absolute-value sums.
  bool signed_rank = false;
};

// Pill and disconnection masks over a parameter layout plus the selected
// units. selected[l] lists the chosen output units of linear layer l in
// rank order; selected[0] is {start_neuron} and selected.back() is every
// output unit.
struct PillMasks {
  ParamVector pill;
  ParamVector disconnect;
  std::vector<std::vector<int>> selected;
  int start_neuron = 0;

  // pill + disconnect.
  ParamVector all() const { return pill + disconnect; }
};

struct SearchStats {
  // Number of |weight| terms summed while ranking.
  std::size_t weight_terms = 0;
};

// Layer-wise pill search from a fixed start unit of the first layer.
// Hidden layer l (1 <= l <= L-2) keeps the widths[l] units with the largest
// (kMax) or smallest (kMin) sum of |W_l[k, v]| over v in selected[l-1];
// ties go to the lower index.
PillMasks pill_search(const DenseNet& net, const Blueprint& blueprint,
                      int start_neuron, const SearchOptions& options = {},
                      SearchStats* stats = nullptr);

PillMasks max_pill_search(const DenseNet& net, const Blueprint& blueprint,
                          int start_neuron);
PillMasks min_pill_search(const DenseNet& net, const Blueprint& blueprint,
                          int start_neuron);

// Re-ranks layers [first, end) starting from selected[first - 1], which is
// left untouched. Layers outside the range keep their current selection.
void rerank_layers(const DenseNet& net, const Blueprint& blueprint,
                   std::vector<std::vector<int>>& selected, int first, int end,
                   const SearchOptions& options, SearchStats* stats = nullptr);

// Builds both masks from a selection.
//
// pill: every input weight of the start unit; weights selected[l-1] ->
// selected[l] for hidden layers; the one-to-one pairing of the ascending
// selected[L-2] units with output units 0..C-1; biases of all selected
// non-output units.
//
// disconnect: for each hidden layer l >= 1, weights from unselected units
// into selected[l] and from selected[l-1] into unselected units; in the last
// layer, the off-pairing weights between selected[L-2] and the outputs.
PillMasks build_pill_masks(const ParamLayout& layout,
                           std::vector<std::vector<int>> selected);

// Expected number of ones in the pill mask for a blueprint and input width.
std::size_t expected_pill_size(const Blueprint& blueprint, int input_dim);

// Mask selecting every parameter (weights and biases) of linear layers
// [first, end).
ParamVector layer_range_mask(const ParamLayout& layout, int first, int end);

}  // namespace pillfl

#endif  // PILLFL_PILL_PILL_H_
