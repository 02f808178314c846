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

#include "pillfl/pill/pill.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "pillfl/common/errors.h"

namespace pillfl {

Blueprint build_blueprint(const std::vector<int>& layer_dims, int num_classes) {
  const int layers = static_cast<int>(layer_dims.size()) - 1;
  if (layers < 3) {
    throw InvalidArgumentError("pill blueprint needs at least 3 linear layers");
  }
  if (num_classes < 1 || layer_dims.back() != num_classes) {
    throw InvalidArgumentError("output width must equal the class count");
  }
  if (layer_dims[static_cast<std::size_t>(layers - 1)] < num_classes) {
    throw InvalidArgumentError(
        "second-to-last layer needs at least num_classes units");
  }
  Blueprint bp;
  bp.widths.assign(static_cast<std::size_t>(layers), 1);
  bp.widths[static_cast<std::size_t>(layers - 2)] = num_classes;
  bp.widths[static_cast<std::size_t>(layers - 1)] = num_classes;
  return bp;
}

SearchRule parse_search_rule(std::string_view name) {
  if (name == "max") return SearchRule::kMax;
  if (name == "min") return SearchRule::kMin;
  throw ConfigError("unknown pill search rule '" + std::string(name) + "'");
}

void rerank_layers(const DenseNet& net, const Blueprint& blueprint,
                   std::vector<std::vector<int>>& selected, int first, int end,
                   const SearchOptions& options, SearchStats* stats) {
  const int layers = net.num_layers();
  first = std::max(first, 1);
  end = std::min(end, layers - 1);
  for (int l = first; l < end; ++l) {
    const auto& w = net.weights[static_cast<std::size_t>(l)];
    const auto& prev = selected[static_cast<std::size_t>(l - 1)];
    const auto units = static_cast<int>(w.rows());
    std::vector<double> score(static_cast<std::size_t>(units), 0.0);
    for (int k = 0; k < units; ++k) {
      double s = 0.0;
      for (int v : prev) s += options.signed_rank ? w(k, v) : std::abs(w(k, v));
      score[static_cast<std::size_t>(k)] = s;
    }
    if (stats != nullptr) stats->weight_terms += static_cast<std::size_t>(units) * prev.size();

    std::vector<int> order(static_cast<std::size_t>(units));
    std::iota(order.begin(), order.end(), 0);
    const bool want_max = options.rule == SearchRule::kMax;
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return want_max ? score[a] > score[b] : score[a] < score[b];
    });
    const int keep = blueprint.widths[static_cast<std::size_t>(l)];
    selected[static_cast<std::size_t>(l)].assign(order.begin(), order.begin() + keep);
  }
}

PillMasks pill_search(const DenseNet& net, const Blueprint& blueprint,
                      int start_neuron, const SearchOptions& options,
                      SearchStats* stats) {
  const int layers = net.num_layers();
  if (static_cast<int>(blueprint.widths.size()) != layers) {
    throw InvalidArgumentError("blueprint does not match the network depth");
  }
  if (start_neuron < 0 || start_neuron >= net.dims()[1]) {
    throw InvalidArgumentError("start neuron outside the first layer");
  }
  std::vector<std::vector<int>> selected(static_cast<std::size_t>(layers));
  selected[0] = {start_neuron};
  rerank_layers(net, blueprint, selected, 1, layers - 1, options, stats);
  auto& outputs = selected.back();
  outputs.resize(static_cast<std::size_t>(net.num_outputs()));
  std::iota(outputs.begin(), outputs.end(), 0);
  return build_pill_masks(net.layout(), std::move(selected));
}

PillMasks max_pill_search(const DenseNet& net, const Blueprint& blueprint,
                          int start_neuron) {
  return pill_search(net, blueprint, start_neuron, {SearchRule::kMax, false});
}

PillMasks min_pill_search(const DenseNet& net, const Blueprint& blueprint,
                          int start_neuron) {
  return pill_search(net, blueprint, start_neuron, {SearchRule::kMin, false});
}

PillMasks build_pill_masks(const ParamLayout& layout,
                           std::vector<std::vector<int>> selected) {
  const int layers = layout.num_layers();
  if (static_cast<int>(selected.size()) != layers || layers < 3) {
    throw InvalidArgumentError("selection does not match the layout depth");
  }
  PillMasks masks{ParamVector(layout), ParamVector(layout), {}, selected[0].at(0)};

  auto membership = [&](int l) {
    std::vector<bool> in(static_cast<std::size_t>(layout.fan_out(l)), false);
    for (int u : selected[static_cast<std::size_t>(l)]) in.at(static_cast<std::size_t>(u)) = true;
    return in;
  };

  // Layer 0: the start unit sees every input.
  const int start = masks.start_neuron;
  for (int c = 0; c < layout.fan_in(0); ++c) masks.pill[layout.weight_index(0, start, c)] = 1.0;
  masks.pill[layout.bias_index(0, start)] = 1.0;

  for (int l = 1; l < layers - 1; ++l) {
    const auto prev = membership(l - 1);
    const auto cur = membership(l);
    for (int k = 0; k < layout.fan_out(l); ++k) {
      for (int j = 0; j < layout.fan_in(l); ++j) {
        const bool from_pill = prev[static_cast<std::size_t>(j)];
        const bool to_pill = cur[static_cast<std::size_t>(k)];
        if (from_pill && to_pill) {
          masks.pill[layout.weight_index(l, k, j)] = 1.0;
        } else if (from_pill || to_pill) {
          masks.disconnect[layout.weight_index(l, k, j)] = 1.0;
        }
      }
      if (cur[static_cast<std::size_t>(k)]) masks.pill[layout.bias_index(l, k)] = 1.0;
    }
  }

  // Output pairing: ascending selected[L-2] unit i <-> output unit i.
  std::vector<int> paired = selected[static_cast<std::size_t>(layers - 2)];
  std::sort(paired.begin(), paired.end());
  const int last = layers - 1;
  const int outputs = layout.fan_out(last);
  if (static_cast<int>(paired.size()) != outputs) {
    throw InvalidArgumentError("second-to-last selection must hold one unit per output");
  }
  for (int o = 0; o < outputs; ++o) {
    for (int p = 0; p < outputs; ++p) {
      const std::size_t idx = layout.weight_index(last, o, paired[static_cast<std::size_t>(p)]);
      if (p == o) {
        masks.pill[idx] = 1.0;
      } else {
        masks.disconnect[idx] = 1.0;
      }
    }
  }
  masks.selected = std::move(selected);
  return masks;
}

std::size_t expected_pill_size(const Blueprint& blueprint, int input_dim) {
  const auto& w = blueprint.widths;
  const std::size_t layers = w.size();
  std::size_t count = static_cast<std::size_t>(input_dim) * w[0];
  for (std::size_t i = 1; i + 1 < layers; ++i) count += static_cast<std::size_t>(w[i - 1]) * w[i];
  count += static_cast<std::size_t>(w.back());
  for (std::size_t i = 0; i + 1 < layers; ++i) count += static_cast<std::size_t>(w[i]);
  return count;
}

ParamVector layer_range_mask(const ParamLayout& layout, int first, int end) {
  ParamVector mask(layout);
  first = std::max(first, 0);
  end = std::min(end, layout.num_layers());
  if (first >= end) return mask;
  const std::size_t begin = layout.layer_offset(first);
  const std::size_t stop = end < layout.num_layers() ? layout.layer_offset(end) : layout.size();
  mask.values().segment(static_cast<Eigen::Index>(begin), static_cast<Eigen::Index>(stop - begin)).setOnes();
  return mask;
}

}  // namespace pillfl
