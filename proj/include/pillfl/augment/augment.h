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

#ifndef PILLFL_AUGMENT_AUGMENT_H_
#define PILLFL_AUGMENT_AUGMENT_H_

#include <cstdint>
#include <span>

#include "pillfl/attacks/attacks.h"
#include "pillfl/nn/dense_net.h"
#include "pillfl/nn/param_vector.h"
#include "pillfl/pill/pill.h"

namespace pillfl {

struct AugmentParams {
  // Extra training epochs on the pooled coalition data; < 0 means m * E.
  int e_extra = -1;
  int c_iter = 20;
  double c_up = 2.0;
  double c_down = 0.5;
  // Relative zero-mean noise added outside M_all to each upload.
  double jitter = 0.0;

  // Throws InvalidArgumentError unless c_up > 1, 0 < c_down < 1, c_iter >= 1
  // and jitter >= 0.
  void validate() const;
};

// Reference update g - g_hat, where g_hat is g trained for `epochs` epochs on
// the pooled coalition data.
ParamVector extra_train(const DenseNet& global, const Matrix& x,
                        std::span<const int> labels, int epochs,
                        const TrainOptions& base, std::uint64_t seed);

// Coordinate-wise mean of the coalition's honest updates.
ParamVector estimate_benign(std::span<const ParamVector> normal_updates);

// pill_mask . attack(ctx).
ParamVector pill_poison(const Attack& attack, const AttackContext& ctx,
                        const ParamVector& pill_mask);

// Per coordinate: clamp(g_t, min(reference), max(reference)). Subtracting it
// from g_t moves every parameter towards zero by at most the reference
// update's largest step.
ParamVector disconnection_update(const ParamVector& global_params,
                                 const ParamVector& reference);

// poisoned + (1 - M) . benign, with the M_disc coordinates replaced by the
// disconnection update.
ParamVector inject(const ParamVector& poisoned, const ParamVector& benign,
                   const ParamVector& reference,
                   const ParamVector& global_params, const PillMasks& masks);

struct AdjustTrace {
  int iterations = 0;
  double threshold = 0.0;  // S_max or Dist_max
  double initial = 0.0;    // cosine or distance before adjusting
  double final = 0.0;
};

// Alternately shrinks the M_all part by c_down (even iterations) and grows
// the rest by c_up (odd iterations) while cos(benign, update) < S_max and
// fewer than c_iter iterations ran. S_max = max(0, max_i cos(benign, u_i)).
ParamVector sim_adjust(ParamVector update, const ParamVector& benign,
                       std::span<const ParamVector> normal_updates,
                       const ParamVector& m_all, const AugmentParams& params,
                       AdjustTrace* trace = nullptr);

// Scales the whole update by whichever of c_down / c_up brings it closer to
// the benign estimate, repeating while the distance is at least Dist_max =
// max_i ||u_i - benign|| and the next step strictly shrinks the distance.
ParamVector dist_adjust(ParamVector update, const ParamVector& benign,
                        std::span<const ParamVector> normal_updates,
                        const AugmentParams& params,
                        AdjustTrace* trace = nullptr);

}  // namespace pillfl

#endif  // PILLFL_AUGMENT_AUGMENT_H_
