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

#ifndef PILLFL_DEFENSES_TRUST_H_
#define PILLFL_DEFENSES_TRUST_H_

#include <span>

#include "pillfl/defenses/aggregation.h"
#include "pillfl/nn/param_vector.h"

namespace pillfl {

// Trust-weighted aggregation against a server reference update trained on
// the root dataset. Each client update is rescaled to the reference norm and
// the rescaled updates are averaged with weights TS_i / sum(TS). When every
// trust score is zero the aggregate is the zero vector.
//
// FLTrust: TS_i = ReLU(cos(u_i, s)).
AggregationResult fltrust(std::span<const ParamVector> updates,
                          const ParamVector& server_update);

// DSTrust: TS_i = ReLU(cos(u_i, s) / ||u_i - s||). A client that matches the
// reference exactly (distance 0) receives the largest finite score of the
// round, or 1 if no finite positive score exists.
AggregationResult dstrust(std::span<const ParamVector> updates,
                          const ParamVector& server_update);

}  // namespace pillfl

#endif  // PILLFL_DEFENSES_TRUST_H_
