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

#ifndef PILLFL_DEFENSES_DETECTORS_H_
#define PILLFL_DEFENSES_DETECTORS_H_

#include <cstdint>
#include <deque>
#include <map>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "pillfl/defenses/aggregation.h"
#include "pillfl/nn/param_vector.h"

namespace pillfl {

// Unit-norm top right-singular vector of `a` by power iteration on a^T a,
// started from a seeded Gaussian vector.
Eigen::VectorXd top_singular_direction(const Eigen::MatrixXd& a,
                                       int iterations, std::uint64_t seed);

// One-dimensional 2-means. Returns the label (0 = low centroid, 1 = high
// centroid) of each value, or all zeros when the two centroids end up closer
// than `min_gap`.
std::vector<int> two_means_1d(std::span<const double> values,
                              double min_gap = 1e-9);

struct DncOptions {
  int iterations = 5;
  int subsample = 1000;
  int power_iterations = 50;
  // Each iteration rejects the ceil(filter_frac * m) highest scorers.
  double filter_frac = 1.0;
};

// Divide-and-conquer outlier removal: on random coordinate subsets, score
// each mean-centered update by its squared projection onto the top singular
// direction and reject the highest scorers. Updates with a zero score are
// never rejected, so identical inputs pass untouched. Falls back to the
// coordinate median if every client is rejected.
AggregationResult dnc(std::span<const ParamVector> updates, int m,
                      const DncOptions& options, std::uint64_t seed);

// First-order consistency detector. Each client's update is predicted by its
// previous-round update; the suspicion score is the rolling mean (over
// `window` rounds) of ||u_i(t) - u_i(t-1)|| divided by the round median. The
// higher 2-means cluster of suspicion scores is dropped. Until two past
// rounds are on record the rule is plain FedAvg.
class FlDetectorLite {
 public:
  explicit FlDetectorLite(int window = 10) : window_(window) {}

  AggregationResult aggregate(std::span<const ParamVector> updates,
                              std::span<const int> client_ids,
                              std::span<const double> weights);

  int rounds_seen() const { return rounds_seen_; }

 private:
  int window_;
  int rounds_seen_ = 0;
  std::map<int, ParamVector> last_update_;
  std::map<int, std::deque<double>> history_;
};

// Cosine-distance clustering, median-norm clipping and Gaussian noise. The
// clusterer is 2-means over each update's mean cosine distance to the others;
// the larger cluster is kept (ties go to the tighter cluster).
AggregationResult flame(std::span<const ParamVector> updates,
                        double noise_lambda, std::uint64_t seed);

}  // namespace pillfl

#endif  // PILLFL_DEFENSES_DETECTORS_H_
