// Copyright 2026 The FFormation Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Dominant Sets clustering of an affinity graph: replicator dynamics extract
// the most cohesive cluster, which is peeled off and the process repeated
// until the cohesiveness threshold rejects the next candidate.

#ifndef FF_CLUSTERING_HPP_
#define FF_CLUSTERING_HPP_

#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

#include "ff/types.hpp"

namespace ff {

// Replicator iteration stops when the max-norm change drops below this or
// the iteration cap is reached, whichever first.
inline constexpr double kReplicatorTolerance = 1e-10;
inline constexpr std::size_t kReplicatorMaxIters = 10000;

// Converged weights above this cutoff count as cluster members.
inline constexpr double kSupportCutoff = 1e-4;

// The objective x'Ax may regress by at most this much per step before the
// run is declared inconsistent.
inline constexpr double kMonotoneSlack = 1e-12;

// One multiplicative update x_i <- x_i (Ax)_i / (x'Ax) on the simplex.
// A is n-by-n row-major, symmetric, nonnegative, zero-diagonal. When
// x'Ax == 0 the input is already a fixed point and is returned unchanged.
std::vector<double> replicator_step(const std::vector<double>& A,
                                    const std::vector<double>& x,
                                    std::size_t n);

struct DominantSet {
  std::vector<std::size_t> members;
  double cohesiveness = 0.0;  // converged x'Ax
};

// Runs replicator dynamics from the uniform vector over an n-node affinity
// submatrix. Throws InternalError if the objective ever decreases beyond
// kMonotoneSlack.
DominantSet extract_dominant_set(const std::vector<double>& A, std::size_t n);

// Peel-off loop: accept each extracted cluster iff cohesiveness >=
// stop_threshold and it has at least 2 members; the first rejection turns
// every remaining node into a singleton. Output groups and singletons are
// sorted (see GroupPartition::normalize).
GroupPartition dominant_sets_partition(const AffinityMatrix& A,
                                       double stop_threshold);

// Scores a batch of predictions against truth; higher is better.
using TuningMetric = std::function<double(
    const std::vector<GroupPartition>& predicted,
    const std::vector<GroupPartition>& truth)>;

// Pooled T=1 F1 over the batch; a batch with no groups on either side scores
// a perfect 1.0 (predicting nothing when there is nothing is correct).
double tuning_score_f1(const std::vector<GroupPartition>& predicted,
                       const std::vector<GroupPartition>& truth);

inline constexpr double kThresholdGridStart = 0.05;
inline constexpr double kThresholdGridStop = 0.95;
inline constexpr double kThresholdGridStep = 0.05;

// Grid search over stop thresholds {0.05, 0.10, ..., 0.95}, maximizing the
// metric over the validation set; ties break toward the lower threshold.
// Throws InputError on an empty validation list.
double tune_threshold(
    const std::vector<std::pair<AffinityMatrix, GroupPartition>>& validation,
    const TuningMetric& metric = tuning_score_f1);

}  // namespace ff

#endif  // FF_CLUSTERING_HPP_
