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

// The cross-validated experiment shared by the CLI and the acceptance
// harness: per fold, train with augmentation and early stopping, tune the
// clustering threshold on validation affinities, evaluate held-out frames.

#ifndef FF_PIPELINE_HPP_
#define FF_PIPELINE_HPP_

#include <cstddef>
#include <optional>
#include <vector>

#include "ff/clustering.hpp"
#include "ff/dante.hpp"
#include "ff/data_io.hpp"
#include "ff/evaluation.hpp"
#include "ff/types.hpp"

namespace ff {

// Original, rotated, flipped, and rotated-flipped variant of every scene.
std::vector<Scene> augment_scenes(const std::vector<Scene>& scenes);

std::vector<Scene> select_scenes(const Corpus& corpus,
                                 const std::vector<std::size_t>& indices);

// Affinity matrix per scene. jobs > 1 splits scenes across threads; output
// order is scene order regardless of scheduling.
std::vector<AffinityMatrix> affinity_matrices(const std::vector<Scene>& scenes,
                                              const DanteParams& params,
                                              std::size_t jobs = 1);

// Detected partition per scene at a fixed clustering threshold.
std::vector<GroupPartition> detect_all(const std::vector<Scene>& scenes,
                                       const DanteParams& params,
                                       double threshold, std::size_t jobs = 1);

struct PipelineConfig {
  DanteHyper hyper;
  TrainConfig train;
  std::size_t fold_count = 5;
  std::size_t jobs = 1;
  // When set, skips per-fold threshold tuning and uses this value as-is.
  std::optional<double> fixed_threshold;
};

struct FoldOutcome {
  std::size_t fold_index = 0;
  DanteParams params;
  double threshold = 0.0;
  std::vector<EpochStats> history;
  EvalReport t1;        // held-out test frames, T = 1
  EvalReport t23;       // held-out test frames, T = 2/3
  double gdsr_value = 0.0;
  std::vector<std::size_t> test_indices;      // into the corpus
  std::vector<GroupPartition> predictions;    // aligned with test_indices
};

struct CrossValResult {
  std::vector<FoldOutcome> folds;
  double mean_f1_t1 = 0.0;
  double mean_f1_t23 = 0.0;
  double mean_gdsr = 0.0;
};

// Trains and evaluates one fold. The fold's training seed is derived from
// config.train.seed and fold_index, so folds are independent but the whole
// experiment is reproducible.
FoldOutcome run_fold(const Corpus& corpus, const FoldSplit::Fold& fold,
                     std::size_t fold_index, const PipelineConfig& config);

CrossValResult run_cross_validation(const Corpus& corpus,
                                    const PipelineConfig& config);

// Scenes with at least 2 ground-truth groups and 2 non-interacting agents,
// where context is most informative.
bool distractor_heavy(const Scene& scene);

}  // namespace ff

#endif  // FF_PIPELINE_HPP_
