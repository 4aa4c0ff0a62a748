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

#include "ff/pipeline.hpp"

#include <thread>
#include <utility>

#include "ff/errors.hpp"
#include "ff/geometry.hpp"
#include "ff/rng.hpp"

namespace ff {

std::vector<Scene> augment_scenes(const std::vector<Scene>& scenes) {
  std::vector<Scene> out;
  out.reserve(scenes.size() * 4);
  for (const Scene& scene : scenes) {
    for (Scene& variant : augment_all(scene)) {
      out.push_back(std::move(variant));
    }
  }
  return out;
}

std::vector<Scene> select_scenes(const Corpus& corpus,
                                 const std::vector<std::size_t>& indices) {
  std::vector<Scene> out;
  out.reserve(indices.size());
  for (std::size_t idx : indices) {
    if (idx >= corpus.scenes.size()) {
      throw InternalError("scene index out of range");
    }
    out.push_back(corpus.scenes[idx]);
  }
  return out;
}

std::vector<AffinityMatrix> affinity_matrices(const std::vector<Scene>& scenes,
                                              const DanteParams& params,
                                              std::size_t jobs) {
  std::vector<AffinityMatrix> out(scenes.size());
  if (jobs <= 1 || scenes.size() <= 1) {
    for (std::size_t k = 0; k < scenes.size(); ++k) {
      out[k] = affinity_matrix(scenes[k], params);
    }
    return out;
  }
  const std::size_t workers = std::min(jobs, scenes.size());
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w]() {
      for (std::size_t k = w; k < scenes.size(); k += workers) {
        out[k] = affinity_matrix(scenes[k], params);
      }
    });
  }
  for (std::thread& t : pool) t.join();
  return out;
}

std::vector<GroupPartition> detect_all(const std::vector<Scene>& scenes,
                                       const DanteParams& params,
                                       double threshold, std::size_t jobs) {
  const std::vector<AffinityMatrix> matrices =
      affinity_matrices(scenes, params, jobs);
  std::vector<GroupPartition> out;
  out.reserve(matrices.size());
  for (const AffinityMatrix& matrix : matrices) {
    out.push_back(dominant_sets_partition(matrix, threshold));
  }
  return out;
}

FoldOutcome run_fold(const Corpus& corpus, const FoldSplit::Fold& fold,
                     std::size_t fold_index, const PipelineConfig& config) {
  FoldOutcome outcome;
  outcome.fold_index = fold_index;
  outcome.test_indices = fold.test;

  TrainConfig fold_train = config.train;
  fold_train.seed = mix_seed(config.train.seed, fold_index + 1);

  const std::vector<Scene> train_scenes =
      augment_scenes(select_scenes(corpus, fold.train));
  const std::vector<Scene> val_augmented =
      augment_scenes(select_scenes(corpus, fold.validation));
  TrainResult trained =
      train(train_scenes, val_augmented, config.hyper, fold_train);
  outcome.params = std::move(trained.params);
  outcome.history = std::move(trained.history);

  if (config.fixed_threshold.has_value()) {
    outcome.threshold = *config.fixed_threshold;
  } else {
    const std::vector<Scene> val_scenes =
        select_scenes(corpus, fold.validation);
    std::vector<std::pair<AffinityMatrix, GroupPartition>> validation;
    std::vector<AffinityMatrix> matrices =
        affinity_matrices(val_scenes, outcome.params, config.jobs);
    validation.reserve(val_scenes.size());
    for (std::size_t k = 0; k < val_scenes.size(); ++k) {
      if (!val_scenes[k].ground_truth.has_value()) {
        throw InputError("frame '" + val_scenes[k].frame_id +
                         "' lacks ground truth");
      }
      validation.emplace_back(std::move(matrices[k]),
                              *val_scenes[k].ground_truth);
    }
    outcome.threshold = tune_threshold(validation);
  }

  const std::vector<Scene> test_scenes = select_scenes(corpus, fold.test);
  outcome.predictions =
      detect_all(test_scenes, outcome.params, outcome.threshold, config.jobs);
  std::vector<GroupPartition> truth;
  truth.reserve(test_scenes.size());
  for (const Scene& scene : test_scenes) {
    if (!scene.ground_truth.has_value()) {
      throw InputError("frame '" + scene.frame_id + "' lacks ground truth");
    }
    truth.push_back(*scene.ground_truth);
  }
  outcome.t1 = f1_at(outcome.predictions, truth, 1.0);
  outcome.t23 = f1_at(outcome.predictions, truth, 2.0 / 3.0);
  outcome.gdsr_value = gdsr(outcome.predictions, truth);
  outcome.t1.gdsr = outcome.gdsr_value;
  return outcome;
}

CrossValResult run_cross_validation(const Corpus& corpus,
                                    const PipelineConfig& config) {
  const FoldSplit split = make_folds(corpus, config.fold_count);
  CrossValResult result;
  result.folds.reserve(split.folds.size());
  for (std::size_t k = 0; k < split.folds.size(); ++k) {
    result.folds.push_back(run_fold(corpus, split.folds[k], k, config));
  }
  for (const FoldOutcome& fold : result.folds) {
    result.mean_f1_t1 += fold.t1.f1;
    result.mean_f1_t23 += fold.t23.f1;
    result.mean_gdsr += fold.gdsr_value;
  }
  const double n = static_cast<double>(result.folds.size());
  result.mean_f1_t1 /= n;
  result.mean_f1_t23 /= n;
  result.mean_gdsr /= n;
  return result;
}

bool distractor_heavy(const Scene& scene) {
  if (!scene.ground_truth.has_value()) return false;
  return scene.ground_truth->groups.size() >= 2 &&
         scene.ground_truth->singletons.size() >= 2;
}

}  // namespace ff
