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

// The pairwise affinity network: a dyad MLP applied to both agents of an
// ordered pair, a context MLP max-pooled over the remaining agents, and a
// combiner with a sigmoid head, all evaluated in the dyad's canonical frame.

#ifndef FF_DANTE_HPP_
#define FF_DANTE_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "ff/geometry.hpp"
#include "ff/nn.hpp"
#include "ff/types.hpp"

namespace ff {

struct DanteHyper {
  std::vector<std::size_t> dyad_widths{64, 64};
  std::vector<std::size_t> context_widths{64, 128, 128};
  // Hidden widths only; a width-1 sigmoid head is always appended.
  std::vector<std::size_t> combiner_widths{256, 64};
  bool use_context = true;
  FeatureMode mode = FeatureMode::kOrientation;

  std::size_t dyad_dim() const { return dyad_widths.back(); }
  std::size_t context_dim() const {
    return use_context ? context_widths.back() : 0;
  }
  std::size_t combiner_input() const { return 2 * dyad_dim() + context_dim(); }
};

struct DanteParams {
  DanteHyper hyper;
  Mlp dyad_mlp;
  Mlp context_mlp;   // empty when use_context is false
  Mlp combiner_mlp;  // includes the width-1 sigmoid head
};

// Seeded initialization; identical seeds give bitwise-identical parameters.
DanteParams make_dante(const DanteHyper& hyper, std::uint64_t seed);

// Throws InternalError when shapes or the sigmoid head are inconsistent.
void validate_params(const DanteParams& params);

// Everything cached by one forward evaluation, enough to backpropagate.
struct DanteTrace {
  MlpTrace dyad_i;
  MlpTrace dyad_j;
  std::vector<MlpTrace> context_rows;
  PoolResult pool;
  MlpTrace combiner;
  double prediction = 0.0;
};

// Affinity for the ordered dyad given pre-encoded canonical-frame features.
// context may be empty. Records intermediates into trace when non-null.
double forward_encoded(const DanteParams& params,
                       const std::array<double, 4>& f_i,
                       const std::array<double, 4>& f_j,
                       const std::vector<std::array<double, 4>>& context,
                       DanteTrace* trace = nullptr);

// Accumulates parameter gradients of a loss whose derivative with respect to
// the sigmoid head's pre-activation is grad_logit.
struct DanteGrads {
  MlpGrads dyad;
  MlpGrads context;
  MlpGrads combiner;
};

DanteGrads make_zero_grads(const DanteParams& params);
void zero_grads(DanteGrads& grads);

void backward_encoded(const DanteParams& params, const DanteTrace& trace,
                      double grad_logit, DanteGrads& grads);

// Affinity a_ij for agents i, j of the scene: encodes every agent in the
// canonical frame of (i, j) and evaluates the network. Scene must have at
// least 2 agents.
double forward_affinity(const Scene& scene, const std::string& i,
                        const std::string& j, const DanteParams& params);

// Symmetric affinity matrix over all agents in scene order: each unordered
// pair is the average of a_ij on the scene and a_ji on its vertical mirror.
// Entries land in [0, 1]; the diagonal is zero; values[i][j] == values[j][i]
// bitwise. A single-agent scene yields a 1x1 zero matrix.
AffinityMatrix affinity_matrix(const Scene& scene, const DanteParams& params);

struct TrainConfig {
  double learning_rate = 1e-4;
  std::size_t batch_size = 64;
  std::size_t max_epochs = 200;
  std::size_t patience = 10;  // epochs without validation improvement
  std::uint64_t seed = 0;
};

struct EpochStats {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;
};

struct TrainResult {
  DanteParams params;  // parameters from the best validation epoch
  std::vector<EpochStats> history;
};

// Label for an ordered dyad: 1 iff both agents share a ground-truth group.
// Throws InputError when the scene has no ground truth.
double pair_label(const Scene& scene, const std::string& i,
                  const std::string& j);

// Trains on every ordered dyad of every training scene with BCE loss and
// Adam. Scenes are expected to be pre-augmented (see augment_all). Early
// stopping monitors mean validation loss with the configured patience; with
// no validation scenes the final parameters are returned.
TrainResult train(const std::vector<Scene>& train_scenes,
                  const std::vector<Scene>& val_scenes,
                  const DanteHyper& hyper, const TrainConfig& config);

}  // namespace ff

#endif  // FF_DANTE_HPP_
