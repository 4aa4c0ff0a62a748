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

// Minimal dense-network engine: dense layers, masked max-pool over sets,
// binary cross-entropy, Adam. Only the fixed topology used by the affinity
// model is supported; there is no general autodiff graph.

#ifndef FF_NN_HPP_
#define FF_NN_HPP_

#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

#include "ff/rng.hpp"

namespace ff {

enum class Activation { kIdentity, kRelu, kSigmoid };

// Fully connected layer. weights is row-major with out_dim rows of in_dim.
struct DenseLayer {
  std::size_t in_dim = 0;
  std::size_t out_dim = 0;
  std::vector<double> weights;
  std::vector<double> bias;
  Activation activation = Activation::kIdentity;
};

using Mlp = std::vector<DenseLayer>;

// Post-activation values cached by a forward pass; acts[0] is the input and
// acts[k + 1] is the output of layer k.
struct MlpTrace {
  std::vector<std::vector<double>> acts;
};

struct LayerGrads {
  std::vector<double> weights;
  std::vector<double> bias;
};

using MlpGrads = std::vector<LayerGrads>;

std::vector<double> dense_forward(const DenseLayer& layer,
                                  const std::vector<double>& input);

// Runs the full MLP. When trace is non-null the per-layer activations are
// recorded for a later backward pass.
std::vector<double> mlp_forward(const Mlp& mlp, const std::vector<double>& input,
                                MlpTrace* trace = nullptr);

// As mlp_forward with a trace, returning a reference to the final activation
// stored inside the trace.
const std::vector<double>& mlp_forward_traced(const Mlp& mlp,
                                              const std::vector<double>& input,
                                              MlpTrace& trace);

// Backpropagates grad_output (dL/d final activation) through the MLP,
// accumulating parameter gradients into grads and returning dL/d input.
// The trace must come from a forward pass over the same network.
std::vector<double> mlp_backward(const Mlp& mlp, const MlpTrace& trace,
                                 const std::vector<double>& grad_output,
                                 MlpGrads& grads);

// As mlp_backward, but grad_preact is dL/d the final layer's pre-activation;
// the last activation derivative is skipped. Lets losses fold the output
// nonlinearity into their own gradient for numerical stability.
std::vector<double> mlp_backward_preact(const Mlp& mlp, const MlpTrace& trace,
                                        const std::vector<double>& grad_preact,
                                        MlpGrads& grads);

MlpGrads make_zero_grads(const Mlp& mlp);
void zero_grads(MlpGrads& grads);
std::size_t param_count(const Mlp& mlp);

struct PoolResult {
  static constexpr std::size_t kNoRow =
      std::numeric_limits<std::size_t>::max();
  std::vector<double> values;
  // Winning row per column; kNoRow when no row is active. Ties break to the
  // lowest row index.
  std::vector<std::size_t> argmax;
};

// Columnwise max over the rows where mask is true. All rows must share one
// length; an all-false mask yields the zero vector.
PoolResult masked_max_pool(const std::vector<std::vector<double>>& rows,
                           const std::vector<unsigned char>& mask);

// Routes grad_values back to each column's winning row; masked-out rows
// receive exactly zero. grad_rows must be pre-sized to match rows.
void masked_max_pool_backward(const PoolResult& pooled,
                              const std::vector<double>& grad_values,
                              std::vector<std::vector<double>>& grad_rows);

// Predictions are clamped to [1e-7, 1 - 1e-7] before the log.
inline constexpr double kBceClamp = 1e-7;

double bce_loss(double prediction, double label);

// d(bce_loss)/dz for prediction = sigmoid(z). Zero in the clamped regions,
// where the loss is locally constant; p - label elsewhere.
double bce_grad_wrt_logit(double prediction, double label);

// Uniform fan-in init: weights ~ U(-r, r) with r = sqrt(6 / (in + out)),
// biases zero. Weights are drawn in row-major order.
void init_layer(DenseLayer& layer, Rng& rng);

// Builds a network of the given widths, every layer using `act`.
Mlp make_mlp(std::size_t in_dim, const std::vector<std::size_t>& widths,
             Activation act, Rng& rng);

struct AdamConfig {
  double learning_rate = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Moment accumulators shaped like the tracked network.
struct AdamState {
  MlpGrads first_moment;
  MlpGrads second_moment;
  std::int64_t step_count = 0;
};

AdamState make_adam_state(const Mlp& mlp);

// Standard Adam update with bias correction; increments step_count once.
void adam_step(Mlp& mlp, const MlpGrads& grads, AdamState& state,
               const AdamConfig& config);

}  // namespace ff

#endif  // FF_NN_HPP_
