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

#include "ff/nn.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ff/errors.hpp"
#include "ff/kernels.hpp"

namespace ff {

namespace {

void check_layer(const DenseLayer& layer) {
  if (layer.weights.size() != layer.in_dim * layer.out_dim ||
      layer.bias.size() != layer.out_dim) {
    throw InternalError("dense layer parameter shapes are inconsistent with "
                        "declared dims " +
                        std::to_string(layer.out_dim) + "x" +
                        std::to_string(layer.in_dim));
  }
}

void apply_activation(std::vector<double>& v, Activation act) {
  switch (act) {
    case Activation::kIdentity:
      break;
    case Activation::kRelu:
      for (double& x : v) x = x > 0.0 ? x : 0.0;
      break;
    case Activation::kSigmoid:
      for (double& x : v) x = 1.0 / (1.0 + std::exp(-x));
      break;
  }
}

// Derivative of the activation expressed through its own output value.
double activation_deriv(double out, Activation act) {
  switch (act) {
    case Activation::kIdentity:
      return 1.0;
    case Activation::kRelu:
      return out > 0.0 ? 1.0 : 0.0;
    case Activation::kSigmoid:
      return out * (1.0 - out);
  }
  return 1.0;
}

}  // namespace

std::vector<double> dense_forward(const DenseLayer& layer,
                                  const std::vector<double>& input) {
  check_layer(layer);
  if (input.size() != layer.in_dim) {
    throw InternalError("dense_forward: input length " +
                        std::to_string(input.size()) + " != in_dim " +
                        std::to_string(layer.in_dim));
  }
  std::vector<double> out(layer.out_dim);
  kernels::active().dense_matvec(layer.weights.data(), input.data(),
                                 layer.bias.data(), out.data(), layer.out_dim,
                                 layer.in_dim);
  apply_activation(out, layer.activation);
  return out;
}

const std::vector<double>& mlp_forward_traced(const Mlp& mlp,
                                              const std::vector<double>& input,
                                              MlpTrace& trace) {
  trace.acts.clear();
  trace.acts.reserve(mlp.size() + 1);
  trace.acts.push_back(input);
  for (const DenseLayer& layer : mlp) {
    trace.acts.push_back(dense_forward(layer, trace.acts.back()));
  }
  return trace.acts.back();
}

std::vector<double> mlp_forward(const Mlp& mlp, const std::vector<double>& input,
                                MlpTrace* trace) {
  if (trace != nullptr) {
    return mlp_forward_traced(mlp, input, *trace);
  }
  std::vector<double> cur = input;
  for (const DenseLayer& layer : mlp) {
    cur = dense_forward(layer, cur);
  }
  return cur;
}

namespace {

std::vector<double> backward_impl(const Mlp& mlp, const MlpTrace& trace,
                                  const std::vector<double>& grad_output,
                                  MlpGrads& grads, bool skip_last_activation) {
  if (trace.acts.size() != mlp.size() + 1) {
    throw InternalError("mlp_backward called without a matching forward trace");
  }
  if (grads.size() != mlp.size()) {
    throw InternalError("mlp_backward: gradient accumulator shape mismatch");
  }
  const auto& kr = kernels::active();
  std::vector<double> grad = grad_output;
  std::vector<double> delta;
  for (std::size_t k = mlp.size(); k-- > 0;) {
    const DenseLayer& layer = mlp[k];
    const std::vector<double>& out = trace.acts[k + 1];
    const std::vector<double>& in = trace.acts[k];
    if (grad.size() != layer.out_dim || out.size() != layer.out_dim ||
        in.size() != layer.in_dim) {
      throw InternalError("mlp_backward: trace does not match network shapes");
    }
    delta.resize(layer.out_dim);
    const bool through_activation = !(skip_last_activation && k + 1 == mlp.size());
    for (std::size_t u = 0; u < layer.out_dim; ++u) {
      delta[u] = through_activation
                     ? grad[u] * activation_deriv(out[u], layer.activation)
                     : grad[u];
    }
    LayerGrads& lg = grads[k];
    kr.outer_acc(lg.weights.data(), delta.data(), in.data(), layer.out_dim,
                 layer.in_dim);
    kr.axpy(lg.bias.data(), 1.0, delta.data(), layer.out_dim);
    grad.assign(layer.in_dim, 0.0);
    kr.matvec_transpose_acc(layer.weights.data(), delta.data(), grad.data(),
                            layer.out_dim, layer.in_dim);
  }
  return grad;
}

}  // namespace

std::vector<double> mlp_backward(const Mlp& mlp, const MlpTrace& trace,
                                 const std::vector<double>& grad_output,
                                 MlpGrads& grads) {
  return backward_impl(mlp, trace, grad_output, grads, false);
}

std::vector<double> mlp_backward_preact(const Mlp& mlp, const MlpTrace& trace,
                                        const std::vector<double>& grad_preact,
                                        MlpGrads& grads) {
  return backward_impl(mlp, trace, grad_preact, grads, true);
}

MlpGrads make_zero_grads(const Mlp& mlp) {
  MlpGrads grads(mlp.size());
  for (std::size_t k = 0; k < mlp.size(); ++k) {
    grads[k].weights.assign(mlp[k].weights.size(), 0.0);
    grads[k].bias.assign(mlp[k].bias.size(), 0.0);
  }
  return grads;
}

void zero_grads(MlpGrads& grads) {
  for (LayerGrads& lg : grads) {
    std::fill(lg.weights.begin(), lg.weights.end(), 0.0);
    std::fill(lg.bias.begin(), lg.bias.end(), 0.0);
  }
}

std::size_t param_count(const Mlp& mlp) {
  std::size_t n = 0;
  for (const DenseLayer& layer : mlp) {
    n += layer.weights.size() + layer.bias.size();
  }
  return n;
}

PoolResult masked_max_pool(const std::vector<std::vector<double>>& rows,
                           const std::vector<unsigned char>& mask) {
  if (mask.size() != rows.size()) {
    throw InternalError("masked_max_pool: mask length != row count");
  }
  std::size_t dim = 0;
  for (const auto& row : rows) {
    if (dim == 0) {
      dim = row.size();
    } else if (row.size() != dim) {
      throw InternalError("masked_max_pool: ragged rows");
    }
  }
  PoolResult result;
  result.values.assign(dim, 0.0);
  result.argmax.assign(dim, PoolResult::kNoRow);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (!mask[r]) continue;
    for (std::size_t c = 0; c < dim; ++c) {
      if (result.argmax[c] == PoolResult::kNoRow ||
          rows[r][c] > result.values[c]) {
        result.values[c] = rows[r][c];
        result.argmax[c] = r;
      }
    }
  }
  return result;
}

void masked_max_pool_backward(const PoolResult& pooled,
                              const std::vector<double>& grad_values,
                              std::vector<std::vector<double>>& grad_rows) {
  if (grad_values.size() != pooled.values.size()) {
    throw InternalError("masked_max_pool_backward: gradient length mismatch");
  }
  for (std::size_t c = 0; c < grad_values.size(); ++c) {
    const std::size_t r = pooled.argmax[c];
    if (r == PoolResult::kNoRow) continue;
    if (r >= grad_rows.size() || c >= grad_rows[r].size()) {
      throw InternalError("masked_max_pool_backward: row buffer mismatch");
    }
    grad_rows[r][c] += grad_values[c];
  }
}

double bce_loss(double prediction, double label) {
  const double p = std::clamp(prediction, kBceClamp, 1.0 - kBceClamp);
  return -(label * std::log(p) + (1.0 - label) * std::log(1.0 - p));
}

double bce_grad_wrt_logit(double prediction, double label) {
  if (prediction <= kBceClamp || prediction >= 1.0 - kBceClamp) return 0.0;
  return prediction - label;
}

void init_layer(DenseLayer& layer, Rng& rng) {
  const double r =
      std::sqrt(6.0 / static_cast<double>(layer.in_dim + layer.out_dim));
  layer.weights.resize(layer.in_dim * layer.out_dim);
  for (double& w : layer.weights) w = rng.uniform(-r, r);
  layer.bias.assign(layer.out_dim, 0.0);
}

Mlp make_mlp(std::size_t in_dim, const std::vector<std::size_t>& widths,
             Activation act, Rng& rng) {
  Mlp mlp;
  mlp.reserve(widths.size());
  std::size_t cur = in_dim;
  for (std::size_t width : widths) {
    DenseLayer layer;
    layer.in_dim = cur;
    layer.out_dim = width;
    layer.activation = act;
    init_layer(layer, rng);
    mlp.push_back(std::move(layer));
    cur = width;
  }
  return mlp;
}

AdamState make_adam_state(const Mlp& mlp) {
  AdamState state;
  state.first_moment = make_zero_grads(mlp);
  state.second_moment = make_zero_grads(mlp);
  return state;
}

void adam_step(Mlp& mlp, const MlpGrads& grads, AdamState& state,
               const AdamConfig& config) {
  if (grads.size() != mlp.size() || state.first_moment.size() != mlp.size() ||
      state.second_moment.size() != mlp.size()) {
    throw InternalError("adam_step: shape mismatch between params and state");
  }
  state.step_count += 1;
  const double t = static_cast<double>(state.step_count);
  const double inv_bc1 = 1.0 / (1.0 - std::pow(config.beta1, t));
  const double inv_bc2 = 1.0 / (1.0 - std::pow(config.beta2, t));
  const auto& kr = kernels::active();
  for (std::size_t k = 0; k < mlp.size(); ++k) {
    DenseLayer& layer = mlp[k];
    const LayerGrads& g = grads[k];
    LayerGrads& m = state.first_moment[k];
    LayerGrads& v = state.second_moment[k];
    if (g.weights.size() != layer.weights.size() ||
        g.bias.size() != layer.bias.size()) {
      throw InternalError("adam_step: gradient shape mismatch at layer " +
                          std::to_string(k));
    }
    kr.adam_update(layer.weights.data(), m.weights.data(), v.weights.data(),
                   g.weights.data(), layer.weights.size(),
                   config.learning_rate, config.beta1, config.beta2, inv_bc1,
                   inv_bc2, config.epsilon);
    kr.adam_update(layer.bias.data(), m.bias.data(), v.bias.data(),
                   g.bias.data(), layer.bias.size(), config.learning_rate,
                   config.beta1, config.beta2, inv_bc1, inv_bc2,
                   config.epsilon);
  }
}

}  // namespace ff
