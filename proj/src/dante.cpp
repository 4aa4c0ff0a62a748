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

#include "ff/dante.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <utility>

#include "ff/errors.hpp"

namespace ff {

namespace {

constexpr std::size_t kFeatureDim = 4;

std::vector<double> to_vec(const std::array<double, kFeatureDim>& f) {
  return std::vector<double>(f.begin(), f.end());
}

void check_chain(const Mlp& mlp, std::size_t in_dim, std::size_t out_dim,
                 const char* name) {
  if (mlp.empty()) {
    throw InternalError(std::string(name) + " MLP is empty");
  }
  std::size_t cur = in_dim;
  for (const DenseLayer& layer : mlp) {
    if (layer.in_dim != cur ||
        layer.weights.size() != layer.in_dim * layer.out_dim ||
        layer.bias.size() != layer.out_dim) {
      throw InternalError(std::string(name) + " MLP has inconsistent shapes");
    }
    cur = layer.out_dim;
  }
  if (cur != out_dim) {
    throw InternalError(std::string(name) + " MLP output width " +
                        std::to_string(cur) + " != expected " +
                        std::to_string(out_dim));
  }
  for (const DenseLayer& layer : mlp) {
    for (double w : layer.weights) {
      if (!std::isfinite(w)) {
        throw InternalError(std::string(name) + " MLP has non-finite weights");
      }
    }
    for (double b : layer.bias) {
      if (!std::isfinite(b)) {
        throw InternalError(std::string(name) + " MLP has non-finite biases");
      }
    }
  }
}

}  // namespace

DanteParams make_dante(const DanteHyper& hyper, std::uint64_t seed) {
  if (hyper.dyad_widths.empty() ||
      (hyper.use_context && hyper.context_widths.empty())) {
    throw InputError("model widths must be non-empty");
  }
  Rng rng(seed);
  DanteParams params;
  params.hyper = hyper;
  params.dyad_mlp = make_mlp(kFeatureDim, hyper.dyad_widths,
                             Activation::kRelu, rng);
  if (hyper.use_context) {
    params.context_mlp = make_mlp(kFeatureDim, hyper.context_widths,
                                  Activation::kRelu, rng);
  }
  params.combiner_mlp = make_mlp(hyper.combiner_input(),
                                 hyper.combiner_widths, Activation::kRelu,
                                 rng);
  DenseLayer head;
  head.in_dim = hyper.combiner_widths.empty() ? hyper.combiner_input()
                                              : hyper.combiner_widths.back();
  head.out_dim = 1;
  head.activation = Activation::kSigmoid;
  init_layer(head, rng);
  params.combiner_mlp.push_back(std::move(head));
  return params;
}

void validate_params(const DanteParams& params) {
  const DanteHyper& h = params.hyper;
  check_chain(params.dyad_mlp, kFeatureDim, h.dyad_dim(), "dyad");
  if (h.use_context) {
    check_chain(params.context_mlp, kFeatureDim, h.context_dim(), "context");
  } else if (!params.context_mlp.empty()) {
    throw InternalError("context MLP present but use_context is false");
  }
  check_chain(params.combiner_mlp, h.combiner_input(), 1, "combiner");
  const DenseLayer& head = params.combiner_mlp.back();
  if (head.out_dim != 1 || head.activation != Activation::kSigmoid) {
    throw InternalError("combiner head must be a width-1 sigmoid layer");
  }
}

double forward_encoded(const DanteParams& params,
                       const std::array<double, 4>& f_i,
                       const std::array<double, 4>& f_j,
                       const std::vector<std::array<double, 4>>& context,
                       DanteTrace* trace) {
  DanteTrace local;
  DanteTrace& t = trace != nullptr ? *trace : local;

  const std::vector<double>& v_i =
      mlp_forward_traced(params.dyad_mlp, to_vec(f_i), t.dyad_i);
  const std::vector<double>& v_j =
      mlp_forward_traced(params.dyad_mlp, to_vec(f_j), t.dyad_j);

  const std::size_t d_context = params.hyper.context_dim();
  t.context_rows.clear();
  if (params.hyper.use_context && !context.empty()) {
    t.context_rows.resize(context.size());
    std::vector<std::vector<double>> rows;
    rows.reserve(context.size());
    for (std::size_t k = 0; k < context.size(); ++k) {
      rows.push_back(mlp_forward_traced(params.context_mlp, to_vec(context[k]),
                                        t.context_rows[k]));
    }
    const std::vector<unsigned char> mask(context.size(), 1);
    t.pool = masked_max_pool(rows, mask);
  } else {
    // No context agents (or the ablated variant): the pooled vector is zero.
    t.pool.values.assign(d_context, 0.0);
    t.pool.argmax.assign(d_context, PoolResult::kNoRow);
  }

  std::vector<double> combiner_in;
  combiner_in.reserve(v_i.size() + v_j.size() + d_context);
  combiner_in.insert(combiner_in.end(), v_i.begin(), v_i.end());
  combiner_in.insert(combiner_in.end(), v_j.begin(), v_j.end());
  combiner_in.insert(combiner_in.end(), t.pool.values.begin(),
                     t.pool.values.end());
  const std::vector<double>& out =
      mlp_forward_traced(params.combiner_mlp, combiner_in, t.combiner);
  t.prediction = out[0];
  return t.prediction;
}

DanteGrads make_zero_grads(const DanteParams& params) {
  DanteGrads grads;
  grads.dyad = make_zero_grads(params.dyad_mlp);
  grads.context = make_zero_grads(params.context_mlp);
  grads.combiner = make_zero_grads(params.combiner_mlp);
  return grads;
}

void zero_grads(DanteGrads& grads) {
  zero_grads(grads.dyad);
  zero_grads(grads.context);
  zero_grads(grads.combiner);
}

void backward_encoded(const DanteParams& params, const DanteTrace& trace,
                      double grad_logit, DanteGrads& grads) {
  const std::vector<double> grad_head{grad_logit};
  const std::vector<double> grad_in = mlp_backward_preact(
      params.combiner_mlp, trace.combiner, grad_head, grads.combiner);

  const std::size_t d_dyad = params.hyper.dyad_dim();
  const std::size_t d_context = params.hyper.context_dim();
  if (grad_in.size() != 2 * d_dyad + d_context) {
    throw InternalError("combiner input gradient has unexpected width");
  }
  const std::vector<double> g_i(grad_in.begin(), grad_in.begin() + d_dyad);
  const std::vector<double> g_j(grad_in.begin() + d_dyad,
                                grad_in.begin() + 2 * d_dyad);
  mlp_backward(params.dyad_mlp, trace.dyad_i, g_i, grads.dyad);
  mlp_backward(params.dyad_mlp, trace.dyad_j, g_j, grads.dyad);

  if (!trace.context_rows.empty()) {
    const std::vector<double> g_pool(grad_in.begin() + 2 * d_dyad,
                                     grad_in.end());
    std::vector<std::vector<double>> grad_rows(
        trace.context_rows.size(), std::vector<double>(d_context, 0.0));
    masked_max_pool_backward(trace.pool, g_pool, grad_rows);
    for (std::size_t r = 0; r < grad_rows.size(); ++r) {
      bool nonzero = false;
      for (double g : grad_rows[r]) {
        if (g != 0.0) {
          nonzero = true;
          break;
        }
      }
      // Rows that won no pooling column have an exactly-zero gradient.
      if (nonzero) {
        mlp_backward(params.context_mlp, trace.context_rows[r], grad_rows[r],
                     grads.context);
      }
    }
  }
}

namespace {

double forward_pair(const Scene& scene, std::size_t a, std::size_t b,
                    const DanteParams& params) {
  const CanonicalFrame frame = canonical_frame(scene.agents[a].position,
                                               scene.agents[b].position);
  const FeatureMode mode = params.hyper.mode;
  const std::array<double, 4> f_a = encode_feature(scene.agents[a], frame, mode);
  const std::array<double, 4> f_b = encode_feature(scene.agents[b], frame, mode);
  std::vector<std::array<double, 4>> context;
  if (params.hyper.use_context) {
    context.reserve(scene.agents.size() - 2);
    for (std::size_t k = 0; k < scene.agents.size(); ++k) {
      if (k == a || k == b) continue;
      context.push_back(encode_feature(scene.agents[k], frame, mode));
    }
  }
  return forward_encoded(params, f_a, f_b, context);
}

}  // namespace

double forward_affinity(const Scene& scene, const std::string& i,
                        const std::string& j, const DanteParams& params) {
  if (scene.agents.size() < 2) {
    throw InputError("affinity requires a scene with at least 2 agents");
  }
  if (i == j) {
    throw InputError("affinity requires two distinct agents, got '" + i +
                     "' twice");
  }
  return forward_pair(scene, agent_index(scene, i), agent_index(scene, j),
                      params);
}

AffinityMatrix affinity_matrix(const Scene& scene, const DanteParams& params) {
  validate_params(params);
  const std::size_t n = scene.agents.size();
  AffinityMatrix matrix;
  matrix.ids.reserve(n);
  for (const Agent& a : scene.agents) matrix.ids.push_back(a.id);
  matrix.values.assign(n * n, 0.0);
  if (n < 2) return matrix;

  const Scene flipped = augment_flip_vertical(scene);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double a_ij = forward_pair(scene, i, j, params);
      const double a_ji = forward_pair(flipped, j, i, params);
      const double value = 0.5 * (a_ij + a_ji);
      matrix.at(i, j) = value;
      matrix.at(j, i) = value;
    }
  }
  return matrix;
}

double pair_label(const Scene& scene, const std::string& i,
                  const std::string& j) {
  if (!scene.ground_truth.has_value()) {
    throw InputError("frame '" + scene.frame_id + "' lacks ground truth");
  }
  return same_group(*scene.ground_truth, i, j) ? 1.0 : 0.0;
}

namespace {

// One ordered training dyad with pre-encoded canonical-frame features.
struct DyadExample {
  std::array<double, 4> f_i;
  std::array<double, 4> f_j;
  std::vector<std::array<double, 4>> context;
  double label = 0.0;
};

std::vector<DyadExample> build_examples(const std::vector<Scene>& scenes,
                                        const DanteHyper& hyper) {
  std::vector<DyadExample> examples;
  for (const Scene& scene : scenes) {
    if (!scene.ground_truth.has_value()) {
      throw InputError("frame '" + scene.frame_id + "' lacks ground truth");
    }
    const std::size_t n = scene.agents.size();
    if (n < 2) continue;
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = 0; b < n; ++b) {
        if (a == b) continue;
        DyadExample ex;
        const CanonicalFrame frame = canonical_frame(
            scene.agents[a].position, scene.agents[b].position);
        ex.f_i = encode_feature(scene.agents[a], frame, hyper.mode);
        ex.f_j = encode_feature(scene.agents[b], frame, hyper.mode);
        if (hyper.use_context) {
          ex.context.reserve(n - 2);
          for (std::size_t k = 0; k < n; ++k) {
            if (k == a || k == b) continue;
            ex.context.push_back(
                encode_feature(scene.agents[k], frame, hyper.mode));
          }
        }
        ex.label = same_group(*scene.ground_truth, scene.agents[a].id,
                              scene.agents[b].id)
                       ? 1.0
                       : 0.0;
        examples.push_back(std::move(ex));
      }
    }
  }
  return examples;
}

double mean_loss(const DanteParams& params,
                 const std::vector<DyadExample>& examples) {
  if (examples.empty()) return std::numeric_limits<double>::quiet_NaN();
  double sum = 0.0;
  for (const DyadExample& ex : examples) {
    const double p = forward_encoded(params, ex.f_i, ex.f_j, ex.context);
    sum += bce_loss(p, ex.label);
  }
  return sum / static_cast<double>(examples.size());
}

}  // namespace

TrainResult train(const std::vector<Scene>& train_scenes,
                  const std::vector<Scene>& val_scenes,
                  const DanteHyper& hyper, const TrainConfig& config) {
  if (config.learning_rate <= 0.0) {
    throw InputError("learning rate must be positive");
  }
  if (config.batch_size < 1) {
    throw InputError("batch size must be at least 1");
  }
  const std::vector<DyadExample> examples = build_examples(train_scenes, hyper);
  const std::vector<DyadExample> val_examples =
      build_examples(val_scenes, hyper);
  if (examples.empty()) {
    throw InputError("training corpus contains no dyads");
  }

  DanteParams params = make_dante(hyper, config.seed);
  validate_params(params);
  Rng shuffle_rng(mix_seed(config.seed, 0x9e3779b97f4a7c15ull));

  AdamConfig adam;
  adam.learning_rate = config.learning_rate;
  AdamState state_dyad = make_adam_state(params.dyad_mlp);
  AdamState state_context = make_adam_state(params.context_mlp);
  AdamState state_combiner = make_adam_state(params.combiner_mlp);
  DanteGrads grads = make_zero_grads(params);

  std::vector<std::size_t> order(examples.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  TrainResult result;
  result.params = params;
  double best_val = std::numeric_limits<double>::infinity();
  std::size_t epochs_since_best = 0;
  DanteTrace trace;

  for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
    shuffle_rng.shuffle(order);
    double loss_sum = 0.0;
    for (std::size_t start = 0; start < order.size();
         start += config.batch_size) {
      const std::size_t count =
          std::min(config.batch_size, order.size() - start);
      zero_grads(grads);
      for (std::size_t k = start; k < start + count; ++k) {
        const DyadExample& ex = examples[order[k]];
        const double p =
            forward_encoded(params, ex.f_i, ex.f_j, ex.context, &trace);
        loss_sum += bce_loss(p, ex.label);
        const double grad_logit =
            bce_grad_wrt_logit(p, ex.label) / static_cast<double>(count);
        backward_encoded(params, trace, grad_logit, grads);
      }
      adam_step(params.dyad_mlp, grads.dyad, state_dyad, adam);
      if (hyper.use_context) {
        adam_step(params.context_mlp, grads.context, state_context, adam);
      }
      adam_step(params.combiner_mlp, grads.combiner, state_combiner, adam);
    }

    EpochStats stats;
    stats.epoch = epoch;
    stats.train_loss = loss_sum / static_cast<double>(examples.size());
    stats.val_loss = mean_loss(params, val_examples);
    result.history.push_back(stats);

    if (!val_examples.empty()) {
      if (stats.val_loss < best_val) {
        best_val = stats.val_loss;
        result.params = params;
        epochs_since_best = 0;
      } else if (++epochs_since_best >= config.patience) {
        break;
      }
    }
  }
  if (val_examples.empty()) {
    result.params = std::move(params);
  }
  return result;
}

}  // namespace ff
