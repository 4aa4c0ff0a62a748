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

#include "doctest.h"

#include <cmath>
#include <vector>

#include "ff/errors.hpp"
#include "ff/nn.hpp"
#include "ff/rng.hpp"

namespace {

ff::DenseLayer layer2x2(ff::Activation act) {
  ff::DenseLayer layer;
  layer.in_dim = 2;
  layer.out_dim = 2;
  layer.weights = {1.0, 2.0, 3.0, 4.0};
  layer.bias = {0.5, -0.5};
  layer.activation = act;
  return layer;
}

// Scalar loss of an MLP under BCE against a fixed label, for finite
// differencing.
double loss_of(const ff::Mlp& mlp, const std::vector<double>& input,
               double label) {
  return ff::bce_loss(ff::mlp_forward(mlp, input)[0], label);
}

}  // namespace

TEST_CASE("dense_forward affine fixture") {
  const ff::DenseLayer layer = layer2x2(ff::Activation::kIdentity);
  const std::vector<double> out = ff::dense_forward(layer, {1.0, 1.0});
  CHECK(out[0] == doctest::Approx(3.5));
  CHECK(out[1] == doctest::Approx(6.5));
}

TEST_CASE("dense_forward relu clamps negatives") {
  ff::DenseLayer layer = layer2x2(ff::Activation::kRelu);
  layer.bias = {-10.0, 0.0};
  const std::vector<double> out = ff::dense_forward(layer, {1.0, 1.0});
  CHECK(out[0] == 0.0);
  CHECK(out[1] == doctest::Approx(7.0));
}

TEST_CASE("dense_forward sigmoid of zero is one half") {
  ff::DenseLayer layer;
  layer.in_dim = 1;
  layer.out_dim = 1;
  layer.weights = {1.0};
  layer.bias = {-3.0};
  layer.activation = ff::Activation::kSigmoid;
  CHECK(ff::dense_forward(layer, {3.0})[0] == doctest::Approx(0.5));
}

TEST_CASE("dense_forward rejects wrong input length") {
  const ff::DenseLayer layer = layer2x2(ff::Activation::kIdentity);
  CHECK_THROWS_AS(ff::dense_forward(layer, {1.0}), ff::InternalError);
}

TEST_CASE("mlp_forward composes layers and traces activations") {
  ff::Mlp mlp = {layer2x2(ff::Activation::kRelu),
                 layer2x2(ff::Activation::kIdentity)};
  ff::MlpTrace trace;
  const std::vector<double> out = ff::mlp_forward(mlp, {1.0, 1.0}, &trace);
  // Layer 1: (3.5, 6.5); layer 2: (1*3.5 + 2*6.5 + .5, 3*3.5 + 4*6.5 - .5).
  CHECK(out[0] == doctest::Approx(17.0));
  CHECK(out[1] == doctest::Approx(36.0));
  REQUIRE(trace.acts.size() == 3);
  CHECK(trace.acts[0] == std::vector<double>{1.0, 1.0});
  CHECK(trace.acts[1][0] == doctest::Approx(3.5));
  CHECK(trace.acts[2][1] == doctest::Approx(36.0));

  ff::MlpTrace trace2;
  const std::vector<double>& ref = ff::mlp_forward_traced(mlp, {1.0, 1.0},
                                                          trace2);
  CHECK(&ref == &trace2.acts.back());
  CHECK(ref[0] == doctest::Approx(17.0));
}

TEST_CASE("masked_max_pool fixtures") {
  const std::vector<std::vector<double>> rows = {{1.0, 5.0}, {3.0, 2.0}};

  SUBCASE("both rows active") {
    const ff::PoolResult pooled = ff::masked_max_pool(rows, {1, 1});
    CHECK(pooled.values == std::vector<double>{3.0, 5.0});
    CHECK(pooled.argmax == std::vector<std::size_t>{1, 0});
  }
  SUBCASE("single active row wins every column") {
    const ff::PoolResult pooled = ff::masked_max_pool(rows, {1, 0});
    CHECK(pooled.values == std::vector<double>{1.0, 5.0});
    CHECK(pooled.argmax == std::vector<std::size_t>{0, 0});
  }
  SUBCASE("all-false mask pools to zero") {
    const ff::PoolResult pooled = ff::masked_max_pool(rows, {0, 0});
    CHECK(pooled.values == std::vector<double>{0.0, 0.0});
    CHECK(pooled.argmax == std::vector<std::size_t>{ff::PoolResult::kNoRow,
                                                    ff::PoolResult::kNoRow});
  }
  SUBCASE("negative maxima survive; zero is not a floor") {
    const ff::PoolResult pooled =
        ff::masked_max_pool({{-3.0}, {-1.0}}, {1, 1});
    CHECK(pooled.values == std::vector<double>{-1.0});
    CHECK(pooled.argmax == std::vector<std::size_t>{1});
  }
  SUBCASE("ties break to the lowest row") {
    const ff::PoolResult pooled =
        ff::masked_max_pool({{2.0, 2.0}, {2.0, 1.0}}, {1, 1});
    CHECK(pooled.argmax == std::vector<std::size_t>{0, 0});
  }
}

TEST_CASE("masked_max_pool is invariant to row order") {
  ff::Rng rng(7);
  std::vector<std::vector<double>> rows(5, std::vector<double>(4));
  for (auto& r : rows)
    for (double& x : r) x = rng.uniform(-1.0, 1.0);
  const ff::PoolResult a = ff::masked_max_pool(rows, {1, 1, 1, 1, 1});
  std::vector<std::vector<double>> reversed(rows.rbegin(), rows.rend());
  const ff::PoolResult b = ff::masked_max_pool(reversed, {1, 1, 1, 1, 1});
  CHECK(a.values == b.values);
}

TEST_CASE("masked_max_pool_backward routes to winners only") {
  const std::vector<std::vector<double>> rows = {{1.0, 5.0}, {3.0, 2.0}};
  const ff::PoolResult pooled = ff::masked_max_pool(rows, {1, 1});
  std::vector<std::vector<double>> grad_rows(2, std::vector<double>(2, 0.0));
  ff::masked_max_pool_backward(pooled, {10.0, 20.0}, grad_rows);
  CHECK(grad_rows[0] == std::vector<double>{0.0, 20.0});
  CHECK(grad_rows[1] == std::vector<double>{10.0, 0.0});

  // An all-masked pool sends gradient nowhere.
  const ff::PoolResult none = ff::masked_max_pool(rows, {0, 0});
  std::vector<std::vector<double>> zeros(2, std::vector<double>(2, 0.0));
  ff::masked_max_pool_backward(none, {10.0, 20.0}, zeros);
  CHECK(zeros[0] == std::vector<double>{0.0, 0.0});
  CHECK(zeros[1] == std::vector<double>{0.0, 0.0});
}

TEST_CASE("bce_loss fixtures") {
  CHECK(ff::bce_loss(0.5, 1.0) == doctest::Approx(std::log(2.0)));
  CHECK(ff::bce_loss(0.5, 0.0) == doctest::Approx(std::log(2.0)));
  CHECK(ff::bce_loss(0.9, 1.0) == doctest::Approx(-std::log(0.9)));
  CHECK(ff::bce_loss(0.9, 0.0) == doctest::Approx(-std::log(0.1)));
  // Saturated predictions are clamped, keeping the loss finite.
  CHECK(ff::bce_loss(1.0, 0.0) == doctest::Approx(-std::log(1e-7)));
  CHECK(ff::bce_loss(0.0, 1.0) == doctest::Approx(-std::log(1e-7)));
}

TEST_CASE("bce_grad_wrt_logit is p minus label, zero when clamped") {
  CHECK(ff::bce_grad_wrt_logit(0.9, 1.0) == doctest::Approx(-0.1));
  CHECK(ff::bce_grad_wrt_logit(0.9, 0.0) == doctest::Approx(0.9));
  CHECK(ff::bce_grad_wrt_logit(0.5, 0.5) == doctest::Approx(0.0));
  CHECK(ff::bce_grad_wrt_logit(1.0, 0.0) == 0.0);
  CHECK(ff::bce_grad_wrt_logit(0.0, 1.0) == 0.0);
}

TEST_CASE("linear layer gradients are the outer product") {
  ff::Mlp mlp = {layer2x2(ff::Activation::kIdentity)};
  ff::MlpTrace trace;
  ff::mlp_forward(mlp, {2.0, 3.0}, &trace);
  ff::MlpGrads grads = ff::make_zero_grads(mlp);
  const std::vector<double> grad_in =
      ff::mlp_backward(mlp, trace, {1.0, 10.0}, grads);
  // dL/dW = g x^T, dL/db = g, dL/dx = W^T g.
  CHECK(grads[0].weights == std::vector<double>{2.0, 3.0, 20.0, 30.0});
  CHECK(grads[0].bias == std::vector<double>{1.0, 10.0});
  CHECK(grad_in[0] == doctest::Approx(31.0));
  CHECK(grad_in[1] == doctest::Approx(42.0));
}

TEST_CASE("analytic gradients match central differences") {
  ff::Rng rng(42);
  ff::Mlp mlp = ff::make_mlp(3, {4, 4}, ff::Activation::kRelu, rng);
  ff::DenseLayer head;
  head.in_dim = 4;
  head.out_dim = 1;
  head.activation = ff::Activation::kSigmoid;
  ff::init_layer(head, rng);
  mlp.push_back(head);

  const std::vector<double> input = {0.3, -0.7, 1.1};
  const double label = 1.0;

  ff::MlpTrace trace;
  const double p = ff::mlp_forward(mlp, input, &trace)[0];
  ff::MlpGrads grads = ff::make_zero_grads(mlp);
  const std::vector<double> grad_in = ff::mlp_backward_preact(
      mlp, trace, {ff::bce_grad_wrt_logit(p, label)}, grads);

  const double h = 1e-4;
  const auto check_fd = [&](double* param, double analytic) {
    const double saved = *param;
    *param = saved + h;
    const double up = loss_of(mlp, input, label);
    *param = saved - h;
    const double down = loss_of(mlp, input, label);
    *param = saved;
    const double fd = (up - down) / (2.0 * h);
    CHECK(std::fabs(fd - analytic) <=
          1e-6 + 1e-4 * std::max(std::fabs(fd), std::fabs(analytic)));
  };

  for (std::size_t l = 0; l < mlp.size(); ++l) {
    for (std::size_t k = 0; k < mlp[l].weights.size(); ++k) {
      check_fd(&mlp[l].weights[k], grads[l].weights[k]);
    }
    for (std::size_t k = 0; k < mlp[l].bias.size(); ++k) {
      check_fd(&mlp[l].bias[k], grads[l].bias[k]);
    }
  }

  // Input gradient via a perturbed copy of the input.
  std::vector<double> in = input;
  for (std::size_t k = 0; k < in.size(); ++k) {
    const double saved = in[k];
    in[k] = saved + h;
    const double up = loss_of(mlp, in, label);
    in[k] = saved - h;
    const double down = loss_of(mlp, in, label);
    in[k] = saved;
    const double fd = (up - down) / (2.0 * h);
    CHECK(std::fabs(fd - grad_in[k]) <=
          1e-6 + 1e-4 * std::max(std::fabs(fd), std::fabs(grad_in[k])));
  }
}

TEST_CASE("make_mlp shapes, zero biases, bounded weights") {
  ff::Rng rng(9);
  const ff::Mlp mlp = ff::make_mlp(5, {7, 3}, ff::Activation::kRelu, rng);
  REQUIRE(mlp.size() == 2);
  CHECK(mlp[0].in_dim == 5);
  CHECK(mlp[0].out_dim == 7);
  CHECK(mlp[1].in_dim == 7);
  CHECK(mlp[1].out_dim == 3);
  CHECK(ff::param_count(mlp) == 5 * 7 + 7 + 7 * 3 + 3);
  const double r0 = std::sqrt(6.0 / (5 + 7));
  for (double w : mlp[0].weights) CHECK(std::fabs(w) <= r0);
  for (double b : mlp[0].bias) CHECK(b == 0.0);

  ff::Rng rng2(9);
  const ff::Mlp again = ff::make_mlp(5, {7, 3}, ff::Activation::kRelu, rng2);
  CHECK(again[0].weights == mlp[0].weights);
  CHECK(again[1].weights == mlp[1].weights);
}

TEST_CASE("adam with zero gradient leaves parameters unchanged") {
  ff::Rng rng(3);
  ff::Mlp mlp = ff::make_mlp(2, {2}, ff::Activation::kIdentity, rng);
  const std::vector<double> before = mlp[0].weights;
  ff::AdamState state = ff::make_adam_state(mlp);
  ff::MlpGrads grads = ff::make_zero_grads(mlp);
  ff::adam_step(mlp, grads, state, {});
  CHECK(mlp[0].weights == before);
  CHECK(state.step_count == 1);
}

TEST_CASE("adam first step moves by about lr times sign of gradient") {
  ff::Mlp mlp = {layer2x2(ff::Activation::kIdentity)};
  ff::AdamState state = ff::make_adam_state(mlp);
  ff::MlpGrads grads = ff::make_zero_grads(mlp);
  grads[0].weights = {0.3, -0.02, 1.7, -5.0};
  const std::vector<double> before = mlp[0].weights;
  ff::AdamConfig config;
  config.learning_rate = 0.01;
  ff::adam_step(mlp, grads, state, config);
  for (std::size_t k = 0; k < 4; ++k) {
    const double delta = mlp[0].weights[k] - before[k];
    const double expected = -0.01 * (grads[0].weights[k] > 0 ? 1.0 : -1.0);
    CHECK(delta == doctest::Approx(expected).epsilon(1e-6));
  }
}

TEST_CASE("adam drives a quadratic toward zero") {
  ff::Mlp mlp(1);
  mlp[0].in_dim = 1;
  mlp[0].out_dim = 1;
  mlp[0].weights = {1.0};
  mlp[0].bias = {0.0};
  mlp[0].activation = ff::Activation::kIdentity;
  ff::AdamState state = ff::make_adam_state(mlp);
  ff::AdamConfig config;
  config.learning_rate = 0.05;
  double prev = 1.0;
  for (int step = 0; step < 10; ++step) {
    ff::MlpGrads grads = ff::make_zero_grads(mlp);
    grads[0].weights[0] = 2.0 * mlp[0].weights[0];  // d(w^2)/dw
    ff::adam_step(mlp, grads, state, config);
    const double now = mlp[0].weights[0] * mlp[0].weights[0];
    CHECK(now < prev);
    prev = now;
  }
}

TEST_CASE("adam runs are bitwise deterministic") {
  const auto run = [] {
    ff::Rng rng(11);
    ff::Mlp mlp = ff::make_mlp(3, {4, 1}, ff::Activation::kRelu, rng);
    ff::AdamState state = ff::make_adam_state(mlp);
    for (int step = 0; step < 5; ++step) {
      ff::MlpTrace trace;
      ff::mlp_forward(mlp, {0.1, 0.2, 0.3}, &trace);
      ff::MlpGrads grads = ff::make_zero_grads(mlp);
      ff::mlp_backward(mlp, trace, {1.0}, grads);
      ff::adam_step(mlp, grads, state, {});
    }
    return mlp;
  };
  const ff::Mlp a = run();
  const ff::Mlp b = run();
  for (std::size_t l = 0; l < a.size(); ++l) {
    CHECK(a[l].weights == b[l].weights);
    CHECK(a[l].bias == b[l].bias);
  }
}
