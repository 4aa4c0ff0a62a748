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
#include <cstring>
#include <string>
#include <vector>

#include "ff/kernels.hpp"
#include "ff/rng.hpp"

namespace {

using ff::kernels::Kernels;

std::vector<double> random_vec(ff::Rng& rng, std::size_t n) {
  std::vector<double> v(n);
  for (double& x : v) x = rng.uniform(-2.0, 2.0);
  return v;
}

// SIMD lanes reorder sums and may fuse multiply-add, so elementwise results
// can differ from the scalar reference by a few ulps but no more.
void check_close(const std::vector<double>& a, const std::vector<double>& b,
                 double rel = 1e-13) {
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double scale = std::max({std::fabs(a[i]), std::fabs(b[i]), 1.0});
    CHECK(std::fabs(a[i] - b[i]) <= rel * scale);
  }
}

}  // namespace

TEST_CASE("scalar lane exists and active lane is available") {
  const std::vector<const Kernels*> lanes = ff::kernels::available();
  REQUIRE(!lanes.empty());
  bool has_scalar = false;
  bool has_active = false;
  for (const Kernels* lane : lanes) {
    if (std::string(lane->name) == "scalar") has_scalar = true;
    if (std::string(lane->name) == ff::kernels::active().name)
      has_active = true;
  }
  CHECK(has_scalar);
  CHECK(has_active);
}

TEST_CASE("lane selection by name") {
  CHECK(ff::kernels::select("scalar"));
  CHECK(std::string(ff::kernels::active().name) == "scalar");
  CHECK_FALSE(ff::kernels::select("bogus"));
  CHECK(std::string(ff::kernels::active().name) == "scalar");
  CHECK(ff::kernels::select("auto"));
}

TEST_CASE("dense_matvec fixture") {
  const Kernels& k = ff::kernels::scalar();
  const double w[] = {1.0, 2.0, 3.0, 4.0};
  const double x[] = {5.0, 6.0};
  const double b[] = {7.0, 8.0};
  double y[2] = {0.0, 0.0};
  k.dense_matvec(w, x, b, y, 2, 2);
  CHECK(y[0] == doctest::Approx(24.0));
  CHECK(y[1] == doctest::Approx(47.0));
}

TEST_CASE("matvec_transpose_acc fixture accumulates") {
  const Kernels& k = ff::kernels::scalar();
  const double w[] = {1.0, 2.0, 3.0, 4.0};
  const double g[] = {1.0, 1.0};
  double xg[] = {1.0, 1.0};
  k.matvec_transpose_acc(w, g, xg, 2, 2);
  CHECK(xg[0] == doctest::Approx(5.0));
  CHECK(xg[1] == doctest::Approx(7.0));
}

TEST_CASE("outer_acc fixture accumulates") {
  const Kernels& k = ff::kernels::scalar();
  const double g[] = {1.0, 2.0};
  const double x[] = {3.0, 4.0};
  double wg[] = {0.5, 0.0, 0.0, 0.0};
  k.outer_acc(wg, g, x, 2, 2);
  CHECK(wg[0] == doctest::Approx(3.5));
  CHECK(wg[1] == doctest::Approx(4.0));
  CHECK(wg[2] == doctest::Approx(6.0));
  CHECK(wg[3] == doctest::Approx(8.0));
}

TEST_CASE("dot, axpy, scale fixtures") {
  const Kernels& k = ff::kernels::scalar();
  const double a[] = {1.0, 2.0, 3.0};
  const double b[] = {4.0, 5.0, 6.0};
  CHECK(k.dot(a, b, 3) == doctest::Approx(32.0));
  double y[] = {1.0, 1.0, 1.0};
  k.axpy(y, 2.0, a, 3);
  CHECK(y[0] == doctest::Approx(3.0));
  CHECK(y[2] == doctest::Approx(7.0));
  k.scale(y, 0.5, 3);
  CHECK(y[0] == doctest::Approx(1.5));
  CHECK(y[2] == doctest::Approx(3.5));
}

TEST_CASE("adam_update single-parameter first step") {
  const Kernels& k = ff::kernels::scalar();
  double p = 1.0, m = 0.0, v = 0.0;
  const double g = 0.5;
  const double lr = 0.1, beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
  // After one step the bias-corrected moments are exactly g and g^2.
  k.adam_update(&p, &m, &v, &g, 1, lr, beta1, beta2, 1.0 / (1.0 - beta1),
                1.0 / (1.0 - beta2), eps);
  CHECK(m == doctest::Approx(0.05));
  CHECK(v == doctest::Approx(0.00025));
  CHECK(p == doctest::Approx(1.0 - lr * g / (std::fabs(g) + eps)));
}

TEST_CASE("every available lane matches the scalar reference") {
  const Kernels& ref = ff::kernels::scalar();
  ff::Rng rng(20260101);
  // Sizes straddle the vector widths so remainder tails are exercised.
  const std::size_t dims[][2] = {{1, 1},  {1, 7},  {3, 5},  {4, 4},
                                 {7, 13}, {8, 8},  {17, 23}, {32, 31}};

  for (const Kernels* lane : ff::kernels::available()) {
    CAPTURE(lane->name);
    for (const auto& d : dims) {
      const std::size_t rows = d[0], cols = d[1];
      const std::vector<double> w = random_vec(rng, rows * cols);
      const std::vector<double> x = random_vec(rng, cols);
      const std::vector<double> b = random_vec(rng, rows);
      const std::vector<double> g = random_vec(rng, rows);

      std::vector<double> y_ref(rows), y_lane(rows);
      ref.dense_matvec(w.data(), x.data(), b.data(), y_ref.data(), rows, cols);
      lane->dense_matvec(w.data(), x.data(), b.data(), y_lane.data(), rows,
                         cols);
      check_close(y_ref, y_lane);

      std::vector<double> xg_ref = random_vec(rng, cols);
      std::vector<double> xg_lane = xg_ref;
      ref.matvec_transpose_acc(w.data(), g.data(), xg_ref.data(), rows, cols);
      lane->matvec_transpose_acc(w.data(), g.data(), xg_lane.data(), rows,
                                 cols);
      check_close(xg_ref, xg_lane);

      std::vector<double> wg_ref = random_vec(rng, rows * cols);
      std::vector<double> wg_lane = wg_ref;
      ref.outer_acc(wg_ref.data(), g.data(), x.data(), rows, cols);
      lane->outer_acc(wg_lane.data(), g.data(), x.data(), rows, cols);
      check_close(wg_ref, wg_lane);

      const std::size_t n = rows * cols;
      const std::vector<double> u = random_vec(rng, n);
      const std::vector<double> t = random_vec(rng, n);
      const double dr = ref.dot(u.data(), t.data(), n);
      const double dl = lane->dot(u.data(), t.data(), n);
      CHECK(std::fabs(dr - dl) <= 1e-13 * std::max(std::fabs(dr), 1.0));

      std::vector<double> ya = random_vec(rng, n);
      std::vector<double> yb = ya;
      ref.axpy(ya.data(), 0.37, u.data(), n);
      lane->axpy(yb.data(), 0.37, u.data(), n);
      check_close(ya, yb);

      std::vector<double> sa = random_vec(rng, n);
      std::vector<double> sb = sa;
      ref.scale(sa.data(), -1.25, n);
      lane->scale(sb.data(), -1.25, n);
      // Elementwise multiply has one rounding per element in every lane.
      CHECK(std::memcmp(sa.data(), sb.data(), n * sizeof(double)) == 0);

      std::vector<double> p1 = random_vec(rng, n), p2 = p1;
      std::vector<double> m1 = random_vec(rng, n), m2 = m1;
      std::vector<double> v1(n, 0.01), v2 = v1;
      const std::vector<double> grad = random_vec(rng, n);
      ref.adam_update(p1.data(), m1.data(), v1.data(), grad.data(), n, 1e-3,
                      0.9, 0.999, 1.0 / (1.0 - 0.9), 1.0 / (1.0 - 0.999),
                      1e-8);
      lane->adam_update(p2.data(), m2.data(), v2.data(), grad.data(), n, 1e-3,
                        0.9, 0.999, 1.0 / (1.0 - 0.9), 1.0 / (1.0 - 0.999),
                        1e-8);
      check_close(p1, p2);
      check_close(m1, m2);
      check_close(v1, v2);
    }
  }
}
