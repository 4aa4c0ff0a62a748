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

#include "ff/kernels.hpp"

#include <atomic>
#include <cmath>

#include "kernels_lanes.hpp"

namespace ff::kernels {

namespace {

void s_dense_matvec(const double* w, const double* x, const double* b,
                    double* y, std::size_t rows, std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) {
    const double* row = w + r * cols;
    double acc = 0.0;
    for (std::size_t c = 0; c < cols; ++c) acc += row[c] * x[c];
    y[r] = acc + b[r];
  }
}

void s_matvec_transpose_acc(const double* w, const double* g, double* xg,
                            std::size_t rows, std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) {
    const double* row = w + r * cols;
    const double gr = g[r];
    for (std::size_t c = 0; c < cols; ++c) xg[c] += gr * row[c];
  }
}

void s_outer_acc(double* wg, const double* g, const double* x,
                 std::size_t rows, std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) {
    double* row = wg + r * cols;
    const double gr = g[r];
    for (std::size_t c = 0; c < cols; ++c) row[c] += gr * x[c];
  }
}

double s_dot(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void s_axpy(double* y, double alpha, const double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void s_scale(double* x, double alpha, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= alpha;
}

void s_adam_update(double* p, double* m, double* v, const double* g,
                   std::size_t n, double lr, double beta1, double beta2,
                   double inv_bc1, double inv_bc2, double eps) {
  for (std::size_t i = 0; i < n; ++i) {
    m[i] = beta1 * m[i] + (1.0 - beta1) * g[i];
    v[i] = beta2 * v[i] + (1.0 - beta2) * g[i] * g[i];
    const double mhat = m[i] * inv_bc1;
    const double vhat = v[i] * inv_bc2;
    p[i] -= lr * mhat / (std::sqrt(vhat) + eps);
  }
}

constexpr Kernels kScalar = {
    "scalar",        s_dense_matvec, s_matvec_transpose_acc, s_outer_acc,
    s_dot,           s_axpy,         s_scale,                s_adam_update,
};

std::atomic<const Kernels*> g_active{nullptr};

const Kernels* pick_best() {
  const Kernels* best = &kScalar;
#if defined(__x86_64__)
  if (const Kernels* k = avx2_lane()) best = k;
#elif defined(__aarch64__)
  if (const Kernels* k = neon_lane()) best = k;
#endif
  return best;
}

}  // namespace

const Kernels& scalar() { return kScalar; }

const Kernels& active() {
  const Kernels* k = g_active.load(std::memory_order_acquire);
  if (!k) {
    k = pick_best();
    g_active.store(k, std::memory_order_release);
  }
  return *k;
}

std::vector<const Kernels*> available() {
  std::vector<const Kernels*> out{&kScalar};
#if defined(__x86_64__)
  if (const Kernels* k = avx2_lane()) out.push_back(k);
#elif defined(__aarch64__)
  if (const Kernels* k = neon_lane()) out.push_back(k);
#endif
  return out;
}

bool select(std::string_view name) {
  if (name == "auto") {
    g_active.store(pick_best(), std::memory_order_release);
    return true;
  }
  for (const Kernels* k : available()) {
    if (name == k->name) {
      g_active.store(k, std::memory_order_release);
      return true;
    }
  }
  return false;
}

}  // namespace ff::kernels
