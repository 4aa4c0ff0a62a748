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

// NEON lane for aarch64. Advanced SIMD with double support is mandatory on
// aarch64, so no runtime feature probe is needed.

#include <arm_neon.h>

#include <cmath>
#include <cstddef>

#include "kernels_lanes.hpp"

namespace ff::kernels {

namespace {

inline double dot_row(const double* a, const double* b, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
    acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
  }
  for (; i + 2 <= n; i += 2) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
  }
  double acc = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void v_dense_matvec(const double* w, const double* x, const double* b,
                    double* y, std::size_t rows, std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) {
    y[r] = dot_row(w + r * cols, x, cols) + b[r];
  }
}

inline void axpy_n(double* y, double alpha, const double* x, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(alpha);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i)));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void v_matvec_transpose_acc(const double* w, const double* g, double* xg,
                            std::size_t rows, std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) {
    axpy_n(xg, g[r], w + r * cols, cols);
  }
}

void v_outer_acc(double* wg, const double* g, const double* x,
                 std::size_t rows, std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) {
    axpy_n(wg + r * cols, g[r], x, cols);
  }
}

double v_dot(const double* a, const double* b, std::size_t n) {
  return dot_row(a, b, n);
}

void v_axpy(double* y, double alpha, const double* x, std::size_t n) {
  axpy_n(y, alpha, x, n);
}

void v_scale(double* x, double alpha, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(alpha);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    vst1q_f64(x + i, vmulq_f64(vld1q_f64(x + i), va));
  }
  for (; i < n; ++i) x[i] *= alpha;
}

void v_adam_update(double* p, double* m, double* v, const double* g,
                   std::size_t n, double lr, double beta1, double beta2,
                   double inv_bc1, double inv_bc2, double eps) {
  const float64x2_t vb1 = vdupq_n_f64(beta1);
  const float64x2_t vb2 = vdupq_n_f64(beta2);
  const float64x2_t vc1 = vdupq_n_f64(1.0 - beta1);
  const float64x2_t vc2 = vdupq_n_f64(1.0 - beta2);
  const float64x2_t vibc1 = vdupq_n_f64(inv_bc1);
  const float64x2_t vibc2 = vdupq_n_f64(inv_bc2);
  const float64x2_t vlr = vdupq_n_f64(lr);
  const float64x2_t veps = vdupq_n_f64(eps);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t gi = vld1q_f64(g + i);
    float64x2_t mi = vld1q_f64(m + i);
    float64x2_t vi = vld1q_f64(v + i);
    mi = vfmaq_f64(vmulq_f64(vc1, gi), vb1, mi);
    vi = vfmaq_f64(vmulq_f64(vc2, vmulq_f64(gi, gi)), vb2, vi);
    vst1q_f64(m + i, mi);
    vst1q_f64(v + i, vi);
    const float64x2_t mhat = vmulq_f64(mi, vibc1);
    const float64x2_t vhat = vmulq_f64(vi, vibc2);
    const float64x2_t denom = vaddq_f64(vsqrtq_f64(vhat), veps);
    const float64x2_t step = vdivq_f64(vmulq_f64(vlr, mhat), denom);
    vst1q_f64(p + i, vsubq_f64(vld1q_f64(p + i), step));
  }
  for (; i < n; ++i) {
    m[i] = beta1 * m[i] + (1.0 - beta1) * g[i];
    v[i] = beta2 * v[i] + (1.0 - beta2) * g[i] * g[i];
    p[i] -= lr * (m[i] * inv_bc1) / (std::sqrt(v[i] * inv_bc2) + eps);
  }
}

constexpr Kernels kNeon = {
    "neon",  v_dense_matvec, v_matvec_transpose_acc, v_outer_acc,
    v_dot,   v_axpy,         v_scale,                v_adam_update,
};

}  // namespace

const Kernels* neon_lane() { return &kNeon; }

}  // namespace ff::kernels
