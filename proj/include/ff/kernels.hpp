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

#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

namespace ff::kernels {

// Inner-loop primitives behind the network and optimizer. Every entry has a
// scalar reference implementation; SIMD lanes (AVX2 on x86-64, NEON on
// aarch64) are selected at runtime when the CPU supports them and are
// equivalence-tested against the reference.
struct Kernels {
  const char* name;

  /// y = W x + b, with W row-major (rows x cols).
  void (*dense_matvec)(const double* w, const double* x, const double* b,
                       double* y, std::size_t rows, std::size_t cols);

  /// xg += W^T g, with W row-major (rows x cols); g has length rows.
  void (*matvec_transpose_acc)(const double* w, const double* g, double* xg,
                               std::size_t rows, std::size_t cols);

  /// wg += g x^T (outer product), wg row-major (rows x cols).
  void (*outer_acc)(double* wg, const double* g, const double* x,
                    std::size_t rows, std::size_t cols);

  double (*dot)(const double* a, const double* b, std::size_t n);

  /// y += alpha * x
  void (*axpy)(double* y, double alpha, const double* x, std::size_t n);

  /// x *= alpha
  void (*scale)(double* x, double alpha, std::size_t n);

  /// One Adam update over n parameters. inv_bc1/inv_bc2 are the
  /// bias-correction reciprocals 1/(1-beta1^t) and 1/(1-beta2^t).
  void (*adam_update)(double* p, double* m, double* v, const double* g,
                      std::size_t n, double lr, double beta1, double beta2,
                      double inv_bc1, double inv_bc2, double eps);
};

/// Active kernel set; chosen once per process (best available lane).
const Kernels& active();

const Kernels& scalar();

/// All lanes usable on this CPU (always includes scalar).
std::vector<const Kernels*> available();

/// Force a lane by name ("scalar", "avx2", "neon", "auto").
/// Returns false if the lane is unknown or unsupported on this CPU.
bool select(std::string_view name);

}  // namespace ff::kernels
