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

#include "ff/kernels.hpp"

namespace ff::kernels {

// Arch-specific lanes, each defined in its own translation unit built with
// the matching target flags. Return nullptr when the running CPU lacks the
// required features.
#if defined(__x86_64__)
const Kernels* avx2_lane();
#endif
#if defined(__aarch64__)
const Kernels* neon_lane();
#endif

}  // namespace ff::kernels
