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

// Self-describing JSON checkpoints: hyperparameters, feature mode, and all
// weight matrices in row-major order. Loading validates every shape.

#ifndef FF_CHECKPOINT_HPP_
#define FF_CHECKPOINT_HPP_

#include <string>

#include "ff/dante.hpp"

namespace ff {

// Serialization is deterministic: identical parameters give identical bytes.
void save_checkpoint(const DanteParams& params, const std::string& path);

// Throws ParseError for malformed JSON and InputError for a structurally
// invalid checkpoint (wrong shapes, unknown activation, missing keys).
DanteParams load_checkpoint(const std::string& path);

}  // namespace ff

#endif  // FF_CHECKPOINT_HPP_
