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

// Corpus text formats, contiguous cross-validation folds, and the synthetic
// scene generator.
//
// Features file: one agent per line, `frame_id agent_id x y theta` in
// orientation mode or `frame_id agent_id x y vx vy` in velocity mode.
// Groups file: `frame_id id1 id2 ...` declares one group per line; a line
// with a single id declares an explicit singleton. `#` starts a comment.
// Frames never mentioned in the groups file are all-singletons.

#ifndef FF_DATA_IO_HPP_
#define FF_DATA_IO_HPP_

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ff/types.hpp"

namespace ff {

struct Corpus {
  std::vector<Scene> scenes;  // time order
  FeatureMode mode = FeatureMode::kOrientation;
  std::string name;
};

struct ParseOptions {
  // When set, a frame absent from the groups file is an error instead of an
  // all-singleton ground truth.
  bool strict_frames = false;
};

std::vector<Scene> parse_features(const std::string& path, FeatureMode mode);

struct GroupLine {
  std::size_t line_number = 0;
  std::string frame_id;
  std::vector<std::string> ids;
};

std::vector<GroupLine> parse_group_lines(const std::string& path);

// Partition per reference scene, in reference order. Group lines must refer
// to known frames and agents, and no agent may appear twice per frame.
std::vector<GroupPartition> partitions_for(
    const std::vector<Scene>& reference, const std::vector<GroupLine>& lines,
    const ParseOptions& options = {});

Corpus parse_corpus(const std::string& features_path,
                    const std::string& groups_path, FeatureMode mode,
                    const std::string& name = "",
                    const ParseOptions& options = {});

// Writers emit floats with 9 significant digits; parse_corpus of the output
// reproduces the corpus to that precision. Groups files list groups first,
// then one line per singleton.
void write_features(const Corpus& corpus, const std::string& path);
void write_groups(const Corpus& corpus, const std::string& path);
void serialize_corpus(const Corpus& corpus, const std::string& features_path,
                      const std::string& groups_path);

// Key-value sidecar describing a corpus (name, mode, scene count plus any
// extra entries), one `key value` pair per line.
void write_metadata(const Corpus& corpus, const std::string& path,
                    const std::map<std::string, std::string>& extra = {});

inline constexpr double kValidationFraction = 0.15;

struct FoldSplit {
  std::size_t fold_count = 0;
  struct Fold {
    std::vector<std::size_t> train;
    std::vector<std::size_t> validation;
    std::vector<std::size_t> test;
  };
  std::vector<Fold> folds;
};

// Cuts scene_count indices into fold_count contiguous test blocks of
// near-equal size (remainder to the earliest blocks). Per fold, validation
// is the contiguous 15% (at least 1) of the remaining scenes farthest from
// the test block, preferring the tail on ties; train is everything else.
FoldSplit make_folds(std::size_t scene_count, std::size_t fold_count);
FoldSplit make_folds(const Corpus& corpus, std::size_t fold_count);

struct SynthConfig {
  std::size_t scene_count = 1000;
  std::size_t agents_min = 4;
  std::size_t agents_max = 8;
  std::size_t groups_min = 1;
  std::size_t groups_max = 3;
  std::size_t group_size_max = 4;
  double radius_min = 0.5;        // conversation circle radius, meters
  double radius_max = 1.2;
  double sigma_theta = 0.15;      // heading noise, radians
  double sigma_x = 0.05;          // positional jitter, meters
  double area_half_extent = 1.8;  // scenes live in [-h, h]^2
  double group_gap = 0.0;         // clearance between circle rims
  double distractor_clearance = 1.5;  // distractor to any circle center
  double agent_clearance = 0.4;       // any two agents
  double distractor_probability = 0.75;  // chance an extra agent roams alone
  // Fraction of distractor placements sampled just outside a group's
  // clearance ring (bystanders) instead of uniformly over the area.
  double distractor_hover_probability = 0.85;
  double distractor_hover_band = 0.45;  // ring width beyond the clearance
  std::size_t max_retries = 200;
  std::string name = "synthetic";
};

// Scenes of circular conversation groups plus non-interacting distractors,
// with recorded ground truth. Identical seeds give identical corpora.
// Throws InputError when placement keeps failing after max_retries.
Corpus generate_synthetic(const SynthConfig& config, std::uint64_t seed);

}  // namespace ff

#endif  // FF_DATA_IO_HPP_
