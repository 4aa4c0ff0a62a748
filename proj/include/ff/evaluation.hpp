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

// Group-detection metrics: tolerant one-to-one group matching, precision /
// recall / F1 at tolerance T, and the Group Detection Success Rate.

#ifndef FF_EVALUATION_HPP_
#define FF_EVALUATION_HPP_

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "ff/types.hpp"

namespace ff {

struct MatchCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;

  friend bool operator==(const MatchCounts&, const MatchCounts&) = default;
};

// Matches predicted groups to truth groups at tolerance T in (0, 1]. A truth
// group g is matched by a predicted group p iff |p intersect g| >=
// ceil(T*|g|) and |p \ g| <= floor((1-T)*|g|); at T=1 this is exact-member
// matching. Matching is one-to-one and greedy: descending intersection size,
// ties to the smaller then lexicographically earlier predicted group.
// Singletons never participate. Both partitions must cover the same ids.
MatchCounts match_groups(const GroupPartition& predicted,
                         const GroupPartition& truth, double T);

struct EvalReport {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  double precision = 0.0;  // TP/(TP+FP), 0/0 -> 0
  double recall = 0.0;     // TP/(TP+FN), 0/0 -> 0
  double f1 = 0.0;         // harmonic mean, 0/0 -> 0
  std::optional<double> gdsr;
  std::vector<MatchCounts> per_frame;
};

// Sums match_groups counts over aligned frame lists.
EvalReport f1_at(const std::vector<GroupPartition>& predicted,
                 const std::vector<GroupPartition>& truth, double T);

// Fraction of truth groups (over all frames) with some predicted group
// containing at least 60% of their members; each predicted group is credited
// to at most one truth group per frame. No truth groups at all scores 1.0.
double gdsr(const std::vector<GroupPartition>& predicted,
            const std::vector<GroupPartition>& truth);

// Flat `key value` lines, one metric per line.
std::string report_text(const EvalReport& report);

}  // namespace ff

#endif  // FF_EVALUATION_HPP_
