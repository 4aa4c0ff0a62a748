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

#ifndef FF_TYPES_HPP_
#define FF_TYPES_HPP_

#include <algorithm>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace ff {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double s, Vec2 v) { return {s * v.x, s * v.y}; }
  friend bool operator==(const Vec2&, const Vec2&) = default;
};

// Which spatial feature accompanies positions: a heading angle or a motion
// vector derived from consecutive frames.
enum class FeatureMode { kOrientation, kVelocity };

struct Agent {
  std::string id;
  Vec2 position;
  // Exactly one of these is engaged, matching the dataset's feature mode.
  std::optional<double> heading;   // radians in [0, 2*pi)
  std::optional<Vec2> velocity;    // meters per frame
};

// Hard assignment of every agent in a scene to one group or to no group.
// Groups and singletons are disjoint; every group has at least 2 members.
struct GroupPartition {
  std::vector<std::vector<std::string>> groups;
  std::vector<std::string> singletons;

  // Sorts members within groups, groups by leading member, and singletons,
  // giving a canonical form for equality tests and serialization.
  void normalize() {
    for (auto& g : groups) std::sort(g.begin(), g.end());
    std::sort(groups.begin(), groups.end());
    std::sort(singletons.begin(), singletons.end());
  }

  friend bool operator==(const GroupPartition&, const GroupPartition&) =
      default;
};

// True when a and b share a group of the partition.
inline bool same_group(const GroupPartition& partition, const std::string& a,
                       const std::string& b) {
  for (const auto& g : partition.groups) {
    const bool has_a = std::find(g.begin(), g.end(), a) != g.end();
    const bool has_b = std::find(g.begin(), g.end(), b) != g.end();
    if (has_a && has_b) return true;
    if (has_a || has_b) return false;
  }
  return false;
}

struct Scene {
  std::string frame_id;
  std::vector<Agent> agents;
  std::optional<GroupPartition> ground_truth;
};

// Symmetric pairwise affinities with a zero diagonal, row-major over ids.
struct AffinityMatrix {
  std::vector<std::string> ids;
  std::vector<double> values;

  std::size_t size() const { return ids.size(); }
  double at(std::size_t i, std::size_t j) const {
    return values[i * ids.size() + j];
  }
  double& at(std::size_t i, std::size_t j) {
    return values[i * ids.size() + j];
  }
};

}  // namespace ff

#endif  // FF_TYPES_HPP_
