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

// Canonical dyad frames, spatial feature encoding, scene augmentation, and
// velocity derivation. All operations are pure.

#ifndef FF_GEOMETRY_HPP_
#define FF_GEOMETRY_HPP_

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "ff/types.hpp"

namespace ff {

inline constexpr double kTau = 6.283185307179586476925286766559;

// Speeds below this encode direction (0, 0) instead of a unit vector.
inline constexpr double kSpeedThreshold = 1e-6;

// Reduces an angle to [0, 2*pi).
double normalize_angle(double radians);

// Local frame for an ordered dyad: origin at the midpoint, x-axis pointing
// from the first agent to the second.
struct CanonicalFrame {
  Vec2 origin;
  double rotation = 0.0;  // angle phi of the frame's x-axis in world coords
};

// Index of the agent with the given id; throws InputError when absent.
std::size_t agent_index(const Scene& scene, const std::string& id);

// Frame from two world positions. Coincident positions fall back to phi = 0.
CanonicalFrame canonical_frame(Vec2 first, Vec2 second);
CanonicalFrame canonical_frame(const Scene& scene, const std::string& i,
                               const std::string& j);

// Encodes an agent relative to a frame as (x', y', cos t', sin t') in
// orientation mode, or (x', y', vx', vy') with a unit-normalized rotated
// velocity in velocity mode. Throws InputError when the mode's feature is
// missing from the agent.
std::array<double, 4> encode_feature(const Agent& agent,
                                     const CanonicalFrame& frame,
                                     FeatureMode mode);

// Rotates every position and heading by pi about the world origin. Ground
// truth is unchanged. Involution.
Scene augment_rotate180(const Scene& scene);

// Mirrors over the vertical axis: x negated, heading t -> pi - t. Ground
// truth is unchanged. Involution.
Scene augment_flip_vertical(const Scene& scene);

// The scene plus its rotated, flipped, and rotated-flipped variants, in that
// order, with frame_id suffixes to keep ids unique.
std::vector<Scene> augment_all(const Scene& scene);

// Per-agent displacement from the previous frame (zero on first appearance);
// headings are dropped and the result is velocity mode.
std::vector<Scene> derive_velocities(const std::vector<Scene>& frames);

}  // namespace ff

#endif  // FF_GEOMETRY_HPP_
