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

#include "ff/geometry.hpp"

#include <cmath>
#include <unordered_map>

#include "ff/errors.hpp"

namespace ff {

double normalize_angle(double radians) {
  double a = std::fmod(radians, kTau);
  if (a < 0.0) a += kTau;
  if (a >= kTau) a = 0.0;
  return a;
}

std::size_t agent_index(const Scene& scene, const std::string& id) {
  for (std::size_t k = 0; k < scene.agents.size(); ++k) {
    if (scene.agents[k].id == id) return k;
  }
  throw InputError("unknown agent id '" + id + "' in frame '" +
                   scene.frame_id + "'");
}

CanonicalFrame canonical_frame(Vec2 first, Vec2 second) {
  CanonicalFrame frame;
  frame.origin = 0.5 * (first + second);
  const Vec2 d = second - first;
  if (d.x == 0.0 && d.y == 0.0) {
    frame.rotation = 0.0;  // coincident dyad: any axis works, pick a fixed one
  } else {
    frame.rotation = std::atan2(d.y, d.x);
  }
  return frame;
}

CanonicalFrame canonical_frame(const Scene& scene, const std::string& i,
                               const std::string& j) {
  if (i == j) {
    throw InputError("canonical frame requires two distinct agents, got '" +
                     i + "' twice");
  }
  const Agent& a = scene.agents[agent_index(scene, i)];
  const Agent& b = scene.agents[agent_index(scene, j)];
  return canonical_frame(a.position, b.position);
}

std::array<double, 4> encode_feature(const Agent& agent,
                                     const CanonicalFrame& frame,
                                     FeatureMode mode) {
  const double c = std::cos(frame.rotation);
  const double s = std::sin(frame.rotation);
  const Vec2 d = agent.position - frame.origin;
  const double xp = c * d.x + s * d.y;
  const double yp = -s * d.x + c * d.y;
  if (mode == FeatureMode::kOrientation) {
    if (!agent.heading.has_value()) {
      throw InputError("agent '" + agent.id +
                       "' has no heading but orientation mode was requested");
    }
    const double tp = *agent.heading - frame.rotation;
    return {xp, yp, std::cos(tp), std::sin(tp)};
  }
  if (!agent.velocity.has_value()) {
    throw InputError("agent '" + agent.id +
                     "' has no velocity but velocity mode was requested");
  }
  const Vec2 v = *agent.velocity;
  const double speed = std::hypot(v.x, v.y);
  if (speed < kSpeedThreshold) {
    return {xp, yp, 0.0, 0.0};
  }
  const double vxp = (c * v.x + s * v.y) / speed;
  const double vyp = (-s * v.x + c * v.y) / speed;
  return {xp, yp, vxp, vyp};
}

Scene augment_rotate180(const Scene& scene) {
  Scene out = scene;
  for (Agent& a : out.agents) {
    a.position = {-a.position.x, -a.position.y};
    if (a.heading.has_value()) {
      a.heading = normalize_angle(*a.heading + kTau / 2.0);
    }
    if (a.velocity.has_value()) {
      a.velocity = Vec2{-a.velocity->x, -a.velocity->y};
    }
  }
  return out;
}

Scene augment_flip_vertical(const Scene& scene) {
  Scene out = scene;
  for (Agent& a : out.agents) {
    a.position.x = -a.position.x;
    if (a.heading.has_value()) {
      a.heading = normalize_angle(kTau / 2.0 - *a.heading);
    }
    if (a.velocity.has_value()) {
      a.velocity = Vec2{-a.velocity->x, a.velocity->y};
    }
  }
  return out;
}

std::vector<Scene> augment_all(const Scene& scene) {
  std::vector<Scene> out;
  out.reserve(4);
  out.push_back(scene);
  out.push_back(augment_rotate180(scene));
  out.push_back(augment_flip_vertical(scene));
  out.push_back(augment_rotate180(out.back()));
  out[1].frame_id += "#r";
  out[2].frame_id += "#f";
  out[3].frame_id += "#rf";
  return out;
}

std::vector<Scene> derive_velocities(const std::vector<Scene>& frames) {
  std::vector<Scene> out;
  out.reserve(frames.size());
  std::unordered_map<std::string, Vec2> previous;
  for (const Scene& scene : frames) {
    Scene converted = scene;
    std::unordered_map<std::string, Vec2> current;
    for (Agent& a : converted.agents) {
      const auto it = previous.find(a.id);
      a.velocity =
          it == previous.end() ? Vec2{0.0, 0.0} : a.position - it->second;
      a.heading.reset();
      current.emplace(a.id, a.position);
    }
    previous = std::move(current);
    out.push_back(std::move(converted));
  }
  return out;
}

}  // namespace ff
