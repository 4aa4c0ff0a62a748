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

#include "doctest.h"

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "ff/errors.hpp"
#include "ff/geometry.hpp"
#include "ff/rng.hpp"
#include "ff/types.hpp"

namespace {

constexpr double kPi = ff::kTau / 2.0;

ff::Agent oriented(const std::string& id, double x, double y, double heading) {
  ff::Agent a;
  a.id = id;
  a.position = {x, y};
  a.heading = ff::normalize_angle(heading);
  return a;
}

ff::Scene random_scene(ff::Rng& rng, std::size_t n) {
  ff::Scene scene;
  scene.frame_id = "r";
  for (std::size_t k = 0; k < n; ++k) {
    scene.agents.push_back(oriented("a" + std::to_string(k),
                                    rng.uniform(-3.0, 3.0),
                                    rng.uniform(-3.0, 3.0),
                                    rng.uniform(0.0, ff::kTau)));
  }
  return scene;
}

// World-frame rigid motion: rotate by alpha about the origin, then translate.
ff::Scene rigidly_moved(const ff::Scene& scene, double alpha, ff::Vec2 t) {
  ff::Scene out = scene;
  const double c = std::cos(alpha), s = std::sin(alpha);
  for (ff::Agent& a : out.agents) {
    const ff::Vec2 p = a.position;
    a.position = {c * p.x - s * p.y + t.x, s * p.x + c * p.y + t.y};
    if (a.heading) a.heading = ff::normalize_angle(*a.heading + alpha);
    if (a.velocity) {
      const ff::Vec2 v = *a.velocity;
      a.velocity = ff::Vec2{c * v.x - s * v.y, s * v.x + c * v.y};
    }
  }
  return out;
}

}  // namespace

TEST_CASE("normalize_angle wraps into [0, 2pi)") {
  CHECK(ff::normalize_angle(0.0) == 0.0);
  CHECK(ff::normalize_angle(ff::kTau) == 0.0);
  CHECK(ff::normalize_angle(-kPi / 2.0) == doctest::Approx(1.5 * kPi));
  CHECK(ff::normalize_angle(7.0 * kPi) == doctest::Approx(kPi));
  CHECK(ff::normalize_angle(1.0) == doctest::Approx(1.0));
}

TEST_CASE("canonical_frame fixtures") {
  SUBCASE("horizontal dyad") {
    const ff::CanonicalFrame f = ff::canonical_frame({0.0, 0.0}, {2.0, 0.0});
    CHECK(f.origin.x == doctest::Approx(1.0));
    CHECK(f.origin.y == doctest::Approx(0.0));
    CHECK(f.rotation == doctest::Approx(0.0));
  }
  SUBCASE("vertical dyad rotates by pi/2") {
    const ff::CanonicalFrame f = ff::canonical_frame({0.0, 0.0}, {0.0, 2.0});
    CHECK(f.origin.y == doctest::Approx(1.0));
    CHECK(f.rotation == doctest::Approx(kPi / 2.0));
  }
  SUBCASE("coincident positions fall back to zero rotation") {
    const ff::CanonicalFrame f = ff::canonical_frame({1.0, 1.0}, {1.0, 1.0});
    CHECK(f.origin.x == doctest::Approx(1.0));
    CHECK(f.rotation == 0.0);
  }
}

TEST_CASE("canonical_frame by id validates agents") {
  ff::Scene scene;
  scene.agents = {oriented("a", 0, 0, 0), oriented("b", 2, 0, 0)};
  const ff::CanonicalFrame f = ff::canonical_frame(scene, "a", "b");
  CHECK(f.origin.x == doctest::Approx(1.0));
  CHECK_THROWS_AS(ff::canonical_frame(scene, "a", "zz"), ff::InputError);
  CHECK_THROWS_AS(ff::canonical_frame(scene, "a", "a"), ff::InputError);
}

TEST_CASE("encode_feature orientation fixtures") {
  SUBCASE("identity frame") {
    const ff::CanonicalFrame f = ff::canonical_frame({0.0, 0.0}, {2.0, 0.0});
    const ff::Agent a = oriented("k", 2.0, 1.0, kPi / 2.0);
    const std::array<double, 4> feat =
        ff::encode_feature(a, f, ff::FeatureMode::kOrientation);
    CHECK(feat[0] == doctest::Approx(1.0));
    CHECK(feat[1] == doctest::Approx(1.0));
    CHECK(feat[2] == doctest::Approx(0.0));
    CHECK(feat[3] == doctest::Approx(1.0));
  }
  SUBCASE("rotated frame subtracts phi from headings") {
    const ff::CanonicalFrame f = ff::canonical_frame({0.0, 0.0}, {0.0, 2.0});
    const ff::Agent a = oriented("k", 0.0, 0.0, kPi / 2.0);
    const std::array<double, 4> feat =
        ff::encode_feature(a, f, ff::FeatureMode::kOrientation);
    CHECK(feat[0] == doctest::Approx(-1.0));
    CHECK(feat[1] == doctest::Approx(0.0));
    CHECK(feat[2] == doctest::Approx(1.0));
    CHECK(feat[3] == doctest::Approx(0.0));
  }
  SUBCASE("dyad endpoints land on the x axis") {
    const ff::Vec2 pi{0.3, 0.4}, pj{1.1, 2.0};
    const double d = std::hypot(pj.x - pi.x, pj.y - pi.y);
    const ff::CanonicalFrame f = ff::canonical_frame(pi, pj);
    const std::array<double, 4> fi = ff::encode_feature(
        oriented("i", pi.x, pi.y, 0.0), f, ff::FeatureMode::kOrientation);
    const std::array<double, 4> fj = ff::encode_feature(
        oriented("j", pj.x, pj.y, 0.0), f, ff::FeatureMode::kOrientation);
    CHECK(fi[0] == doctest::Approx(-d / 2.0));
    CHECK(fi[1] == doctest::Approx(0.0));
    CHECK(fj[0] == doctest::Approx(d / 2.0));
    CHECK(fj[1] == doctest::Approx(0.0));
  }
  SUBCASE("missing heading is an input error") {
    ff::Agent a;
    a.id = "k";
    a.position = {0.0, 0.0};
    const ff::CanonicalFrame f = ff::canonical_frame({0.0, 0.0}, {2.0, 0.0});
    CHECK_THROWS_AS(ff::encode_feature(a, f, ff::FeatureMode::kOrientation),
                    ff::InputError);
  }
}

TEST_CASE("encode_feature velocity fixtures") {
  ff::Agent a;
  a.id = "k";
  a.position = {0.0, 1.0};

  SUBCASE("velocity rotates into the frame and is unit normalized") {
    a.velocity = ff::Vec2{3.0, 0.0};
    const ff::CanonicalFrame f = ff::canonical_frame({0.0, 0.0}, {0.0, 2.0});
    const std::array<double, 4> feat =
        ff::encode_feature(a, f, ff::FeatureMode::kVelocity);
    CHECK(feat[0] == doctest::Approx(0.0));
    CHECK(feat[1] == doctest::Approx(0.0));
    CHECK(feat[2] == doctest::Approx(0.0));
    CHECK(feat[3] == doctest::Approx(-1.0));
  }
  SUBCASE("speeds below the threshold encode the zero direction") {
    a.velocity = ff::Vec2{1e-9, -1e-9};
    const ff::CanonicalFrame f = ff::canonical_frame({0.0, 0.0}, {2.0, 0.0});
    const std::array<double, 4> feat =
        ff::encode_feature(a, f, ff::FeatureMode::kVelocity);
    CHECK(feat[2] == 0.0);
    CHECK(feat[3] == 0.0);
  }
  SUBCASE("missing velocity is an input error") {
    const ff::CanonicalFrame f = ff::canonical_frame({0.0, 0.0}, {2.0, 0.0});
    CHECK_THROWS_AS(ff::encode_feature(a, f, ff::FeatureMode::kVelocity),
                    ff::InputError);
  }
}

TEST_CASE("encoded features are invariant to rigid motions") {
  ff::Rng rng(123);
  for (int trial = 0; trial < 20; ++trial) {
    const ff::Scene scene = random_scene(rng, 5);
    const ff::Scene moved = rigidly_moved(
        scene, rng.uniform(0.0, ff::kTau),
        {rng.uniform(-10.0, 10.0), rng.uniform(-10.0, 10.0)});
    const ff::CanonicalFrame f0 = ff::canonical_frame(scene, "a0", "a1");
    const ff::CanonicalFrame f1 = ff::canonical_frame(moved, "a0", "a1");
    for (std::size_t k = 0; k < scene.agents.size(); ++k) {
      const std::array<double, 4> a = ff::encode_feature(
          scene.agents[k], f0, ff::FeatureMode::kOrientation);
      const std::array<double, 4> b = ff::encode_feature(
          moved.agents[k], f1, ff::FeatureMode::kOrientation);
      for (int c = 0; c < 4; ++c) CHECK(a[c] == doctest::Approx(b[c]).epsilon(1e-9));
    }
  }
}

TEST_CASE("swapping the dyad point-reflects every feature") {
  ff::Rng rng(456);
  const ff::Scene scene = random_scene(rng, 6);
  const ff::CanonicalFrame fij = ff::canonical_frame(scene, "a2", "a4");
  const ff::CanonicalFrame fji = ff::canonical_frame(scene, "a4", "a2");
  for (const ff::Agent& agent : scene.agents) {
    const std::array<double, 4> a =
        ff::encode_feature(agent, fij, ff::FeatureMode::kOrientation);
    const std::array<double, 4> b =
        ff::encode_feature(agent, fji, ff::FeatureMode::kOrientation);
    for (int c = 0; c < 4; ++c) {
      CHECK(a[c] == doctest::Approx(-b[c]).epsilon(1e-12));
    }
  }
}

TEST_CASE("augment_flip_vertical fixtures and involution") {
  ff::Scene scene;
  scene.frame_id = "f";
  scene.agents = {oriented("a", 1.0, 2.0, 0.0),
                  oriented("b", -0.5, 0.25, kPi / 2.0)};
  scene.ground_truth = ff::GroupPartition{{{"a", "b"}}, {}};

  const ff::Scene flipped = ff::augment_flip_vertical(scene);
  CHECK(flipped.agents[0].position.x == doctest::Approx(-1.0));
  CHECK(flipped.agents[0].position.y == doctest::Approx(2.0));
  CHECK(*flipped.agents[0].heading == doctest::Approx(kPi));
  CHECK(*flipped.agents[1].heading == doctest::Approx(kPi / 2.0));
  REQUIRE(flipped.ground_truth.has_value());
  CHECK(flipped.ground_truth->groups == scene.ground_truth->groups);

  const ff::Scene twice = ff::augment_flip_vertical(flipped);
  for (std::size_t k = 0; k < scene.agents.size(); ++k) {
    CHECK(twice.agents[k].position.x ==
          doctest::Approx(scene.agents[k].position.x));
    CHECK(*twice.agents[k].heading ==
          doctest::Approx(*scene.agents[k].heading));
  }
}

TEST_CASE("augment_rotate180 fixtures and involution") {
  ff::Scene scene;
  scene.agents = {oriented("a", 1.0, -2.0, 0.3)};
  const ff::Scene rotated = ff::augment_rotate180(scene);
  CHECK(rotated.agents[0].position.x == doctest::Approx(-1.0));
  CHECK(rotated.agents[0].position.y == doctest::Approx(2.0));
  CHECK(*rotated.agents[0].heading == doctest::Approx(0.3 + kPi));

  const ff::Scene twice = ff::augment_rotate180(rotated);
  CHECK(twice.agents[0].position.x == doctest::Approx(1.0));
  CHECK(*twice.agents[0].heading ==
        doctest::Approx(0.3));
}

TEST_CASE("flipping a scene mirrors dyad features across the x axis") {
  ff::Rng rng(789);
  const ff::Scene scene = random_scene(rng, 5);
  const ff::Scene flipped = ff::augment_flip_vertical(scene);
  const ff::CanonicalFrame f = ff::canonical_frame(scene, "a0", "a3");
  const ff::CanonicalFrame g = ff::canonical_frame(flipped, "a0", "a3");
  for (std::size_t k = 0; k < scene.agents.size(); ++k) {
    const std::array<double, 4> a =
        ff::encode_feature(scene.agents[k], f, ff::FeatureMode::kOrientation);
    const std::array<double, 4> b = ff::encode_feature(
        flipped.agents[k], g, ff::FeatureMode::kOrientation);
    CHECK(b[0] == doctest::Approx(a[0]).epsilon(1e-12));
    CHECK(b[1] == doctest::Approx(-a[1]).epsilon(1e-12));
    CHECK(b[2] == doctest::Approx(a[2]).epsilon(1e-12));
    CHECK(b[3] == doctest::Approx(-a[3]).epsilon(1e-12));
  }
}

TEST_CASE("augment_all yields four distinct frame ids, original first") {
  ff::Scene scene;
  scene.frame_id = "f9";
  scene.agents = {oriented("a", 1.0, 0.0, 0.0), oriented("b", 0.0, 1.0, 1.0)};
  const std::vector<ff::Scene> variants = ff::augment_all(scene);
  REQUIRE(variants.size() == 4);
  CHECK(variants[0].frame_id == "f9");
  CHECK(variants[0].agents[0].position == scene.agents[0].position);
  CHECK(variants[1].frame_id == "f9#r");
  CHECK(variants[2].frame_id == "f9#f");
  CHECK(variants[3].frame_id == "f9#rf");
  CHECK(variants[1].agents[0].position.x == doctest::Approx(-1.0));
  CHECK(variants[2].agents[0].position.x == doctest::Approx(-1.0));
  CHECK(variants[3].agents[0].position.x == doctest::Approx(1.0));
  CHECK(variants[3].agents[1].position.y == doctest::Approx(-1.0));
}

TEST_CASE("derive_velocities uses displacement from the previous frame") {
  ff::Scene f1, f2;
  f1.frame_id = "t0";
  f1.agents = {oriented("a", 0.0, 0.0, 1.0)};
  f2.frame_id = "t1";
  f2.agents = {oriented("a", 1.0, 2.0, 1.0), oriented("b", 5.0, 5.0, 0.0)};

  const std::vector<ff::Scene> out = ff::derive_velocities({f1, f2});
  REQUIRE(out.size() == 2);
  CHECK_FALSE(out[0].agents[0].heading.has_value());
  REQUIRE(out[0].agents[0].velocity.has_value());
  CHECK(out[0].agents[0].velocity->x == 0.0);
  CHECK(out[0].agents[0].velocity->y == 0.0);
  CHECK(out[1].agents[0].velocity->x == doctest::Approx(1.0));
  CHECK(out[1].agents[0].velocity->y == doctest::Approx(2.0));
  // First appearance mid-sequence also gets the zero velocity.
  CHECK(out[1].agents[1].velocity->x == 0.0);
}

TEST_CASE("agent_index finds ids and rejects unknowns") {
  ff::Scene scene;
  scene.agents = {oriented("x", 0, 0, 0), oriented("y", 1, 1, 0)};
  CHECK(ff::agent_index(scene, "y") == 1);
  CHECK_THROWS_AS(ff::agent_index(scene, "nope"), ff::InputError);
}
