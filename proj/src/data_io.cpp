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

#include "ff/data_io.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "ff/errors.hpp"
#include "ff/geometry.hpp"
#include "ff/rng.hpp"

namespace ff {

namespace {

std::vector<std::string> tokenize(const std::string& raw) {
  const std::size_t hash = raw.find('#');
  std::istringstream stream(hash == std::string::npos ? raw
                                                      : raw.substr(0, hash));
  std::vector<std::string> tokens;
  std::string token;
  while (stream >> token) tokens.push_back(std::move(token));
  return tokens;
}

double parse_number(const std::string& token, std::size_t line) {
  errno = 0;
  char* end = nullptr;
  const double value = std::strtod(token.c_str(), &end);
  if (end != token.c_str() + token.size() || token.empty() || errno == ERANGE ||
      !std::isfinite(value)) {
    throw ParseError("expected a finite number, got '" + token + "'", line);
  }
  return value;
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw InputError("cannot open '" + path + "' for reading");
  }
  return in;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw InputError("cannot open '" + path + "' for writing");
  }
  return out;
}

std::string format_number(double v) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.9g", v);
  return buffer;
}

}  // namespace

std::vector<Scene> parse_features(const std::string& path, FeatureMode mode) {
  std::ifstream in = open_input(path);
  const std::size_t expected_tokens =
      mode == FeatureMode::kOrientation ? 5 : 6;
  std::vector<Scene> scenes;
  std::unordered_map<std::string, std::size_t> frame_index;
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::vector<std::string> tokens = tokenize(raw);
    if (tokens.empty()) continue;
    if (tokens.size() != expected_tokens) {
      throw ParseError("expected " + std::to_string(expected_tokens) +
                           " fields, got " + std::to_string(tokens.size()),
                       line);
    }
    const std::string& frame_id = tokens[0];
    auto [it, inserted] = frame_index.emplace(frame_id, scenes.size());
    if (inserted) {
      scenes.push_back(Scene{frame_id, {}, std::nullopt});
    }
    Scene& scene = scenes[it->second];
    Agent agent;
    agent.id = tokens[1];
    for (const Agent& existing : scene.agents) {
      if (existing.id == agent.id) {
        throw ParseError("agent '" + agent.id + "' repeated in frame '" +
                             frame_id + "'",
                         line);
      }
    }
    agent.position.x = parse_number(tokens[2], line);
    agent.position.y = parse_number(tokens[3], line);
    if (mode == FeatureMode::kOrientation) {
      agent.heading = normalize_angle(parse_number(tokens[4], line));
    } else {
      agent.velocity =
          Vec2{parse_number(tokens[4], line), parse_number(tokens[5], line)};
    }
    scene.agents.push_back(std::move(agent));
  }
  return scenes;
}

std::vector<GroupLine> parse_group_lines(const std::string& path) {
  std::ifstream in = open_input(path);
  std::vector<GroupLine> lines;
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::vector<std::string> tokens = tokenize(raw);
    if (tokens.empty()) continue;
    GroupLine entry;
    entry.line_number = line;
    entry.frame_id = tokens[0];
    entry.ids.assign(tokens.begin() + 1, tokens.end());
    lines.push_back(std::move(entry));
  }
  return lines;
}

std::vector<GroupPartition> partitions_for(const std::vector<Scene>& reference,
                                           const std::vector<GroupLine>& lines,
                                           const ParseOptions& options) {
  std::unordered_map<std::string, std::size_t> frame_index;
  for (std::size_t k = 0; k < reference.size(); ++k) {
    frame_index.emplace(reference[k].frame_id, k);
  }
  std::vector<GroupPartition> partitions(reference.size());
  std::vector<std::unordered_set<std::string>> assigned(reference.size());
  std::vector<char> mentioned(reference.size(), 0);

  for (const GroupLine& entry : lines) {
    const auto it = frame_index.find(entry.frame_id);
    if (it == frame_index.end()) {
      throw ParseError("groups file references unknown frame '" +
                           entry.frame_id + "'",
                       entry.line_number);
    }
    const std::size_t k = it->second;
    mentioned[k] = 1;
    const Scene& scene = reference[k];
    for (const std::string& id : entry.ids) {
      bool known = false;
      for (const Agent& agent : scene.agents) {
        if (agent.id == id) {
          known = true;
          break;
        }
      }
      if (!known) {
        throw ParseError("agent '" + id + "' is not in frame '" +
                             entry.frame_id + "'",
                         entry.line_number);
      }
      if (!assigned[k].insert(id).second) {
        throw ParseError("agent '" + id + "' assigned twice in frame '" +
                             entry.frame_id + "'",
                         entry.line_number);
      }
    }
    if (entry.ids.size() >= 2) {
      partitions[k].groups.push_back(entry.ids);
    } else if (entry.ids.size() == 1) {
      partitions[k].singletons.push_back(entry.ids[0]);
    }
  }

  for (std::size_t k = 0; k < reference.size(); ++k) {
    if (options.strict_frames && !mentioned[k]) {
      throw InputError("frame '" + reference[k].frame_id +
                       "' is missing from the groups file");
    }
    for (const Agent& agent : reference[k].agents) {
      if (assigned[k].find(agent.id) == assigned[k].end()) {
        partitions[k].singletons.push_back(agent.id);
      }
    }
    partitions[k].normalize();
  }
  return partitions;
}

Corpus parse_corpus(const std::string& features_path,
                    const std::string& groups_path, FeatureMode mode,
                    const std::string& name, const ParseOptions& options) {
  Corpus corpus;
  corpus.mode = mode;
  corpus.name = name;
  corpus.scenes = parse_features(features_path, mode);
  const std::vector<GroupPartition> partitions =
      partitions_for(corpus.scenes, parse_group_lines(groups_path), options);
  for (std::size_t k = 0; k < corpus.scenes.size(); ++k) {
    corpus.scenes[k].ground_truth = partitions[k];
  }
  return corpus;
}

void write_features(const Corpus& corpus, const std::string& path) {
  std::ofstream out = open_output(path);
  for (const Scene& scene : corpus.scenes) {
    for (const Agent& agent : scene.agents) {
      out << scene.frame_id << ' ' << agent.id << ' '
          << format_number(agent.position.x) << ' '
          << format_number(agent.position.y);
      if (corpus.mode == FeatureMode::kOrientation) {
        if (!agent.heading.has_value()) {
          throw InputError("agent '" + agent.id + "' in frame '" +
                           scene.frame_id + "' has no heading to serialize");
        }
        out << ' ' << format_number(*agent.heading);
      } else {
        if (!agent.velocity.has_value()) {
          throw InputError("agent '" + agent.id + "' in frame '" +
                           scene.frame_id + "' has no velocity to serialize");
        }
        out << ' ' << format_number(agent.velocity->x) << ' '
            << format_number(agent.velocity->y);
      }
      out << '\n';
    }
  }
}

void write_groups(const Corpus& corpus, const std::string& path) {
  std::ofstream out = open_output(path);
  for (const Scene& scene : corpus.scenes) {
    GroupPartition partition;
    if (scene.ground_truth.has_value()) {
      partition = *scene.ground_truth;
    } else {
      for (const Agent& agent : scene.agents) {
        partition.singletons.push_back(agent.id);
      }
    }
    partition.normalize();
    for (const auto& group : partition.groups) {
      out << scene.frame_id;
      for (const std::string& id : group) out << ' ' << id;
      out << '\n';
    }
    for (const std::string& id : partition.singletons) {
      out << scene.frame_id << ' ' << id << '\n';
    }
  }
}

void serialize_corpus(const Corpus& corpus, const std::string& features_path,
                      const std::string& groups_path) {
  write_features(corpus, features_path);
  write_groups(corpus, groups_path);
}

void write_metadata(const Corpus& corpus, const std::string& path,
                    const std::map<std::string, std::string>& extra) {
  std::ofstream out = open_output(path);
  out << "name " << corpus.name << '\n';
  out << "mode "
      << (corpus.mode == FeatureMode::kOrientation ? "orientation"
                                                   : "velocity")
      << '\n';
  out << "scenes " << corpus.scenes.size() << '\n';
  for (const auto& [key, value] : extra) {
    out << key << ' ' << value << '\n';
  }
}

FoldSplit make_folds(std::size_t scene_count, std::size_t fold_count) {
  if (fold_count < 2) {
    throw InputError("fold count must be at least 2");
  }
  if (scene_count < fold_count) {
    throw InputError("need at least " + std::to_string(fold_count) +
                     " scenes for " + std::to_string(fold_count) + " folds");
  }
  FoldSplit split;
  split.fold_count = fold_count;

  const std::size_t base = scene_count / fold_count;
  const std::size_t remainder = scene_count % fold_count;
  std::size_t begin = 0;
  for (std::size_t k = 0; k < fold_count; ++k) {
    const std::size_t size = base + (k < remainder ? 1 : 0);
    const std::size_t t0 = begin;
    const std::size_t t1 = begin + size;
    begin = t1;

    FoldSplit::Fold fold;
    for (std::size_t i = t0; i < t1; ++i) fold.test.push_back(i);

    const std::size_t remaining = scene_count - size;
    const std::size_t want = static_cast<std::size_t>(
        std::floor(kValidationFraction * static_cast<double>(remaining)));
    const std::size_t v = want < 1 ? 1 : want;

    // Candidate windows hug the corpus ends; the one with the larger gap to
    // the test block is farthest in time, ties preferring the tail.
    const bool head_fits = t0 >= v;
    const bool tail_fits = scene_count - t1 >= v;
    const std::size_t head_gap = head_fits ? t0 - v : 0;
    const std::size_t tail_gap = tail_fits ? scene_count - v - t1 : 0;
    std::size_t v0 = 0;
    if (tail_fits && (!head_fits || tail_gap >= head_gap)) {
      v0 = scene_count - v;
    } else if (head_fits) {
      v0 = 0;
    } else {
      throw InternalError("no validation window fits fold " +
                          std::to_string(k));
    }
    const std::size_t v1 = v0 + v;
    for (std::size_t i = v0; i < v1; ++i) fold.validation.push_back(i);
    for (std::size_t i = 0; i < scene_count; ++i) {
      if (i >= t0 && i < t1) continue;
      if (i >= v0 && i < v1) continue;
      fold.train.push_back(i);
    }
    split.folds.push_back(std::move(fold));
  }
  return split;
}

FoldSplit make_folds(const Corpus& corpus, std::size_t fold_count) {
  return make_folds(corpus.scenes.size(), fold_count);
}

namespace {

double bearing(Vec2 from, Vec2 to) {
  return std::atan2(to.y - from.y, to.x - from.x);
}

struct PlacedGroup {
  Vec2 center;
  double radius = 0.0;
};

bool try_build_scene(const SynthConfig& cfg, Rng& rng, Scene& scene) {
  scene.agents.clear();
  const std::size_t n = rng.between(cfg.agents_min, cfg.agents_max);
  const std::size_t group_cap = std::min(cfg.groups_max, n / 2);
  const std::size_t group_floor = std::min(cfg.groups_min, group_cap);
  const std::size_t group_count = rng.between(group_floor, group_cap);

  std::vector<std::size_t> sizes(group_count, 2);
  std::size_t distractors = n - 2 * group_count;
  if (group_count > 0) {
    std::size_t extras = distractors;
    distractors = 0;
    for (std::size_t e = 0; e < extras; ++e) {
      if (rng.uniform01() < cfg.distractor_probability) {
        ++distractors;
        continue;
      }
      const std::size_t g = rng.below(group_count);
      if (sizes[g] < cfg.group_size_max) {
        ++sizes[g];
      } else {
        ++distractors;
      }
    }
  }

  std::vector<PlacedGroup> circles;
  GroupPartition truth;
  std::size_t next_agent = 0;
  const auto make_id = [&next_agent]() {
    char buffer[8];
    std::snprintf(buffer, sizeof(buffer), "a%02zu", ++next_agent);
    return std::string(buffer);
  };

  for (std::size_t g = 0; g < group_count; ++g) {
    PlacedGroup circle;
    bool placed = false;
    for (std::size_t attempt = 0; attempt < cfg.max_retries; ++attempt) {
      circle.radius = rng.uniform(cfg.radius_min, cfg.radius_max);
      const double span = cfg.area_half_extent - circle.radius;
      if (span <= 0.0) return false;
      circle.center = Vec2{rng.uniform(-span, span), rng.uniform(-span, span)};
      bool clear = true;
      for (const PlacedGroup& other : circles) {
        const Vec2 d = circle.center - other.center;
        if (std::hypot(d.x, d.y) <
            circle.radius + other.radius + cfg.group_gap) {
          clear = false;
          break;
        }
      }
      if (clear) {
        placed = true;
        break;
      }
    }
    if (!placed) return false;
    circles.push_back(circle);

    std::vector<std::string> members;
    const double base = rng.uniform(0.0, kTau);
    for (std::size_t m = 0; m < sizes[g]; ++m) {
      const double angle =
          base + kTau * static_cast<double>(m) / static_cast<double>(sizes[g]);
      Agent agent;
      agent.id = make_id();
      agent.position =
          circle.center + circle.radius * Vec2{std::cos(angle), std::sin(angle)};
      agent.position.x += rng.gaussian(0.0, cfg.sigma_x);
      agent.position.y += rng.gaussian(0.0, cfg.sigma_x);
      agent.heading = normalize_angle(bearing(agent.position, circle.center) +
                                      rng.gaussian(0.0, cfg.sigma_theta));
      members.push_back(agent.id);
      scene.agents.push_back(std::move(agent));
    }
    truth.groups.push_back(std::move(members));
  }

  // Bystanders that hover all linger near the same conversation, like a
  // crowd gathering around one group.
  const std::size_t hover_target =
      circles.empty() ? 0 : rng.below(circles.size());
  for (std::size_t d = 0; d < distractors; ++d) {
    Agent agent;
    agent.id = make_id();
    bool placed = false;
    for (std::size_t attempt = 0; attempt < cfg.max_retries && !placed;
         ++attempt) {
      // Bystanders tend to linger just outside a group's o-space; the rest
      // roam anywhere. Either way the clearance checks below still apply.
      if (!circles.empty() &&
          rng.uniform01() < cfg.distractor_hover_probability) {
        const PlacedGroup& near = circles[hover_target];
        const double ang = rng.uniform(0.0, kTau);
        const double dist = cfg.distractor_clearance +
                            rng.uniform(0.0, cfg.distractor_hover_band);
        agent.position =
            near.center + dist * Vec2{std::cos(ang), std::sin(ang)};
        if (std::fabs(agent.position.x) > cfg.area_half_extent ||
            std::fabs(agent.position.y) > cfg.area_half_extent) {
          continue;
        }
      } else {
        agent.position = Vec2{
            rng.uniform(-cfg.area_half_extent, cfg.area_half_extent),
            rng.uniform(-cfg.area_half_extent, cfg.area_half_extent)};
      }
      bool clear = true;
      for (const PlacedGroup& circle : circles) {
        const Vec2 dd = agent.position - circle.center;
        if (std::hypot(dd.x, dd.y) < cfg.distractor_clearance) {
          clear = false;
          break;
        }
      }
      for (const Agent& other : scene.agents) {
        const Vec2 dd = agent.position - other.position;
        if (std::hypot(dd.x, dd.y) < cfg.agent_clearance) {
          clear = false;
          break;
        }
      }
      if (!clear) continue;
      agent.heading = rng.uniform(0.0, kTau);
      placed = true;
    }
    if (!placed) return false;
    truth.singletons.push_back(agent.id);
    scene.agents.push_back(std::move(agent));
  }

  truth.normalize();
  scene.ground_truth = std::move(truth);
  return true;
}

}  // namespace

Corpus generate_synthetic(const SynthConfig& cfg, std::uint64_t seed) {
  if (cfg.agents_min < 1 || cfg.agents_max < cfg.agents_min ||
      cfg.groups_max < cfg.groups_min || cfg.radius_max < cfg.radius_min ||
      cfg.radius_min <= 0.0 || cfg.area_half_extent <= 0.0) {
    throw InputError("invalid synthetic generator configuration");
  }
  Corpus corpus;
  corpus.mode = FeatureMode::kOrientation;
  corpus.name = cfg.name;
  Rng rng(seed);
  for (std::size_t s = 0; s < cfg.scene_count; ++s) {
    Scene scene;
    char buffer[16];
    std::snprintf(buffer, sizeof(buffer), "f%06zu", s);
    scene.frame_id = buffer;
    bool built = false;
    for (std::size_t attempt = 0; attempt < cfg.max_retries; ++attempt) {
      if (try_build_scene(cfg, rng, scene)) {
        built = true;
        break;
      }
    }
    if (!built) {
      throw InputError("synthetic generation failed for frame '" +
                       scene.frame_id + "': no feasible placement after " +
                       std::to_string(cfg.max_retries) + " retries");
    }
    corpus.scenes.push_back(std::move(scene));
  }
  return corpus;
}

}  // namespace ff
