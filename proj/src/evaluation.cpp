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

#include "ff/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <sstream>

#include "ff/errors.hpp"

namespace ff {

namespace {

// Guards against representation error in T*|g| (e.g. T = 2/3): values within
// 1e-9 of an integer round to it.
std::size_t ceil_tolerant(double v) {
  return static_cast<std::size_t>(std::ceil(v - 1e-9));
}

std::size_t floor_tolerant(double v) {
  return static_cast<std::size_t>(std::floor(v + 1e-9));
}

std::vector<std::vector<std::string>> sorted_groups(
    const GroupPartition& partition) {
  std::vector<std::vector<std::string>> out = partition.groups;
  for (auto& g : out) std::sort(g.begin(), g.end());
  return out;
}

std::size_t intersection_size(const std::vector<std::string>& a,
                              const std::vector<std::string>& b) {
  std::vector<std::string> both;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                        std::back_inserter(both));
  return both.size();
}

std::vector<std::string> universe_of(const GroupPartition& partition) {
  std::vector<std::string> ids = partition.singletons;
  for (const auto& g : partition.groups) {
    ids.insert(ids.end(), g.begin(), g.end());
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

struct Candidate {
  std::size_t inter;
  std::size_t pred;
  std::size_t truth;
};

// Greedy one-to-one assignment over eligible (pred, truth) pairs: larger
// intersections first, ties to the smaller then lexicographically earlier
// predicted group, then the earlier truth group.
std::size_t greedy_matches(const std::vector<std::vector<std::string>>& pred,
                           const std::vector<std::vector<std::string>>& truth,
                           std::vector<Candidate> candidates) {
  std::stable_sort(candidates.begin(), candidates.end(),
                   [&](const Candidate& a, const Candidate& b) {
                     if (a.inter != b.inter) return a.inter > b.inter;
                     const auto& pa = pred[a.pred];
                     const auto& pb = pred[b.pred];
                     if (pa.size() != pb.size()) return pa.size() < pb.size();
                     if (pa != pb) return pa < pb;
                     return truth[a.truth] < truth[b.truth];
                   });
  std::vector<char> pred_used(pred.size(), 0);
  std::vector<char> truth_used(truth.size(), 0);
  std::size_t matches = 0;
  for (const Candidate& c : candidates) {
    if (pred_used[c.pred] || truth_used[c.truth]) continue;
    pred_used[c.pred] = 1;
    truth_used[c.truth] = 1;
    ++matches;
  }
  return matches;
}

}  // namespace

MatchCounts match_groups(const GroupPartition& predicted,
                         const GroupPartition& truth, double T) {
  if (!(T > 0.0 && T <= 1.0)) {
    throw InputError("tolerance T must lie in (0, 1]");
  }
  if (universe_of(predicted) != universe_of(truth)) {
    throw InputError("predicted and truth partitions cover different ids");
  }
  const auto pred = sorted_groups(predicted);
  const auto gold = sorted_groups(truth);

  std::vector<Candidate> candidates;
  for (std::size_t t = 0; t < gold.size(); ++t) {
    const std::size_t need = ceil_tolerant(T * static_cast<double>(gold[t].size()));
    const std::size_t spare =
        floor_tolerant((1.0 - T) * static_cast<double>(gold[t].size()));
    for (std::size_t p = 0; p < pred.size(); ++p) {
      const std::size_t inter = intersection_size(pred[p], gold[t]);
      if (inter >= need && pred[p].size() - inter <= spare) {
        candidates.push_back({inter, p, t});
      }
    }
  }
  const std::size_t tp = greedy_matches(pred, gold, std::move(candidates));
  return {tp, pred.size() - tp, gold.size() - tp};
}

EvalReport f1_at(const std::vector<GroupPartition>& predicted,
                 const std::vector<GroupPartition>& truth, double T) {
  if (predicted.size() != truth.size()) {
    throw InputError("predicted and truth frame lists differ in length");
  }
  EvalReport report;
  report.per_frame.reserve(predicted.size());
  for (std::size_t k = 0; k < predicted.size(); ++k) {
    const MatchCounts counts = match_groups(predicted[k], truth[k], T);
    report.per_frame.push_back(counts);
    report.tp += counts.tp;
    report.fp += counts.fp;
    report.fn += counts.fn;
  }
  const double tp = static_cast<double>(report.tp);
  report.precision =
      report.tp + report.fp == 0 ? 0.0 : tp / static_cast<double>(report.tp + report.fp);
  report.recall =
      report.tp + report.fn == 0 ? 0.0 : tp / static_cast<double>(report.tp + report.fn);
  report.f1 = report.precision + report.recall == 0.0
                  ? 0.0
                  : 2.0 * report.precision * report.recall /
                        (report.precision + report.recall);
  return report;
}

double gdsr(const std::vector<GroupPartition>& predicted,
            const std::vector<GroupPartition>& truth) {
  if (predicted.size() != truth.size()) {
    throw InputError("predicted and truth frame lists differ in length");
  }
  std::size_t total = 0;
  std::size_t detected = 0;
  for (std::size_t k = 0; k < predicted.size(); ++k) {
    const auto pred = sorted_groups(predicted[k]);
    const auto gold = sorted_groups(truth[k]);
    total += gold.size();
    std::vector<Candidate> candidates;
    for (std::size_t t = 0; t < gold.size(); ++t) {
      for (std::size_t p = 0; p < pred.size(); ++p) {
        const std::size_t inter = intersection_size(pred[p], gold[t]);
        // At least 60% of members, compared in exact integer arithmetic.
        if (5 * inter >= 3 * gold[t].size()) {
          candidates.push_back({inter, p, t});
        }
      }
    }
    detected += greedy_matches(pred, gold, std::move(candidates));
  }
  // A corpus without truth groups is detected vacuously.
  return total == 0 ? 1.0 : static_cast<double>(detected) /
                                static_cast<double>(total);
}

std::string report_text(const EvalReport& report) {
  std::ostringstream out;
  out << "tp " << report.tp << '\n';
  out << "fp " << report.fp << '\n';
  out << "fn " << report.fn << '\n';
  out << "precision " << report.precision << '\n';
  out << "recall " << report.recall << '\n';
  out << "f1 " << report.f1 << '\n';
  if (report.gdsr.has_value()) {
    out << "gdsr " << *report.gdsr << '\n';
  }
  return out.str();
}

}  // namespace ff
