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

#include "ff/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ff/errors.hpp"
#include "ff/evaluation.hpp"

namespace ff {

namespace {

double quadratic_form(const std::vector<double>& A,
                      const std::vector<double>& x, std::size_t n) {
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      row += A[i * n + j] * x[j];
    }
    total += x[i] * row;
  }
  return total;
}

void check_affinity_matrix(const AffinityMatrix& A) {
  const std::size_t n = A.size();
  if (A.values.size() != n * n) {
    throw InputError("affinity matrix is not square over its ids");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (A.at(i, i) != 0.0) {
      throw InputError("affinity matrix has a nonzero diagonal");
    }
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = A.at(i, j);
      if (!(v >= 0.0 && v <= 1.0)) {
        throw InputError("affinity value outside [0, 1]");
      }
      if (v != A.at(j, i)) {
        throw InputError("affinity matrix is not symmetric");
      }
    }
  }
}

}  // namespace

std::vector<double> replicator_step(const std::vector<double>& A,
                                    const std::vector<double>& x,
                                    std::size_t n) {
  std::vector<double> ax(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      row += A[i * n + j] * x[j];
    }
    ax[i] = row;
  }
  double obj = 0.0;
  for (std::size_t i = 0; i < n; ++i) obj += x[i] * ax[i];
  if (obj == 0.0) {
    return x;  // fixed point: nothing to renormalize by
  }
  std::vector<double> next(n);
  for (std::size_t i = 0; i < n; ++i) {
    next[i] = x[i] * ax[i] / obj;
  }
  return next;
}

DominantSet extract_dominant_set(const std::vector<double>& A, std::size_t n) {
  if (n == 0) {
    throw InternalError("extract_dominant_set requires at least one node");
  }
  if (A.size() != n * n) {
    throw InternalError("extract_dominant_set: matrix size mismatch");
  }
  std::vector<double> x(n, 1.0 / static_cast<double>(n));
  double obj = quadratic_form(A, x, n);
  for (std::size_t iter = 0; iter < kReplicatorMaxIters; ++iter) {
    const std::vector<double> next = replicator_step(A, x, n);
    const double next_obj = quadratic_form(A, next, n);
    if (next_obj < obj - kMonotoneSlack) {
      throw InternalError(
          "replicator objective decreased from " + std::to_string(obj) +
          " to " + std::to_string(next_obj));
    }
    double delta = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      delta = std::max(delta, std::fabs(next[i] - x[i]));
    }
    x = next;
    obj = next_obj;
    if (delta < kReplicatorTolerance) break;
  }
  DominantSet result;
  result.cohesiveness = obj;
  for (std::size_t i = 0; i < n; ++i) {
    if (x[i] > kSupportCutoff) result.members.push_back(i);
  }
  return result;
}

GroupPartition dominant_sets_partition(const AffinityMatrix& A,
                                       double stop_threshold) {
  check_affinity_matrix(A);
  if (!(stop_threshold >= 0.0 && stop_threshold <= 1.0)) {
    throw InputError("stop threshold must lie in [0, 1]");
  }
  GroupPartition out;
  std::vector<std::size_t> active(A.size());
  for (std::size_t i = 0; i < active.size(); ++i) active[i] = i;

  while (!active.empty()) {
    const std::size_t m = active.size();
    std::vector<double> sub(m * m);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < m; ++j) {
        sub[i * m + j] = A.at(active[i], active[j]);
      }
    }
    const DominantSet ds = extract_dominant_set(sub, m);
    if (ds.cohesiveness >= stop_threshold && ds.members.size() >= 2) {
      std::vector<std::string> group;
      group.reserve(ds.members.size());
      std::vector<char> taken(m, 0);
      for (std::size_t idx : ds.members) {
        group.push_back(A.ids[active[idx]]);
        taken[idx] = 1;
      }
      out.groups.push_back(std::move(group));
      std::vector<std::size_t> rest;
      rest.reserve(m - ds.members.size());
      for (std::size_t i = 0; i < m; ++i) {
        if (!taken[i]) rest.push_back(active[i]);
      }
      active = std::move(rest);
    } else {
      for (std::size_t idx : active) {
        out.singletons.push_back(A.ids[idx]);
      }
      active.clear();
    }
  }
  out.normalize();
  return out;
}

double tuning_score_f1(const std::vector<GroupPartition>& predicted,
                       const std::vector<GroupPartition>& truth) {
  if (predicted.size() != truth.size()) {
    throw InputError("tuning score needs aligned frame lists");
  }
  MatchCounts totals;
  for (std::size_t k = 0; k < predicted.size(); ++k) {
    const MatchCounts c = match_groups(predicted[k], truth[k], 1.0);
    totals.tp += c.tp;
    totals.fp += c.fp;
    totals.fn += c.fn;
  }
  if (totals.tp + totals.fp + totals.fn == 0) {
    return 1.0;  // no groups anywhere and none predicted: perfect
  }
  const double tp = static_cast<double>(totals.tp);
  const double denom = 2.0 * tp + static_cast<double>(totals.fp + totals.fn);
  return denom == 0.0 ? 0.0 : 2.0 * tp / denom;
}

double tune_threshold(
    const std::vector<std::pair<AffinityMatrix, GroupPartition>>& validation,
    const TuningMetric& metric) {
  if (validation.empty()) {
    throw InputError("threshold tuning requires a non-empty validation set");
  }
  std::vector<GroupPartition> truth;
  truth.reserve(validation.size());
  for (const auto& [matrix, partition] : validation) {
    (void)matrix;
    truth.push_back(partition);
  }

  double best_threshold = kThresholdGridStart;
  double best_score = -1.0;
  for (int step = 1; step * kThresholdGridStep <= kThresholdGridStop + 1e-12;
       ++step) {
    const double threshold = step * kThresholdGridStep;
    std::vector<GroupPartition> predicted;
    predicted.reserve(validation.size());
    for (const auto& [matrix, partition] : validation) {
      (void)partition;
      predicted.push_back(dominant_sets_partition(matrix, threshold));
    }
    const double score = metric(predicted, truth);
    if (score > best_score) {  // ties keep the earlier, lower threshold
      best_score = score;
      best_threshold = threshold;
    }
  }
  return best_threshold;
}

}  // namespace ff
