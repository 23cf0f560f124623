// Copyright 2026 The latticeloss Authors. All Rights Reserved.
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

#include "latticeloss/oracle.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace latticeloss::oracle {
namespace {

struct ScoredPaths {
  std::vector<AlignmentPath> paths;
  std::vector<double> scores;
};

ScoredPaths ScoreAll(const Lattice& lattice) {
  ScoredPaths out;
  out.paths =
      EnumeratePaths(lattice.num_frames(), lattice.num_tokens()).paths;
  out.scores.reserve(out.paths.size());
  for (const auto& path : out.paths) {
    out.scores.push_back(PathScore(lattice, path));
  }
  return out;
}

std::vector<double> Normalize(std::span<const double> log_values) {
  const double log_norm = LogSumExp(log_values);
  std::vector<double> out(log_values.size());
  for (std::size_t i = 0; i < log_values.size(); ++i) {
    out[i] = std::exp(log_values[i] - log_norm);
  }
  return out;
}

}  // namespace

std::size_t NumPaths(int num_frames, int num_tokens) {
  if (num_frames < 1 || num_tokens < 0) return 0;
  // C(n, k) with n = T-1+U, k = min(U, T-1), built incrementally; each
  // intermediate value is itself a binomial coefficient.
  const std::size_t n = static_cast<std::size_t>(num_frames - 1) + num_tokens;
  const std::size_t k = std::min<std::size_t>(num_tokens, num_frames - 1);
  constexpr std::size_t kMax = std::numeric_limits<std::size_t>::max();
  std::size_t result = 1;
  for (std::size_t i = 1; i <= k; ++i) {
    const std::size_t factor = n - k + i;
    if (result > kMax / factor) return kMax;
    result = result * factor / i;
  }
  return result;
}

PathEnumeration EnumeratePaths(int num_frames, int num_tokens,
                               std::size_t max_paths) {
  if (num_frames < 1 || num_tokens < 0) {
    throw std::invalid_argument("enumeration needs T >= 1 and U >= 0");
  }
  const std::size_t count = NumPaths(num_frames, num_tokens);
  if (count > max_paths) {
    throw std::length_error("lattice has " + std::to_string(count) +
                            " paths, over the enumeration budget of " +
                            std::to_string(max_paths));
  }
  PathEnumeration out;
  out.paths.reserve(count);
  AlignmentPath path{std::vector<int>(num_tokens, 0)};
  while (true) {
    out.paths.push_back(path);
    auto& frames = path.emission_frames;
    int i = num_tokens - 1;
    while (i >= 0 && frames[i] == num_frames - 1) --i;
    if (i < 0) break;
    ++frames[i];
    std::fill(frames.begin() + i + 1, frames.end(), frames[i]);
  }
  out.count = out.paths.size();
  return out;
}

double LogSumExp(std::span<const double> values) {
  if (values.empty()) return -std::numeric_limits<double>::infinity();
  const double max = *std::max_element(values.begin(), values.end());
  if (!std::isfinite(max)) return max;
  double sum = 0.0;
  for (double v : values) sum += std::exp(v - max);
  return max + std::log(sum);
}

double OracleLoss(const Lattice& lattice) {
  return LogSumExp(ScoreAll(lattice).scores);
}

WeightsAndDelay OracleWeightsAndDavg(const Lattice& lattice) {
  ScoredPaths scored = ScoreAll(lattice);
  WeightsAndDelay out;
  out.total = LogSumExp(scored.scores);
  out.weights = Normalize(scored.scores);
  out.delay_scores.reserve(scored.paths.size());
  for (std::size_t i = 0; i < scored.paths.size(); ++i) {
    out.delay_scores.push_back(
        DelayScore(scored.paths[i], lattice.num_frames()));
    out.d_avg += out.delay_scores[i] * out.weights[i];
  }
  out.paths = std::move(scored.paths);
  out.scores = std::move(scored.scores);
  return out;
}

OracleGrads OracleGrad(const Lattice& lattice) {
  const int T = lattice.num_frames();
  const int U = lattice.num_tokens();
  const WeightsAndDelay wd = OracleWeightsAndDavg(lattice);
  OracleGrads out{Grid(T, U), Grid(T, U + 1)};
  for (std::size_t i = 0; i < wd.paths.size(); ++i) {
    const auto& frames = wd.paths[i].emission_frames;
    const double w = wd.weights[i];
    int u = 0;
    for (int t = 0; t < T; ++t) {
      while (u < U && frames[u] == t) {
        out.grad_y(t, u) -= w;
        ++u;
      }
      out.grad_blank(t, u) -= w;
    }
  }
  return out;
}

RegularizedObjective OracleDelayRegularizedObjective(const Lattice& lattice,
                                                     double lambda) {
  const WeightsAndDelay wd = OracleWeightsAndDavg(lattice);
  RegularizedObjective out;
  out.total = wd.total;
  out.d_avg = wd.d_avg;
  out.delay_term = lambda * wd.d_avg;
  out.augmented = out.total + out.delay_term;
  out.weights = wd.weights;
  out.delay_scores = wd.delay_scores;
  const std::size_t n = wd.paths.size();
  out.exact_grads.resize(n);
  std::vector<double> shifted(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double centered_delay = wd.delay_scores[i] - wd.d_avg;
    out.exact_grads[i] = (1.0 + lambda * centered_delay) * wd.weights[i];
    shifted[i] = lambda * centered_delay + wd.scores[i];
  }
  out.approx_grads = Normalize(shifted);
  return out;
}

}  // namespace latticeloss::oracle
