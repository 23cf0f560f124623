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

#include "latticeloss/delay_penalty.h"

#include <cmath>
#include <stdexcept>

#include "latticeloss/oracle.h"

namespace latticeloss {
namespace {

double FrameOffset(int t, int num_frames, bool centered) {
  return centered ? 0.5 * (num_frames - 1) - t : -static_cast<double>(t);
}

}  // namespace

Lattice ApplyPenalty(const Lattice& lattice, const PenaltyConfig& config) {
  if (!(config.lambda >= 0.0) || !std::isfinite(config.lambda)) {
    throw std::invalid_argument("penalty lambda must be finite and >= 0");
  }
  if (config.lambda == 0.0) return lattice;
  const int T = lattice.num_frames();
  const int U = lattice.num_tokens();
  const auto y_in = lattice.y_grid().values();
  const auto blank_in = lattice.blank_grid().values();
  std::vector<double> y(y_in.begin(), y_in.end());
  std::vector<double> blank(blank_in.begin(), blank_in.end());
  for (int t = 0; t < T; ++t) {
    const double shift = config.lambda * FrameOffset(t, T, config.centered);
    if (config.side == PenaltySide::kNonBlank) {
      for (int u = 0; u < U; ++u) y[static_cast<std::size_t>(t) * U + u] += shift;
    } else {
      for (int u = 0; u <= U; ++u) {
        blank[static_cast<std::size_t>(t) * (U + 1) + u] -= shift;
      }
    }
  }
  return Lattice(T, U, std::move(y), std::move(blank), /*normalized=*/false);
}

LossResult PenalizedLossAndGrad(const Lattice& lattice,
                                const PenaltyConfig& config) {
  return LossAndGrad(ApplyPenalty(lattice, config));
}

LossResult FastEmitLossAndGrad(const Lattice& lattice, double lambda) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("FastEmit lambda must be finite and >= 0");
  }
  LossResult result = LossAndGrad(lattice);
  const double scale = 1.0 + lambda;
  for (double& g : result.grad_y.values()) g *= scale;
  return result;
}

AugmentedGrads ExactAugmentedGrads(const Lattice& lattice,
                                   const PenaltyConfig& config,
                                   std::size_t max_paths) {
  const std::size_t count =
      oracle::NumPaths(lattice.num_frames(), lattice.num_tokens());
  if (count > max_paths) {
    throw std::length_error("too many paths for exact augmented gradients");
  }
  const oracle::RegularizedObjective objective =
      oracle::OracleDelayRegularizedObjective(lattice, config.lambda);
  AugmentedGrads out;
  out.paths =
      oracle::EnumeratePaths(lattice.num_frames(), lattice.num_tokens()).paths;
  out.d_avg = objective.d_avg;
  out.grads = objective.exact_grads;
  out.diagnostics.reserve(out.paths.size());
  for (std::size_t i = 0; i < out.paths.size(); ++i) {
    out.diagnostics.push_back({objective.delay_scores[i],
                               PathScore(lattice, out.paths[i]),
                               objective.weights[i]});
  }
  return out;
}

double ExpectedDelayScore(const Lattice& lattice) {
  const int T = lattice.num_frames();
  const int U = lattice.num_tokens();
  const LossResult result = LossAndGrad(lattice);
  const double middle = 0.5 * (T - 1);
  double expected = 0.0;
  for (int t = 0; t < T; ++t) {
    for (int u = 0; u < U; ++u) {
      expected -= result.grad_y(t, u) * (middle - t);
    }
  }
  return expected;
}

}  // namespace latticeloss
