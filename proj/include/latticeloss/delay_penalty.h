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

// Delay-penalized transducer loss.
//
// Adding lambda * ((T-1)/2 - t) to every non-blank log-probability at frame t
// adds lambda * d_i to the score of each path i, where d_i is its delay score.
// The loss gradients on the shifted lattice are then the path posteriors
// exp(s_i + lambda d_i) / sum_j exp(s_j + lambda d_j), which to first order in
// lambda equal the gradients of L + lambda * sum_i d_i w_i. Training on the
// shifted lattice therefore pushes probability mass towards alignments that
// emit earlier.

#ifndef LATTICELOSS_DELAY_PENALTY_H_
#define LATTICELOSS_DELAY_PENALTY_H_

#include <cstddef>
#include <vector>

#include "latticeloss/alignment.h"
#include "latticeloss/lattice.h"
#include "latticeloss/loss_core.h"

namespace latticeloss {

enum class PenaltySide {
  kNonBlank,  // y'(t, u) = y(t, u) + lambda * offset(t)
  kBlank,     // blank'(t, u) = blank(t, u) - lambda * offset(t)
};

// offset(t) is (T-1)/2 - t when centered and -t otherwise. Centering adds the
// same constant to every path and leaves gradients unchanged.
struct PenaltyConfig {
  double lambda = 0.0;
  PenaltySide side = PenaltySide::kNonBlank;
  bool centered = true;
};

struct PathDiagnostics {
  double delay_score = 0.0;
  double path_score = 0.0;
  double weight = 0.0;
};

// Throws std::invalid_argument for negative or non-finite lambda. lambda == 0
// returns an exact copy. The result is flagged non-normalized otherwise.
Lattice ApplyPenalty(const Lattice& lattice, const PenaltyConfig& config);

// LossAndGrad(ApplyPenalty(lattice, config)).
LossResult PenalizedLossAndGrad(const Lattice& lattice,
                                const PenaltyConfig& config);

// FastEmit-style regularization: non-blank gradients scaled by 1 + lambda,
// blank gradients and the loss value untouched.
LossResult FastEmitLossAndGrad(const Lattice& lattice, double lambda);

// Per-path derivatives of L + lambda * d_avg with respect to the path scores,
// (1 + lambda (d_i - d_avg)) w_i, computed by enumerating every path.
struct AugmentedGrads {
  std::vector<AlignmentPath> paths;
  std::vector<PathDiagnostics> diagnostics;
  std::vector<double> grads;
  double d_avg = 0.0;
};

// Throws std::length_error when the lattice has more than `max_paths` paths.
AugmentedGrads ExactAugmentedGrads(const Lattice& lattice,
                                   const PenaltyConfig& config,
                                   std::size_t max_paths = 100'000);

// Posterior expectation of the delay score, sum_i w_i d_i, from the
// non-blank occupations of a forward-backward pass. Works at any size.
double ExpectedDelayScore(const Lattice& lattice);

}  // namespace latticeloss

#endif  // LATTICELOSS_DELAY_PENALTY_H_
