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

// Brute-force path enumeration. Everything here is computed from explicit
// per-path scores and shares no recursion with loss_core, so agreement
// between the two is evidence rather than tautology. Only for small lattices.

#ifndef LATTICELOSS_ORACLE_H_
#define LATTICELOSS_ORACLE_H_

#include <cstddef>
#include <span>
#include <vector>

#include "latticeloss/alignment.h"
#include "latticeloss/grid.h"
#include "latticeloss/lattice.h"

namespace latticeloss::oracle {

inline constexpr std::size_t kMaxPaths = 1'000'000;

struct PathEnumeration {
  std::vector<AlignmentPath> paths;
  std::size_t count = 0;
};

// C(T-1+U, U), saturating at SIZE_MAX.
std::size_t NumPaths(int num_frames, int num_tokens);

// All monotone paths in lexicographic order of their emission frames.
// Throws std::length_error when the count exceeds `max_paths`.
PathEnumeration EnumeratePaths(int num_frames, int num_tokens,
                               std::size_t max_paths = kMaxPaths);

// Max-shifted log-sum-exp.
double LogSumExp(std::span<const double> values);

double OracleLoss(const Lattice& lattice);

struct WeightsAndDelay {
  std::vector<AlignmentPath> paths;
  std::vector<double> scores;
  std::vector<double> delay_scores;
  std::vector<double> weights;
  double total = 0.0;
  double d_avg = 0.0;
};

WeightsAndDelay OracleWeightsAndDavg(const Lattice& lattice);

// Same sign convention as LossResult: entries are negated occupations.
struct OracleGrads {
  Grid grad_y;
  Grid grad_blank;
};

OracleGrads OracleGrad(const Lattice& lattice);

struct RegularizedObjective {
  double total = 0.0;        // L
  double delay_term = 0.0;   // lambda * d_avg
  double augmented = 0.0;    // L + lambda * d_avg
  double d_avg = 0.0;
  std::vector<double> weights;
  std::vector<double> delay_scores;
  // (1 + lambda (d_i - d_avg)) w_i
  std::vector<double> exact_grads;
  // exp(lambda (d_i - d_avg) + s_i) / sum_j exp(lambda (d_j - d_avg) + s_j)
  std::vector<double> approx_grads;
};

RegularizedObjective OracleDelayRegularizedObjective(const Lattice& lattice,
                                                     double lambda);

}  // namespace latticeloss::oracle

#endif  // LATTICELOSS_ORACLE_H_
