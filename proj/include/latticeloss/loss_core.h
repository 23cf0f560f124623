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

// Transducer forward-backward in log space.
//
// Two implementations of the recursions live here. `serial::` walks the grid
// row by row and is the reference. `parallel::` sweeps anti-diagonals with
// OpenMP; every cell evaluates the same expression with the same operand
// order, so both produce bit-identical results. The unqualified entry points
// pick one by lattice size.

#ifndef LATTICELOSS_LOSS_CORE_H_
#define LATTICELOSS_LOSS_CORE_H_

#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "latticeloss/alignment.h"
#include "latticeloss/grid.h"
#include "latticeloss/lattice.h"

namespace latticeloss {

inline constexpr double kLogZero = -std::numeric_limits<double>::infinity();

// log(exp(a) + exp(b)). -inf is the identity; NaN propagates.
inline double LogAdd(double a, double b) {
  if (a == kLogZero) return b;
  if (b == kLogZero) return a;
  const double hi = a > b ? a : b;
  return hi + std::log1p(std::exp(-std::abs(a - b)));
}

struct ForwardResult {
  Grid alpha;    // T x (U+1), alpha(0, 0) = 0
  double total;  // alpha(T-1, U) + blank(T-1, U)
};

// Loss is the negated total log-probability. The gradient grids have the
// shapes of the lattice grids; their negations are occupation probabilities.
// Dead entries blank(T-1, u < U) get a zero gradient.
struct LossResult {
  double loss = 0.0;
  Grid grad_y;
  Grid grad_blank;
};

struct ViterbiResult {
  AlignmentPath path;
  double score = 0.0;
};

namespace serial {
ForwardResult Forward(const Lattice& lattice);
Grid Backward(const Lattice& lattice);
LossResult LossAndGrad(const Lattice& lattice);
}  // namespace serial

namespace parallel {
ForwardResult Forward(const Lattice& lattice);
Grid Backward(const Lattice& lattice);
LossResult LossAndGrad(const Lattice& lattice);
}  // namespace parallel

ForwardResult Forward(const Lattice& lattice);

// beta(t, u): log-probability of completing the lattice from node (t, u),
// including the terminal blank. beta(0, 0) equals the forward total.
Grid Backward(const Lattice& lattice);

LossResult LossAndGrad(const Lattice& lattice);

// Evaluates each lattice independently, in parallel over the batch.
std::vector<LossResult> LossAndGradBatch(std::span<const Lattice> lattices);

// Best single path and its score. Among equal-scoring paths the one that
// emits each token as early as possible wins.
ViterbiResult Viterbi(const Lattice& lattice);

// Chains a LossResult computed on LatticeFromLogits(utt) (optionally shifted
// by a logit-independent penalty) back through the log-softmax. Returns a
// T x (U+1) x V array laid out like utt.logits.
std::vector<double> LogitGrads(const TokenizedUtterance& utt,
                               const LossResult& result);

// Lattices with at least this many nodes use the wavefront kernels when more
// than one thread is available.
inline constexpr long kWavefrontMinNodes = 1 << 14;

// Thread cap used by every OpenMP region in the library. Reads
// LATTICELOSS_THREADS when set; otherwise leaves the OpenMP default.
void ConfigureThreadsFromEnv();
void SetNumThreads(int num_threads);
int NumThreads();

}  // namespace latticeloss

#endif  // LATTICELOSS_LOSS_CORE_H_
