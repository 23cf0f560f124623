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

// Anti-diagonal wavefront kernels. Cells on diagonal t + u = d depend only on
// diagonal d - 1 (forward) or d + 1 (backward), so each diagonal is one
// parallel loop.

#include <algorithm>

#include <omp.h>

#include "latticeloss/loss_core.h"
#include "loss_kernels.h"

namespace latticeloss::parallel {

ForwardResult Forward(const Lattice& lattice) {
  const int T = lattice.num_frames();
  const int U = lattice.num_tokens();
  Grid alpha(T, U + 1, kLogZero);
#pragma omp parallel
  for (int d = 0; d <= T - 1 + U; ++d) {
    const int t_lo = std::max(0, d - U);
    const int t_hi = std::min(T - 1, d);
#pragma omp for schedule(static)
    for (int t = t_lo; t <= t_hi; ++t) {
      alpha(t, d - t) = internal::AlphaCell(lattice, alpha, t, d - t);
    }
  }
  const double total = alpha(T - 1, U) + lattice.blank(T - 1, U);
  return {std::move(alpha), total};
}

Grid Backward(const Lattice& lattice) {
  const int T = lattice.num_frames();
  const int U = lattice.num_tokens();
  Grid beta(T, U + 1, kLogZero);
#pragma omp parallel
  for (int d = T - 1 + U; d >= 0; --d) {
    const int t_lo = std::max(0, d - U);
    const int t_hi = std::min(T - 1, d);
#pragma omp for schedule(static)
    for (int t = t_lo; t <= t_hi; ++t) {
      beta(t, d - t) = internal::BetaCell(lattice, beta, t, d - t);
    }
  }
  return beta;
}

LossResult LossAndGrad(const Lattice& lattice) {
  ForwardResult fwd = parallel::Forward(lattice);
  const Grid beta = parallel::Backward(lattice);
  LossResult out = internal::EmptyResult(lattice);
  out.loss = -fwd.total;
#pragma omp parallel for schedule(static)
  for (int t = 0; t < lattice.num_frames(); ++t) {
    internal::GradRow(lattice, fwd.alpha, beta, fwd.total, t, out);
  }
  return out;
}

}  // namespace latticeloss::parallel
