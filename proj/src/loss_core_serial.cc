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

// Reference implementation: plain row-major sweeps.

#include "latticeloss/loss_core.h"
#include "loss_kernels.h"

namespace latticeloss::serial {

ForwardResult Forward(const Lattice& lattice) {
  const int T = lattice.num_frames();
  const int U = lattice.num_tokens();
  Grid alpha(T, U + 1, kLogZero);
  for (int t = 0; t < T; ++t) {
    for (int u = 0; u <= U; ++u) {
      alpha(t, u) = internal::AlphaCell(lattice, alpha, t, u);
    }
  }
  const double total = alpha(T - 1, U) + lattice.blank(T - 1, U);
  return {std::move(alpha), total};
}

Grid Backward(const Lattice& lattice) {
  const int T = lattice.num_frames();
  const int U = lattice.num_tokens();
  Grid beta(T, U + 1, kLogZero);
  for (int t = T - 1; t >= 0; --t) {
    for (int u = U; u >= 0; --u) {
      beta(t, u) = internal::BetaCell(lattice, beta, t, u);
    }
  }
  return beta;
}

LossResult LossAndGrad(const Lattice& lattice) {
  ForwardResult fwd = serial::Forward(lattice);
  const Grid beta = serial::Backward(lattice);
  LossResult out = internal::EmptyResult(lattice);
  out.loss = -fwd.total;
  for (int t = 0; t < lattice.num_frames(); ++t) {
    internal::GradRow(lattice, fwd.alpha, beta, fwd.total, t, out);
  }
  return out;
}

}  // namespace latticeloss::serial
