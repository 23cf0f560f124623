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

// Per-cell expressions shared by the serial and wavefront kernels. Keeping a
// single definition is what makes the two schedules bit-identical.

#ifndef LATTICELOSS_SRC_LOSS_KERNELS_H_
#define LATTICELOSS_SRC_LOSS_KERNELS_H_

#include <cmath>

#include "latticeloss/loss_core.h"

namespace latticeloss::internal {

inline double AlphaCell(const Lattice& lat, const Grid& alpha, int t, int u) {
  if (t == 0 && u == 0) return 0.0;
  const double emit = u > 0 ? alpha(t, u - 1) + lat.y(t, u - 1) : kLogZero;
  const double skip = t > 0 ? alpha(t - 1, u) + lat.blank(t - 1, u) : kLogZero;
  return LogAdd(emit, skip);
}

inline double BetaCell(const Lattice& lat, const Grid& beta, int t, int u) {
  const int T = lat.num_frames();
  const int U = lat.num_tokens();
  if (t == T - 1 && u == U) return lat.blank(t, u);
  const double emit = u < U ? lat.y(t, u) + beta(t, u + 1) : kLogZero;
  const double skip = t < T - 1 ? lat.blank(t, u) + beta(t + 1, u) : kLogZero;
  return LogAdd(emit, skip);
}

// Fills gradient row t from finished alpha/beta grids.
inline void GradRow(const Lattice& lat, const Grid& alpha, const Grid& beta,
                    double total, int t, LossResult& out) {
  const int T = lat.num_frames();
  const int U = lat.num_tokens();
  for (int u = 0; u < U; ++u) {
    out.grad_y(t, u) =
        -std::exp(alpha(t, u) + lat.y(t, u) + beta(t, u + 1) - total);
  }
  for (int u = 0; u <= U; ++u) {
    if (t < T - 1) {
      out.grad_blank(t, u) =
          -std::exp(alpha(t, u) + lat.blank(t, u) + beta(t + 1, u) - total);
    } else {
      out.grad_blank(t, u) = u == U ? -1.0 : 0.0;
    }
  }
}

inline LossResult EmptyResult(const Lattice& lat) {
  LossResult out;
  out.grad_y = Grid(lat.num_frames(), lat.num_tokens());
  out.grad_blank = Grid(lat.num_frames(), lat.num_tokens() + 1);
  return out;
}

}  // namespace latticeloss::internal

#endif  // LATTICELOSS_SRC_LOSS_KERNELS_H_
