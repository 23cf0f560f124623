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

#include "latticeloss/alignment.h"

#include <stdexcept>

namespace latticeloss {

bool IsValidPath(const AlignmentPath& path, int num_frames) {
  int prev = 0;
  for (int frame : path.emission_frames) {
    if (frame < prev || frame >= num_frames) return false;
    prev = frame;
  }
  return true;
}

double DelayScore(const AlignmentPath& path, int num_frames) {
  const double middle = 0.5 * (num_frames - 1);
  double d = 0.0;
  for (int frame : path.emission_frames) d += middle - frame;
  return d;
}

double PathScore(const Lattice& lattice, const AlignmentPath& path) {
  const int T = lattice.num_frames();
  const int U = lattice.num_tokens();
  if (path.num_tokens() != U || !IsValidPath(path, T)) {
    throw std::invalid_argument("path does not fit the lattice");
  }
  double score = 0.0;
  int u = 0;
  for (int t = 0; t < T; ++t) {
    while (u < U && path.emission_frames[u] == t) {
      score += lattice.y(t, u);
      ++u;
    }
    score += lattice.blank(t, u);
  }
  return score;
}

}  // namespace latticeloss
