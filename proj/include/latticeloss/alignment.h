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

#ifndef LATTICELOSS_ALIGNMENT_H_
#define LATTICELOSS_ALIGNMENT_H_

#include <vector>

#include "latticeloss/lattice.h"

namespace latticeloss {

// One complete monotone path through a lattice, identified by the frame at
// which each token is emitted. Non-decreasing; several tokens may share a
// frame.
struct AlignmentPath {
  std::vector<int> emission_frames;

  int num_tokens() const { return static_cast<int>(emission_frames.size()); }
  friend bool operator==(const AlignmentPath&, const AlignmentPath&) = default;
  friend auto operator<=>(const AlignmentPath&, const AlignmentPath&) = default;
};

bool IsValidPath(const AlignmentPath& path, int num_frames);

// Sum over tokens of ((T-1)/2 - frame). Larger means earlier emission.
double DelayScore(const AlignmentPath& path, int num_frames);

// Sum of the log-probabilities of every transition on the path: the U token
// emissions plus one blank leaving each frame, the last being blank(T-1, U).
// Throws std::invalid_argument if the path does not fit the lattice.
double PathScore(const Lattice& lattice, const AlignmentPath& path);

}  // namespace latticeloss

#endif  // LATTICELOSS_ALIGNMENT_H_
