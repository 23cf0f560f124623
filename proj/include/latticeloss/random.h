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

// All randomness in the project comes from std::mt19937_64. Values are
// mapped to doubles and integers here rather than through <random>
// distributions, whose output is implementation-defined, so that a seed
// yields the same numbers with any standard library.

#ifndef LATTICELOSS_RANDOM_H_
#define LATTICELOSS_RANDOM_H_

#include <cstdint>
#include <random>
#include <vector>

#include "latticeloss/lattice.h"

namespace latticeloss {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t NextU64() { return engine_(); }
  // [0, 1) with 53 random bits.
  double Uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }
  // Inclusive on both ends.
  int UniformInt(int lo, int hi);
  // Standard normal via Box-Muller.
  double Normal();

 private:
  std::mt19937_64 engine_;
};

// Independent stream seed for (seed, stream), via the splitmix64 finalizer.
std::uint64_t DeriveSeed(std::uint64_t seed, std::uint64_t stream);

// Lattice with every entry uniform in [lo, hi).
Lattice RandomLattice(Rng& rng, int num_frames, int num_tokens, double lo,
                      double hi);

// Random transcript over non-blank ids (blank is 0) and N(0, scale^2) logits.
TokenizedUtterance RandomUtterance(Rng& rng, int num_frames, int num_tokens,
                                   int vocab_size, double logit_scale = 1.0);

// `count` lattices with T uniform in [1, max_frames], U in [0, max_tokens],
// entries uniform in [lo, hi). Lattice i depends only on (seed, i).
std::vector<Lattice> RandomCorpus(std::uint64_t seed, std::size_t count,
                                  int max_frames, int max_tokens,
                                  double lo = -5.0, double hi = 0.0);

}  // namespace latticeloss

#endif  // LATTICELOSS_RANDOM_H_
