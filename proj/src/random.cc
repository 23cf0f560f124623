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

#include "latticeloss/random.h"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace latticeloss {

int Rng::UniformInt(int lo, int hi) {
  if (hi < lo) throw std::invalid_argument("UniformInt needs lo <= hi");
  const std::uint64_t range = static_cast<std::uint64_t>(hi) - lo + 1;
  // Rejection keeps the draw unbiased.
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % range;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return lo + static_cast<int>(x % range);
}

double Rng::Normal() {
  const double u1 = 1.0 - Uniform();  // (0, 1]
  const double u2 = Uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t DeriveSeed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Lattice RandomLattice(Rng& rng, int num_frames, int num_tokens, double lo,
                      double hi) {
  std::vector<double> y(static_cast<std::size_t>(num_frames) * num_tokens);
  std::vector<double> blank(static_cast<std::size_t>(num_frames) *
                            (num_tokens + 1));
  for (double& v : y) v = rng.Uniform(lo, hi);
  for (double& v : blank) v = rng.Uniform(lo, hi);
  return Lattice(num_frames, num_tokens, std::move(y), std::move(blank));
}

TokenizedUtterance RandomUtterance(Rng& rng, int num_frames, int num_tokens,
                                   int vocab_size, double logit_scale) {
  if (vocab_size < 2) throw std::invalid_argument("vocabulary needs V >= 2");
  TokenizedUtterance utt;
  utt.num_frames = num_frames;
  utt.vocab_size = vocab_size;
  utt.blank_id = 0;
  utt.tokens.resize(num_tokens);
  for (int& token : utt.tokens) token = rng.UniformInt(1, vocab_size - 1);
  utt.logits.resize(static_cast<std::size_t>(num_frames) * (num_tokens + 1) *
                    vocab_size);
  for (double& x : utt.logits) x = logit_scale * rng.Normal();
  return utt;
}

std::vector<Lattice> RandomCorpus(std::uint64_t seed, std::size_t count,
                                  int max_frames, int max_tokens, double lo,
                                  double hi) {
  std::vector<Lattice> corpus;
  corpus.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    Rng rng(DeriveSeed(seed, i));
    const int T = rng.UniformInt(1, max_frames);
    const int U = rng.UniformInt(0, max_tokens);
    corpus.push_back(RandomLattice(rng, T, U, lo, hi));
  }
  return corpus;
}

}  // namespace latticeloss
