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

#include "latticeloss/lattice.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace latticeloss {
namespace {

void CheckFinite(std::span<const double> values, const char* what) {
  for (double v : values) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument(std::string("non-finite entry in ") + what);
    }
  }
}

}  // namespace

Lattice::Lattice(int num_frames, int num_tokens, std::vector<double> y,
                 std::vector<double> blank, bool normalized)
    : normalized_(normalized) {
  if (num_frames < 1) throw std::invalid_argument("lattice needs T >= 1");
  if (num_tokens < 0) throw std::invalid_argument("lattice needs U >= 0");
  const auto t = static_cast<std::size_t>(num_frames);
  const auto u = static_cast<std::size_t>(num_tokens);
  if (y.size() != t * u) {
    throw std::invalid_argument("y grid must hold T*U entries");
  }
  if (blank.size() != t * (u + 1)) {
    throw std::invalid_argument("blank grid must hold T*(U+1) entries");
  }
  CheckFinite(y, "y");
  CheckFinite(blank, "blank");
  y_ = Grid(num_frames, num_tokens, std::move(y));
  blank_ = Grid(num_frames, num_tokens + 1, std::move(blank));
}

Lattice Lattice::Uniform(int num_frames, int num_tokens, double value) {
  const auto t = static_cast<std::size_t>(std::max(num_frames, 0));
  const auto u = static_cast<std::size_t>(std::max(num_tokens, 0));
  return Lattice(num_frames, num_tokens, std::vector<double>(t * u, value),
                 std::vector<double>(t * (u + 1), value));
}

void TokenizedUtterance::Validate() const {
  if (num_frames < 1) throw std::invalid_argument("utterance needs T >= 1");
  if (vocab_size < 2) throw std::invalid_argument("vocabulary needs V >= 2");
  if (blank_id < 0 || blank_id >= vocab_size) {
    throw std::invalid_argument("blank_id out of range");
  }
  for (int token : tokens) {
    if (token < 0 || token >= vocab_size) {
      throw std::invalid_argument("token id out of range");
    }
    if (token == blank_id) {
      throw std::invalid_argument("transcript contains the blank id");
    }
  }
  const std::size_t expected = static_cast<std::size_t>(num_frames) *
                               (tokens.size() + 1) * vocab_size;
  if (logits.size() != expected) {
    throw std::invalid_argument("logits must hold T*(U+1)*V entries");
  }
}

void LogSoftmax(std::span<const double> logits, std::span<double> out) {
  const double max = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (double x : logits) sum += std::exp(x - max);
  // Subtract max first; folding it into the normalizer costs bits when the
  // logits are large.
  const double log_sum = std::log(sum);
  for (std::size_t v = 0; v < logits.size(); ++v) {
    out[v] = (logits[v] - max) - log_sum;
  }
}

Lattice LatticeFromLogits(const TokenizedUtterance& utt) {
  utt.Validate();
  const int T = utt.num_frames;
  const int U = utt.num_tokens();
  const int V = utt.vocab_size;
  std::vector<double> y(static_cast<std::size_t>(T) * U);
  std::vector<double> blank(static_cast<std::size_t>(T) * (U + 1));
  std::vector<double> log_probs(V);
  for (int t = 0; t < T; ++t) {
    for (int u = 0; u <= U; ++u) {
      std::span<const double> row(&utt.logits[utt.Index(t, u, 0)], V);
      LogSoftmax(row, log_probs);
      blank[static_cast<std::size_t>(t) * (U + 1) + u] = log_probs[utt.blank_id];
      if (u < U) {
        y[static_cast<std::size_t>(t) * U + u] = log_probs[utt.tokens[u]];
      }
    }
  }
  return Lattice(T, U, std::move(y), std::move(blank), /*normalized=*/true);
}

}  // namespace latticeloss
