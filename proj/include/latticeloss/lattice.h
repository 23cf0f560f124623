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

#ifndef LATTICELOSS_LATTICE_H_
#define LATTICELOSS_LATTICE_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "latticeloss/grid.h"

namespace latticeloss {

// The transducer alignment lattice of one utterance.
//
// Node (t, u) means "u tokens emitted after consuming frames 0..t-1 and about
// to process frame t". Two log-probability grids hang off the nodes:
//
//   y(t, u)      0 <= t < T, 0 <= u < U    emit token u+1, move to (t, u+1)
//   blank(t, u)  0 <= t < T, 0 <= u <= U   emit blank, move to (t+1, u)
//
// Every complete path ends with blank(T-1, U). The entries blank(T-1, u) for
// u < U are stored but never read.
//
// The `normalized` flag only records whether the grids came from a softmax;
// penalized lattices (entries possibly > 0) are legal everywhere.
class Lattice {
 public:
  // Throws std::invalid_argument on bad dimensions or non-finite entries.
  Lattice(int num_frames, int num_tokens, std::vector<double> y,
          std::vector<double> blank, bool normalized = false);

  // Every entry of both grids set to `value`.
  static Lattice Uniform(int num_frames, int num_tokens, double value);

  int num_frames() const { return y_.rows(); }
  int num_tokens() const { return y_.cols(); }
  bool normalized() const { return normalized_; }

  double y(int t, int u) const { return y_(t, u); }
  double blank(int t, int u) const { return blank_(t, u); }

  const Grid& y_grid() const { return y_; }
  const Grid& blank_grid() const { return blank_; }

  friend bool operator==(const Lattice&, const Lattice&) = default;

 private:
  Grid y_;
  Grid blank_;
  bool normalized_ = false;
};

// Raw joiner output for one utterance: logits(t, u, v) for 0 <= t < T,
// 0 <= u <= U, 0 <= v < V, stored row-major in that order.
struct TokenizedUtterance {
  int num_frames = 0;
  int vocab_size = 0;
  int blank_id = 0;
  std::vector<int> tokens;
  std::vector<double> logits;

  int num_tokens() const { return static_cast<int>(tokens.size()); }
  std::size_t Index(int t, int u, int v) const {
    return (static_cast<std::size_t>(t) * (tokens.size() + 1) + u) *
               vocab_size + v;
  }
  double logit(int t, int u, int v) const { return logits[Index(t, u, v)]; }

  // Throws std::invalid_argument if any field is inconsistent.
  void Validate() const;
};

// Joint log-softmax over the vocabulary at every node; y picks the next
// transcript token, blank picks blank_id. The result is flagged normalized.
Lattice LatticeFromLogits(const TokenizedUtterance& utt);

// In-place log-softmax over one node's logits.
void LogSoftmax(std::span<const double> logits, std::span<double> out);

// JSON document: {"T", "U", "y": [T*U], "blank": [T*(U+1)], "normalized"}.
// Parse errors and schema violations throw std::runtime_error.
std::string WriteLatticeJson(const Lattice& lattice);
Lattice ReadLatticeJson(std::string_view text);

// Binary document: "LTC1", T and U as little-endian u32, then y and blank as
// little-endian f64. The format has no normalized flag; reads yield false.
std::string WriteLatticeBinary(const Lattice& lattice);
Lattice ReadLatticeBinary(std::string_view bytes);

}  // namespace latticeloss

#endif  // LATTICELOSS_LATTICE_H_
