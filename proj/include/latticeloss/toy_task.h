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

// A synthetic streaming task small enough to train in seconds.
//
// Non-blank tokens come in confusable pairs {1,2}, {3,4}, ... Token u's
// evidence occupies frames [onset_u, onset_u + evidence_frames). Over that
// whole span a "pair" channel is on; the channel that tells the two members
// of the pair apart only switches on `ambiguous_frames` frames after the
// onset. A causal model that waits longer therefore knows more, which is the
// pressure that drives an unregularized transducer to emit late.
//
// The model is linear: logits(t, u, :) = sum_j W_j feat(t - j) + E[prev(u)],
// a causal window of `window` frames plus a bias keyed on the previous token
// (blank at u = 0).

#ifndef LATTICELOSS_TOY_TASK_H_
#define LATTICELOSS_TOY_TASK_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "latticeloss/delay_penalty.h"
#include "latticeloss/lattice.h"
#include "latticeloss/random.h"

namespace latticeloss::toy {

struct TaskConfig {
  int num_pairs = 3;  // vocabulary is 1 + 2 * num_pairs
  int min_tokens = 3;
  int max_tokens = 5;
  int evidence_frames = 6;
  int ambiguous_frames = 3;
  int min_gap = 1;
  int max_gap = 3;
  double noise = 0.3;
  bool ramp_identity = false;

  int vocab_size() const { return 1 + 2 * num_pairs; }
  // bias + pair channels + identity channels
  int feature_dim() const { return 1 + num_pairs + 2 * num_pairs; }
};

struct Utterance {
  int num_frames = 0;
  int feature_dim = 0;
  std::vector<double> features;  // num_frames x feature_dim
  std::vector<int> tokens;
  std::vector<int> onsets;       // first evidence frame of each token

  std::span<const double> frame(int t) const {
    return {features.data() + static_cast<std::size_t>(t) * feature_dim,
            static_cast<std::size_t>(feature_dim)};
  }
};

// No two consecutive tokens are equal.
Utterance GenerateUtterance(const TaskConfig& config, Rng& rng);

class Model {
 public:
  Model(int feature_dim, int vocab_size, int window);

  int window() const { return window_; }
  int vocab_size() const { return vocab_size_; }
  std::span<double> params() { return params_; }
  std::span<const double> params() const { return params_; }

  TokenizedUtterance Logits(const Utterance& utt) const;

  // Adds d(loss)/d(params) given d(loss)/d(logits) for one utterance.
  void AccumulateGrad(const Utterance& utt, std::span<const double> logit_grad,
                      std::span<double> param_grad) const;

 private:
  std::size_t WeightIndex(int v, int lag, int d) const {
    return (static_cast<std::size_t>(v) * window_ + lag) * feature_dim_ + d;
  }
  std::size_t BiasIndex(int prev, int v) const {
    return bias_offset_ + static_cast<std::size_t>(prev) * vocab_size_ + v;
  }

  int feature_dim_;
  int vocab_size_;
  int window_;
  std::size_t bias_offset_;
  std::vector<double> params_;
};

enum class Method { kDelayPenalty, kFastEmit };

struct RunSpec {
  Method method = Method::kDelayPenalty;
  double lambda = 0.0;  // already scaled to toy frames
  PenaltySide side = PenaltySide::kNonBlank;
};

struct TrainConfig {
  TaskConfig task;
  int window = 3;
  int train_size = 64;
  int heldout_size = 64;
  int batch_size = 16;
  int epochs = 20;
  // Epochs trained without any regularizer before the penalty switches on.
  int warmup_epochs = 10;
  double learning_rate = 0.035;
  std::uint64_t seed = 1;
};

struct EpochStats {
  int epoch = 0;
  double train_loss = 0.0;    // mean regularized objective over the epoch
  double heldout_loss = 0.0;  // mean unpenalized loss per held-out utterance
  double mean_delay = 0.0;    // held-out Viterbi frame minus onset, in frames
};

struct RunResult {
  RunSpec spec;
  int seed_index = 0;
  std::vector<EpochStats> epochs;
};

// Trains one model. Throws std::runtime_error if the loss turns non-finite.
RunResult TrainRun(const TrainConfig& config, const RunSpec& spec,
                   int seed_index);

// Every (spec, seed) pair, evaluated in parallel; results ordered by spec
// then seed regardless of thread count.
std::vector<RunResult> TrainAll(const TrainConfig& config,
                                const std::vector<RunSpec>& specs,
                                int num_seeds);

// Seed-averaged trajectory of one spec.
std::vector<EpochStats> AverageOverSeeds(const std::vector<RunResult>& runs,
                                         const RunSpec& spec);

}  // namespace latticeloss::toy

#endif  // LATTICELOSS_TOY_TASK_H_
