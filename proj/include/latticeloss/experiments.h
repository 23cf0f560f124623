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

// Drivers behind the command line tool: the oracle verification suite, the
// lambda sweep over random lattices and the toy training comparison. All
// output is a pure function of the options, whatever the thread count.

#ifndef LATTICELOSS_EXPERIMENTS_H_
#define LATTICELOSS_EXPERIMENTS_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "latticeloss/delay_penalty.h"
#include "latticeloss/toy_task.h"

namespace latticeloss {

// Default lambda grid, in lattice-frame units.
inline const std::vector<double> kDefaultLambdas = {0.0015, 0.0030, 0.0060,
                                                    0.0075, 0.0100};

// ---------------------------------------------------------------- verify

struct VerifyOptions {
  std::size_t corpus_size = 200;
  std::uint64_t seed = 1;
  // Added to every dynamic-programming output before comparison. A negative
  // control: any value well above the tolerances must fail verification.
  double perturb = 0.0;
};

struct CheckResult {
  std::string name;
  double value = 0.0;      // max error, ratio or violation count
  double tolerance = 0.0;  // what `value` was compared against
  bool passed = false;
  std::string detail;
};

struct VerifyReport {
  std::vector<CheckResult> checks;
  bool passed() const;
  const CheckResult* Find(const std::string& name) const;
};

// Random corpus: T in [1, 6], U in [0, 4], entries uniform in [-5, 0).
// Throws std::invalid_argument for an empty corpus.
VerifyReport RunVerify(const VerifyOptions& options);

std::string FormatVerifyReport(const VerifyReport& report);

// ---------------------------------------------------------------- sweep

struct SweepConfig {
  std::vector<double> lambdas = kDefaultLambdas;
  std::uint64_t seed = 1;
  int trials = 10;
  int num_frames = 8;
  int num_tokens = 4;
  int vocab_size = 6;
};

struct SweepRow {
  double lambda = 0.0;
  int trial = 0;
  double d_avg = 0.0;          // posterior mean delay score, penalized lattice
  double viterbi_delay = 0.0;  // delay score of the penalized best path
  double loss = 0.0;           // unpenalized -log p of that path
};

// Trial i uses one random utterance (seed, i) for every lambda. d_avg is
// computed by path enumeration when there are at most 1e5 paths and by
// forward-backward otherwise. Rows are ordered by (lambda, trial). Throws
// std::invalid_argument unless lambdas are finite, non-negative and sorted.
std::vector<SweepRow> RunSweep(const SweepConfig& config);

// "# latticeloss-sweep v1" then "lambda,trial,d_avg,viterbi_delay,loss".
std::string FormatSweepCsv(const std::vector<SweepRow>& rows);

// ---------------------------------------------------------------- toy

struct ToyOptions {
  // Penalty strengths in lattice-frame units; each is multiplied by
  // lambda_scale before training. Zero is always run as the baseline.
  std::vector<double> lambdas = kDefaultLambdas;
  double lambda_scale = 20.0;
  std::optional<double> fastemit;  // unscaled
  PenaltySide side = PenaltySide::kNonBlank;
  int epochs = 20;  // the regularizer switches on after epochs / 2
  int seeds = 8;
  std::uint64_t seed = 1;
};

struct ToySummary {
  toy::RunSpec spec;
  double user_lambda = 0.0;  // as given, before scaling
  std::vector<toy::EpochStats> mean_curve;
  double final_delay = 0.0;
  double final_heldout = 0.0;
  // Epoch-to-epoch moves of the mean delay over the last half of training.
  int delay_rises = 0;
  int delay_falls = 0;
};

struct ToyExperiment {
  toy::TrainConfig config;
  std::vector<ToySummary> summaries;  // baseline, penalties ascending, FastEmit
  std::vector<toy::RunResult> runs;
};

ToyExperiment RunToyExperiment(const ToyOptions& options);

// Counts over epochs [n/2, n) of a curve of n values.
struct TrendCounts {
  int rises = 0;
  int falls = 0;
};
TrendCounts LastHalfTrend(const std::vector<toy::EpochStats>& curve);

// "# latticeloss-train v1" then
// "method,lambda,toy_lambda,seed,epoch,train_loss,heldout_loss,mean_delay";
// per-seed rows followed by seed-averaged rows with seed "mean".
std::string FormatToyCsv(const ToyExperiment& experiment);

std::string FormatToyReport(const ToyExperiment& experiment);

// Shortest decimal text that reads back to the same double.
std::string FormatDouble(double value);

}  // namespace latticeloss

#endif  // LATTICELOSS_EXPERIMENTS_H_
