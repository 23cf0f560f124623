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

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <gtest/gtest.h>

#include "latticeloss/delay_penalty.h"
#include "latticeloss/loss_core.h"
#include "latticeloss/toy_task.h"

namespace latticeloss::toy {
namespace {

bool SameStats(const std::vector<EpochStats>& a,
               const std::vector<EpochStats>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].epoch != b[i].epoch || a[i].train_loss != b[i].train_loss ||
        a[i].heldout_loss != b[i].heldout_loss ||
        a[i].mean_delay != b[i].mean_delay) {
      return false;
    }
  }
  return true;
}

TrainConfig SmallConfig() {
  TrainConfig config;
  config.train_size = 8;
  config.heldout_size = 4;
  config.batch_size = 4;
  config.epochs = 4;
  config.warmup_epochs = 1;
  return config;
}

TEST(GenerateUtteranceTest, StructuralInvariants) {
  const TaskConfig task;
  Rng rng(1);
  for (int n = 0; n < 100; ++n) {
    const Utterance utt = GenerateUtterance(task, rng);
    const int U = static_cast<int>(utt.tokens.size());
    ASSERT_GE(U, task.min_tokens);
    ASSERT_LE(U, task.max_tokens);
    ASSERT_EQ(utt.onsets.size(), utt.tokens.size());
    EXPECT_EQ(utt.feature_dim, task.feature_dim());
    EXPECT_EQ(utt.features.size(),
              static_cast<std::size_t>(utt.num_frames) * utt.feature_dim);
    for (int u = 0; u < U; ++u) {
      EXPECT_GE(utt.tokens[u], 1);
      EXPECT_LT(utt.tokens[u], task.vocab_size());
      if (u > 0) {
        EXPECT_NE(utt.tokens[u], utt.tokens[u - 1]);
        EXPECT_GE(utt.onsets[u] - utt.onsets[u - 1],
                  task.evidence_frames + task.min_gap);
      }
    }
    if (U > 0) {
      EXPECT_GE(utt.onsets[0], task.min_gap);
      EXPECT_LE(utt.onsets.back() + task.evidence_frames, utt.num_frames);
    }
    for (int t = 0; t < utt.num_frames; ++t) EXPECT_EQ(utt.frame(t)[0], 1.0);
  }
}

TEST(GenerateUtteranceTest, EvidenceLayout) {
  TaskConfig task;
  task.noise = 0.0;
  Rng rng(2);
  const Utterance utt = GenerateUtterance(task, rng);
  for (std::size_t u = 0; u < utt.tokens.size(); ++u) {
    const int pair = 1 + (utt.tokens[u] - 1) / 2;
    const int id = 1 + task.num_pairs + utt.tokens[u] - 1;
    for (int k = 0; k < task.evidence_frames; ++k) {
      const auto f = utt.frame(utt.onsets[u] + k);
      EXPECT_EQ(f[pair], 1.0);
      EXPECT_EQ(f[id], k >= task.ambiguous_frames ? 1.0 : 0.0);
    }
  }
}

TEST(GenerateUtteranceTest, RejectsBadConfig) {
  Rng rng(3);
  TaskConfig task;
  task.ambiguous_frames = task.evidence_frames;
  EXPECT_THROW(GenerateUtterance(task, rng), std::invalid_argument);
  task = TaskConfig();
  task.max_tokens = task.min_tokens - 1;
  EXPECT_THROW(GenerateUtterance(task, rng), std::invalid_argument);
}

double ModelLoss(const Model& model, const Utterance& utt,
                 const PenaltyConfig& penalty) {
  return PenalizedLossAndGrad(LatticeFromLogits(model.Logits(utt)), penalty)
      .loss;
}

TEST(ModelTest, ParameterGradientsMatchFiniteDifferences) {
  TaskConfig task;
  task.num_pairs = 1;
  task.min_tokens = 2;
  task.max_tokens = 2;
  task.evidence_frames = 3;
  task.ambiguous_frames = 1;
  Rng rng(4);
  const Utterance utt = GenerateUtterance(task, rng);
  Model model(task.feature_dim(), task.vocab_size(), 2);
  for (double& p : model.params()) p = 0.5 * rng.Normal();

  for (double lambda : {0.0, 0.3}) {
    const PenaltyConfig penalty{lambda, PenaltySide::kNonBlank, true};
    const TokenizedUtterance logits = model.Logits(utt);
    const LossResult r =
        PenalizedLossAndGrad(LatticeFromLogits(logits), penalty);
    std::vector<double> grad(model.params().size(), 0.0);
    model.AccumulateGrad(utt, LogitGrads(logits, r), grad);
    const double h = 1e-5;
    for (std::size_t k = 0; k < grad.size(); ++k) {
      Model plus = model, minus = model;
      plus.params()[k] += h;
      minus.params()[k] -= h;
      const double numeric =
          (ModelLoss(plus, utt, penalty) - ModelLoss(minus, utt, penalty)) /
          (2 * h);
      const double denom =
          std::max({std::abs(numeric), std::abs(grad[k]), 1e-3});
      EXPECT_LE(std::abs(numeric - grad[k]) / denom, 1e-6)
          << "param " << k << " lambda " << lambda;
    }
  }
}

TEST(ModelTest, WindowBeforeTheFirstFrameSeesSilence) {
  TaskConfig task;
  Rng rng(5);
  const Utterance utt = GenerateUtterance(task, rng);
  Model model(task.feature_dim(), task.vocab_size(), 3);
  for (double& p : model.params()) p = rng.Normal();
  // Frame 0 and a copy of it placed later with silent history must agree
  // on the acoustic part of the logits.
  Utterance shifted = utt;
  shifted.num_frames = utt.num_frames + 2;
  shifted.features.assign(static_cast<std::size_t>(2) * utt.feature_dim, 0.0);
  shifted.features[0] = 1.0;
  shifted.features[utt.feature_dim] = 1.0;
  shifted.features.insert(shifted.features.end(), utt.features.begin(),
                          utt.features.end());
  const TokenizedUtterance a = model.Logits(utt);
  const TokenizedUtterance b = model.Logits(shifted);
  for (int v = 0; v < task.vocab_size(); ++v) {
    EXPECT_NEAR(a.logit(0, 0, v), b.logit(2, 0, v), 1e-12);
  }
}

TEST(TrainRunTest, ZeroStrengthRegularizersAreIdentical) {
  const TrainConfig config = SmallConfig();
  const RunResult plain = TrainRun(config, {Method::kDelayPenalty, 0.0}, 0);
  const RunResult fe = TrainRun(config, {Method::kFastEmit, 0.0}, 0);
  EXPECT_TRUE(SameStats(plain.epochs, fe.epochs));
  const RunResult blank =
      TrainRun(config, {Method::kDelayPenalty, 0.0, PenaltySide::kBlank}, 0);
  EXPECT_TRUE(SameStats(plain.epochs, blank.epochs));
}

TEST(TrainRunTest, DeterministicAndSeedDependent) {
  const TrainConfig config = SmallConfig();
  const RunSpec spec{Method::kDelayPenalty, 0.2};
  const RunResult a = TrainRun(config, spec, 1);
  const RunResult b = TrainRun(config, spec, 1);
  const RunResult c = TrainRun(config, spec, 2);
  EXPECT_TRUE(SameStats(a.epochs, b.epochs));
  EXPECT_FALSE(SameStats(a.epochs, c.epochs));
  ASSERT_EQ(a.epochs.size(), 4u);
  for (const EpochStats& e : a.epochs) {
    EXPECT_TRUE(std::isfinite(e.train_loss));
    EXPECT_GT(e.heldout_loss, 0.0);
  }
}

TEST(TrainRunTest, PenaltyOnlyActsAfterWarmup) {
  const TrainConfig config = SmallConfig();
  const RunResult plain = TrainRun(config, {Method::kDelayPenalty, 0.0}, 0);
  const RunResult pen = TrainRun(config, {Method::kDelayPenalty, 0.5}, 0);
  EXPECT_TRUE(SameStats({plain.epochs[0]}, {pen.epochs[0]}));
  EXPECT_NE(plain.epochs[1].train_loss, pen.epochs[1].train_loss);
}

TEST(TrainRunTest, DivergenceIsReported) {
  TrainConfig config = SmallConfig();
  config.learning_rate = 1e300;
  EXPECT_THROW(TrainRun(config, {}, 0), std::runtime_error);
  config = SmallConfig();
  config.batch_size = 0;
  EXPECT_THROW(TrainRun(config, {}, 0), std::invalid_argument);
}

TEST(TrainAllTest, IndependentOfThreadCount) {
  const TrainConfig config = SmallConfig();
  const std::vector<RunSpec> specs = {{Method::kDelayPenalty, 0.0},
                                      {Method::kDelayPenalty, 0.2},
                                      {Method::kFastEmit, 0.5}};
  const int saved = NumThreads();
  SetNumThreads(1);
  const auto one = TrainAll(config, specs, 3);
  SetNumThreads(4);
  const auto four = TrainAll(config, specs, 3);
  SetNumThreads(saved);
  ASSERT_EQ(one.size(), 9u);
  for (std::size_t i = 0; i < one.size(); ++i) {
    EXPECT_EQ(one[i].seed_index, static_cast<int>(i % 3));
    EXPECT_EQ(one[i].spec.lambda, specs[i / 3].lambda);
    EXPECT_TRUE(SameStats(one[i].epochs, four[i].epochs));
    EXPECT_TRUE(SameStats(one[i].epochs,
                          TrainRun(config, specs[i / 3], i % 3).epochs));
  }
  const auto mean = AverageOverSeeds(one, specs[1]);
  ASSERT_EQ(mean.size(), 4u);
  double delay = 0.0;
  for (int s = 0; s < 3; ++s) delay += one[3 + s].epochs.back().mean_delay;
  EXPECT_NEAR(mean.back().mean_delay, delay / 3, 1e-12);
}

}  // namespace
}  // namespace latticeloss::toy
