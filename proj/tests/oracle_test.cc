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
#include <cstdint>
#include <set>

#include <gtest/gtest.h>

#include "latticeloss/loss_core.h"
#include "latticeloss/oracle.h"
#include "latticeloss/random.h"
#include "reference.h"

namespace latticeloss::oracle {
namespace {

using testing::Binomial;
using testing::RefLogTotal;
using testing::RefOccupancy;
using testing::WalkPaths;

const double kLogHalf = std::log(0.5);

TEST(EnumeratePathsTest, SmallCases) {
  const PathEnumeration one = EnumeratePaths(1, 0);
  ASSERT_EQ(one.count, 1u);
  EXPECT_TRUE(one.paths[0].emission_frames.empty());

  const PathEnumeration two = EnumeratePaths(2, 1);
  ASSERT_EQ(two.count, 2u);
  EXPECT_EQ(two.paths[0].emission_frames, std::vector<int>{0});
  EXPECT_EQ(two.paths[1].emission_frames, std::vector<int>{1});

  EXPECT_EQ(EnumeratePaths(4, 3).count, 20u);
}

TEST(EnumeratePathsTest, CountsOrderAndValidity) {
  for (int T = 1; T <= 8; ++T) {
    for (int U = 0; U <= 4; ++U) {
      const PathEnumeration e = EnumeratePaths(T, U);
      EXPECT_EQ(static_cast<double>(e.count), Binomial(T - 1 + U, U));
      EXPECT_EQ(e.paths.size(), e.count);
      EXPECT_EQ(NumPaths(T, U), e.count);
      EXPECT_TRUE(std::is_sorted(e.paths.begin(), e.paths.end()));
      std::set<std::vector<int>> unique;
      for (const auto& p : e.paths) {
        EXPECT_TRUE(IsValidPath(p, T));
        EXPECT_EQ(p.num_tokens(), U);
        unique.insert(p.emission_frames);
      }
      EXPECT_EQ(unique.size(), e.count);
    }
  }
}

TEST(EnumeratePathsTest, AgreesWithMoveByMoveWalk) {
  const PathEnumeration e = EnumeratePaths(5, 3);
  const Lattice lat = Lattice::Uniform(5, 3, kLogHalf);
  const auto walked = WalkPaths(lat);
  ASSERT_EQ(walked.size(), e.count);
  for (std::size_t i = 0; i < walked.size(); ++i) {
    EXPECT_EQ(walked[i].frames, e.paths[i].emission_frames);
  }
}

TEST(EnumeratePathsTest, BudgetIsEnforced) {
  EXPECT_THROW(EnumeratePaths(4, 3, 19), std::length_error);
  EXPECT_NO_THROW(EnumeratePaths(4, 3, 20));
  EXPECT_THROW(EnumeratePaths(40, 20), std::length_error);
  EXPECT_EQ(NumPaths(5000, 5000), SIZE_MAX);
}

TEST(LogSumExpTest, Stable) {
  const std::vector<double> big = {1000.0, 1000.0};
  EXPECT_NEAR(LogSumExp(big), 1000.0 + std::log(2.0), 1e-12);
  const std::vector<double> with_zero = {kLogZero, -1.0};
  EXPECT_EQ(LogSumExp(with_zero), -1.0);
  EXPECT_EQ(LogSumExp(std::vector<double>{}), kLogZero);
}

TEST(OracleLossTest, Examples) {
  const Lattice one(1, 1, {-0.3}, {-0.9, -0.2});
  EXPECT_DOUBLE_EQ(OracleLoss(one), -0.5);
  EXPECT_NEAR(OracleLoss(Lattice::Uniform(3, 2, kLogHalf)),
              std::log(6.0) - 5 * std::log(2.0), 1e-14);
  Rng rng(1);
  const Lattice lat = RandomLattice(rng, 5, 3, -5.0, 0.0);
  EXPECT_NEAR(OracleLoss(lat), Forward(lat).total, 1e-10);
  EXPECT_NEAR(OracleLoss(lat), RefLogTotal(lat), 1e-12);
}

TEST(OracleLossTest, CorpusAgreesWithForward) {
  for (const Lattice& lat : RandomCorpus(2, 200, 6, 4)) {
    EXPECT_NEAR(OracleLoss(lat), Forward(lat).total, 1e-10);
  }
}

TEST(OracleWeightsTest, UniformLattices) {
  const WeightsAndDelay w = OracleWeightsAndDavg(Lattice::Uniform(5, 3, -0.7));
  for (double x : w.weights) EXPECT_NEAR(x, 1.0 / 35.0, 1e-14);
  // Odd T: reversing a path negates its delay score.
  for (int T : {1, 3, 5, 7}) {
    for (int U = 0; U <= 3; ++U) {
      EXPECT_NEAR(OracleWeightsAndDavg(Lattice::Uniform(T, U, kLogHalf)).d_avg,
                  0.0, 1e-12);
    }
  }
}

TEST(OracleWeightsTest, WeightsSumToOne) {
  for (const Lattice& lat : RandomCorpus(3, 50, 6, 4)) {
    const WeightsAndDelay w = OracleWeightsAndDavg(lat);
    double sum = 0.0, d = 0.0;
    for (std::size_t i = 0; i < w.weights.size(); ++i) {
      sum += w.weights[i];
      d += w.weights[i] * DelayScore(w.paths[i], lat.num_frames());
      EXPECT_EQ(w.delay_scores[i], DelayScore(w.paths[i], lat.num_frames()));
    }
    EXPECT_NEAR(sum, 1.0, 1e-10);
    EXPECT_NEAR(w.d_avg, d, 1e-12);
  }
}

TEST(OracleGradTest, Examples) {
  const OracleGrads one = OracleGrad(Lattice(1, 1, {-0.3}, {-0.9, -0.2}));
  EXPECT_NEAR(one.grad_y(0, 0), -1.0, 1e-15);
  EXPECT_NEAR(one.grad_blank(0, 1), -1.0, 1e-15);
  const OracleGrads two = OracleGrad(Lattice::Uniform(2, 1, kLogHalf));
  EXPECT_NEAR(two.grad_y(0, 0), -0.5, 1e-15);
  EXPECT_NEAR(two.grad_y(1, 0), -0.5, 1e-15);
}

TEST(OracleGradTest, MatchesReferenceAndDynamicProgramming) {
  Rng rng(4);
  const Lattice lat = RandomLattice(rng, 4, 2, -5.0, 0.0);
  const OracleGrads o = OracleGrad(lat);
  const LossResult r = LossAndGrad(lat);
  const auto occ = RefOccupancy(lat);
  for (int t = 0; t < 4; ++t) {
    for (int u = 0; u < 2; ++u) {
      EXPECT_NEAR(o.grad_y(t, u), r.grad_y(t, u), 1e-9);
      EXPECT_NEAR(-o.grad_y(t, u), occ.y[t * 2 + u], 1e-12);
    }
    for (int u = 0; u <= 2; ++u) {
      EXPECT_NEAR(o.grad_blank(t, u), r.grad_blank(t, u), 1e-9);
      EXPECT_NEAR(-o.grad_blank(t, u), occ.blank[t * 3 + u], 1e-12);
    }
  }
  for (const Lattice& l : RandomCorpus(5, 200, 6, 4)) {
    const OracleGrads og = OracleGrad(l);
    const LossResult dp = LossAndGrad(l);
    for (std::size_t k = 0; k < og.grad_y.size(); ++k) {
      EXPECT_NEAR(og.grad_y.values()[k], dp.grad_y.values()[k], 1e-9);
    }
    for (std::size_t k = 0; k < og.grad_blank.size(); ++k) {
      EXPECT_NEAR(og.grad_blank.values()[k], dp.grad_blank.values()[k], 1e-9);
    }
  }
}

TEST(RegularizedObjectiveTest, ZeroLambda) {
  Rng rng(6);
  const Lattice lat = RandomLattice(rng, 4, 3, -5.0, 0.0);
  const RegularizedObjective r = OracleDelayRegularizedObjective(lat, 0.0);
  EXPECT_EQ(r.augmented, r.total);
  EXPECT_EQ(r.delay_term, 0.0);
  for (std::size_t i = 0; i < r.weights.size(); ++i) {
    EXPECT_EQ(r.exact_grads[i], r.weights[i]);
    EXPECT_NEAR(r.approx_grads[i], r.weights[i], 1e-15);
  }
}

TEST(RegularizedObjectiveTest, TwoPathNumbers) {
  const RegularizedObjective r =
      OracleDelayRegularizedObjective(Lattice::Uniform(2, 1, kLogHalf), 0.1);
  EXPECT_NEAR(r.exact_grads[0], 0.525, 1e-15);
  EXPECT_NEAR(r.exact_grads[1], 0.475, 1e-15);
  EXPECT_NEAR(r.approx_grads[0], 1.0 / (1.0 + std::exp(-0.1)), 1e-15);
  EXPECT_NEAR(r.approx_grads[0], 0.52498, 1e-5);
  EXPECT_NEAR(r.approx_grads[1], 0.47502, 1e-5);
  EXPECT_NEAR(r.d_avg, 0.0, 1e-15);
  EXPECT_NEAR(r.augmented, r.total, 1e-15);
}

TEST(RegularizedObjectiveTest, ExactGradientsSumToOne) {
  for (const Lattice& lat : RandomCorpus(7, 100, 6, 4)) {
    for (double lambda : {1e-3, 1e-2, 0.1, 1.0}) {
      const RegularizedObjective r = OracleDelayRegularizedObjective(lat, lambda);
      double sum = 0.0;
      for (double g : r.exact_grads) sum += g;
      EXPECT_NEAR(sum, 1.0, 1e-12);
      EXPECT_NEAR(r.augmented, r.total + lambda * r.d_avg, 1e-12);
    }
  }
}

TEST(RegularizedObjectiveTest, SecondOrderGap) {
  for (const Lattice& lat : RandomCorpus(8, 100, 5, 3)) {
    for (double lambda : {1e-3, 1e-2}) {
      const RegularizedObjective r = OracleDelayRegularizedObjective(lat, lambda);
      double spread = 0.0;
      for (double d : r.delay_scores) spread = std::max(spread, std::abs(d - r.d_avg));
      for (std::size_t i = 0; i < r.weights.size(); ++i) {
        EXPECT_LE(std::abs(r.exact_grads[i] - r.approx_grads[i]),
                  2 * lambda * lambda * spread * spread + 1e-15);
      }
    }
  }
}

}  // namespace
}  // namespace latticeloss::oracle
