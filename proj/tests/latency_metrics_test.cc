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

#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "latticeloss/latency_metrics.h"
#include "latticeloss/random.h"

namespace latticeloss {
namespace {

std::vector<TimedWord> Words(const std::string& text,
                             std::vector<double> times = {}) {
  std::vector<TimedWord> out;
  std::size_t pos = 0, i = 0;
  while (pos < text.size()) {
    std::size_t end = text.find(' ', pos);
    if (end == std::string::npos) end = text.size();
    out.push_back({text.substr(pos, end - pos),
                   i < times.size() ? times[i] : static_cast<double>(i)});
    ++i;
    pos = end + 1;
  }
  return out;
}

TEST(MatchWordsTest, Identical) {
  const auto m = MatchWords(Words("a b c"), Words("a b c"));
  EXPECT_EQ(m, (std::vector<WordMatch>{{0, 0}, {1, 1}, {2, 2}}));
}

TEST(MatchWordsTest, SubstitutionIsNotAMatch) {
  EXPECT_EQ(MatchWords(Words("a b c"), Words("a x c")),
            (std::vector<WordMatch>{{0, 0}, {2, 2}}));
}

TEST(MatchWordsTest, TieBreakPicksEarliestHypothesis) {
  EXPECT_EQ(MatchWords(Words("a a"), Words("a")),
            (std::vector<WordMatch>{{0, 0}}));
  EXPECT_EQ(MatchWords(Words("a"), Words("a a")),
            (std::vector<WordMatch>{{0, 0}}));
}

TEST(MatchWordsTest, InsertionsAndDeletions) {
  EXPECT_EQ(MatchWords(Words("a x b c"), Words("a b c")),
            (std::vector<WordMatch>{{0, 0}, {2, 1}, {3, 2}}));
  EXPECT_EQ(MatchWords(Words("a c"), Words("a b c")),
            (std::vector<WordMatch>{{0, 0}, {1, 2}}));
  EXPECT_TRUE(MatchWords({}, Words("a")).empty());
  EXPECT_TRUE(MatchWords(Words("a"), {}).empty());
}

TEST(MatchWordsTest, IgnoresTimestamps) {
  EXPECT_EQ(MatchWords(Words("a b", {5, 9}), Words("b a", {0, 1})),
            MatchWords(Words("a b"), Words("b a")));
}

TEST(MadTest, SingleUtterance) {
  const std::vector<TimedUtterance> utts = {
      {"u1", Words("hi there", {0.5, 1.2}), Words("hi there", {0.4, 1.0})}};
  EXPECT_NEAR(MeanAlignmentDelay(utts), 0.15, 1e-12);
}

TEST(MadTest, PooledOverWords) {
  const std::vector<TimedUtterance> utts = {
      {"u1", Words("a b", {0.2, 0.5}), Words("a b", {0.1, 0.3})},  // sum 0.3
      {"u2", Words("c", {0.9}), Words("c", {1.0})}};               // sum -0.1
  EXPECT_NEAR(MeanAlignmentDelay(utts), 0.2 / 3.0, 1e-12);
  EXPECT_NEAR(MeanAlignmentDelay(utts), 0.0667, 1e-4);
}

TEST(MadTest, IdenticalAndNoData) {
  const auto w = Words("a b c", {0.3, 0.7, 1.1});
  EXPECT_EQ(MeanAlignmentDelay({{"u", w, w}}), 0.0);
  EXPECT_THROW(MeanAlignmentDelay({{"u", Words("a"), Words("b")}}),
               NoDataError);
  EXPECT_THROW(MeanAlignmentDelay({}), NoDataError);
}

TEST(MedTest, Examples) {
  EXPECT_NEAR(MeanEndDelay({{"u", Words("x", {2.0}), Words("x", {1.8})}}), 0.2,
              1e-12);
  const auto w = Words("a b", {0.3, 0.7});
  EXPECT_EQ(MeanEndDelay({{"u", w, w}}), 0.0);
  EXPECT_NEAR(MeanEndDelay({{"u1", Words("x", {2.0}), Words("x", {1.8})},
                            {"u2", Words("y", {3.0}), Words("y", {3.1})}}),
              0.05, 1e-12);
  EXPECT_THROW(MeanEndDelay({}), NoDataError);
}

TEST(MedTest, UnmatchedLastWordIsSkippedUnlessAll) {
  const std::vector<TimedUtterance> utts = {
      {"u1", Words("a b", {1.0, 2.0}), Words("a b", {1.0, 1.5})},
      {"u2", Words("a c", {1.0, 4.0}), Words("a b", {1.0, 3.0})}};
  EXPECT_NEAR(MeanEndDelay(utts), 0.5, 1e-12);
  EXPECT_NEAR(MeanEndDelay(utts, true), 0.75, 1e-12);
  EXPECT_THROW(MeanEndDelay({utts[1]}), NoDataError);
  EXPECT_THROW(MeanEndDelay({{"u", {}, Words("a")}}, true),
               std::invalid_argument);
}

std::vector<TimedUtterance> RandomUtterances(std::uint64_t seed) {
  Rng rng(seed);
  const char* vocab[] = {"a", "b", "c", "d"};
  std::vector<TimedUtterance> utts;
  for (int n = 0; n < 20; ++n) {
    TimedUtterance utt{"u" + std::to_string(n), {}, {}};
    double t = 0.0;
    for (int k = rng.UniformInt(1, 6); k > 0; --k) {
      t += rng.Uniform(0.1, 0.5);
      utt.ref.push_back({vocab[rng.UniformInt(0, 3)], t});
    }
    for (const auto& w : utt.ref) {
      if (rng.Uniform() < 0.8) utt.hyp.push_back({w.word, w.time + rng.Uniform(-0.2, 0.3)});
      if (rng.Uniform() < 0.1) utt.hyp.push_back({vocab[rng.UniformInt(0, 3)], w.time});
    }
    if (utt.hyp.empty()) utt.hyp = utt.ref;
    utts.push_back(utt);
  }
  return utts;
}

TEST(LatencyPropertyTest, TranslationShiftsBothMetrics) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto utts = RandomUtterances(seed);
    const LatencyReport base = ComputeLatency(utts);
    const double c = 0.37;
    for (auto& utt : utts) {
      for (auto& w : utt.hyp) w.time += c;
    }
    const LatencyReport shifted = ComputeLatency(utts);
    EXPECT_NEAR(shifted.mad, base.mad + c, 1e-12);
    EXPECT_NEAR(shifted.med, base.med + c, 1e-12);
    EXPECT_EQ(shifted.matches, base.matches);
  }
}

TEST(LatencyPropertyTest, SwappingSidesNegates) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto utts = RandomUtterances(seed);
    const LatencyReport base = ComputeLatency(utts);
    for (auto& utt : utts) std::swap(utt.hyp, utt.ref);
    const LatencyReport swapped = ComputeLatency(utts);
    EXPECT_NEAR(swapped.mad, -base.mad, 1e-12);
    EXPECT_NEAR(swapped.med, -base.med, 1e-12);
    EXPECT_EQ(swapped.matched_pairs, base.matched_pairs);
  }
}

TEST(ComputeLatencyTest, ReportFields) {
  const std::vector<TimedUtterance> utts = {
      {"u1", Words("a b", {0.5, 1.2}), Words("a b", {0.4, 1.0})},
      {"u2", Words("c d", {1.0, 2.0}), Words("c e", {1.0, 2.0})}};
  const LatencyReport r = ComputeLatency(utts);
  EXPECT_EQ(r.matched_pairs, 3u);
  EXPECT_EQ(r.med_utterances, 1u);
  EXPECT_NEAR(r.mad, 0.1, 1e-12);
  EXPECT_NEAR(r.med, 0.2, 1e-12);
  ASSERT_EQ(r.matches.size(), 2u);
  EXPECT_EQ(r.matches[1], (std::vector<WordMatch>{{0, 0}}));
  for (std::size_t n = 0; n < utts.size(); ++n) {
    EXPECT_LE(r.matches[n].size(),
              std::min(utts[n].hyp.size(), utts[n].ref.size()));
  }
}

TEST(TimestampFileTest, Parses) {
  const auto records = ParseTimestampFile(
      "utt1\thello:0.120 world:0.480\n"
      "\n"
      "utt2\tratio:1:2:1.500\r\n"
      "utt3\t\n");
  ASSERT_EQ(records.size(), 3u);
  EXPECT_EQ(records[0].first, "utt1");
  ASSERT_EQ(records[0].second.size(), 2u);
  EXPECT_EQ(records[0].second[1].word, "world");
  EXPECT_EQ(records[0].second[1].time, 0.48);
  EXPECT_EQ(records[1].second[0].word, "ratio:1:2");
  EXPECT_EQ(records[1].second[0].time, 1.5);
  EXPECT_TRUE(records[2].second.empty());
}

TEST(TimestampFileTest, ErrorsNameTheLine) {
  for (const char* bad : {"utt1\thello:0.1\nno tab here\n",
                          "utt1\thello:0.1\nutt2\thello\n",
                          "utt1\thello:0.1\nutt2\thello:abc\n",
                          "utt1\thello:0.1\nutt2\thello:-1\n"}) {
    try {
      ParseTimestampFile(bad);
      ADD_FAILURE() << "accepted: " << bad;
    } catch (const std::runtime_error& e) {
      EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos)
          << e.what();
    }
  }
}

TEST(TimestampFileTest, JoinByUtteranceId) {
  const auto hyp = ParseTimestampFile("b\tx:1.0\n");
  const auto ref = ParseTimestampFile("a\tx:0.5\nb\tx:0.8\n");
  const auto utts = JoinTimestamps(hyp, ref);
  ASSERT_EQ(utts.size(), 2u);
  EXPECT_EQ(utts[0].id, "a");
  EXPECT_TRUE(utts[0].hyp.empty());
  EXPECT_EQ(utts[1].hyp[0].time, 1.0);
  EXPECT_THROW(JoinTimestamps(ParseTimestampFile("c\tx:1.0\n"), ref),
               std::runtime_error);
}

}  // namespace
}  // namespace latticeloss
