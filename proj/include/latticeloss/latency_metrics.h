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

// Word-level latency between a hypothesis and reference timestamps.
//
//   MAD: mean over all correctly recognized words of (t_hyp - t_ref), pooled
//        across utterances.
//   MED: mean over utterances of (t_hyp - t_ref) for the last word.
//
// Only words matched by a Levenshtein alignment count. Reference times are
// used as given (onset or offset is up to whoever produced them).

#ifndef LATTICELOSS_LATENCY_METRICS_H_
#define LATTICELOSS_LATENCY_METRICS_H_

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace latticeloss {

struct TimedWord {
  std::string word;
  double time = 0.0;  // seconds
};

struct TimedUtterance {
  std::string id;
  std::vector<TimedWord> hyp;
  std::vector<TimedWord> ref;
};

using WordMatch = std::pair<std::size_t, std::size_t>;  // (hyp, ref)

// Thrown when a metric has nothing to average over.
class NoDataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Unit-cost Levenshtein alignment of the word strings; returns the positions
// where equal words are aligned. Among optimal alignments the trace prefers,
// step by step from the start, match > substitution > deletion > insertion,
// which resolves ties toward the earliest hypothesis index.
std::vector<WordMatch> MatchWords(const std::vector<TimedWord>& hyp,
                                  const std::vector<TimedWord>& ref);

// Throws NoDataError when no word matches anywhere.
double MeanAlignmentDelay(const std::vector<TimedUtterance>& utterances);

// By default only utterances whose last hypothesis word is aligned to their
// last reference word as a match contribute; `include_all` uses the last word
// of every utterance (and throws std::invalid_argument on an empty side).
// Throws NoDataError when no utterance contributes.
double MeanEndDelay(const std::vector<TimedUtterance>& utterances,
                    bool include_all = false);

struct LatencyReport {
  double mad = 0.0;  // seconds
  double med = 0.0;  // seconds
  std::size_t matched_pairs = 0;
  std::size_t med_utterances = 0;
  std::vector<std::vector<WordMatch>> matches;  // per utterance
};

LatencyReport ComputeLatency(const std::vector<TimedUtterance>& utterances,
                             bool include_all = false);

// One utterance per line: "utt_id<TAB>word:time word:time ...". Blank lines
// are skipped. Throws std::runtime_error with the line number on bad input.
std::vector<std::pair<std::string, std::vector<TimedWord>>>
ParseTimestampFile(std::string_view text);

// Joins hypothesis and reference records by utterance id, in reference
// order. A reference without a hypothesis gets an empty one; a hypothesis id
// missing from the reference is an error.
std::vector<TimedUtterance> JoinTimestamps(
    const std::vector<std::pair<std::string, std::vector<TimedWord>>>& hyp,
    const std::vector<std::pair<std::string, std::vector<TimedWord>>>& ref);

}  // namespace latticeloss

#endif  // LATTICELOSS_LATENCY_METRICS_H_
