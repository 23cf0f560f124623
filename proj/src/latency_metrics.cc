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

#include "latticeloss/latency_metrics.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <sstream>

namespace latticeloss {

std::vector<WordMatch> MatchWords(const std::vector<TimedWord>& hyp,
                                  const std::vector<TimedWord>& ref) {
  const std::size_t n = hyp.size();
  const std::size_t m = ref.size();
  // cost[i][j]: edit distance between hyp[i:] and ref[j:].
  std::vector<std::vector<std::size_t>> cost(n + 1,
                                             std::vector<std::size_t>(m + 1));
  for (std::size_t i = n + 1; i-- > 0;) {
    for (std::size_t j = m + 1; j-- > 0;) {
      if (i == n) {
        cost[i][j] = m - j;
      } else if (j == m) {
        cost[i][j] = n - i;
      } else {
        const bool same = hyp[i].word == ref[j].word;
        cost[i][j] = std::min({cost[i + 1][j + 1] + (same ? 0 : 1),
                               cost[i][j + 1] + 1, cost[i + 1][j] + 1});
      }
    }
  }
  std::vector<WordMatch> matches;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < n || j < m) {
    if (i < n && j < m) {
      const bool same = hyp[i].word == ref[j].word;
      if (cost[i + 1][j + 1] + (same ? 0 : 1) == cost[i][j]) {
        if (same) matches.emplace_back(i, j);
        ++i;
        ++j;
        continue;
      }
    }
    if (j < m && cost[i][j + 1] + 1 == cost[i][j]) {
      ++j;  // deletion: reference word missing from the hypothesis
    } else {
      ++i;  // insertion
    }
  }
  return matches;
}

double MeanAlignmentDelay(const std::vector<TimedUtterance>& utterances) {
  double sum = 0.0;
  std::size_t count = 0;
  for (const auto& utt : utterances) {
    for (const auto& [h, r] : MatchWords(utt.hyp, utt.ref)) {
      sum += utt.hyp[h].time - utt.ref[r].time;
      ++count;
    }
  }
  if (count == 0) throw NoDataError("no matched words to compute MAD over");
  return sum / static_cast<double>(count);
}

double MeanEndDelay(const std::vector<TimedUtterance>& utterances,
                    bool include_all) {
  if (utterances.empty()) throw NoDataError("no utterances for MED");
  double sum = 0.0;
  std::size_t count = 0;
  for (const auto& utt : utterances) {
    if (include_all) {
      if (utt.hyp.empty() || utt.ref.empty()) {
        throw std::invalid_argument("utterance '" + utt.id +
                                    "' has no last word on one side");
      }
    } else {
      if (utt.hyp.empty() || utt.ref.empty()) continue;
      const auto matches = MatchWords(utt.hyp, utt.ref);
      const WordMatch last{utt.hyp.size() - 1, utt.ref.size() - 1};
      if (matches.empty() || matches.back() != last) continue;
    }
    sum += utt.hyp.back().time - utt.ref.back().time;
    ++count;
  }
  if (count == 0) {
    throw NoDataError("no utterance with a matched last word for MED");
  }
  return sum / static_cast<double>(count);
}

LatencyReport ComputeLatency(const std::vector<TimedUtterance>& utterances,
                             bool include_all) {
  LatencyReport report;
  report.matches.reserve(utterances.size());
  for (const auto& utt : utterances) {
    report.matches.push_back(MatchWords(utt.hyp, utt.ref));
    report.matched_pairs += report.matches.back().size();
  }
  report.mad = MeanAlignmentDelay(utterances);
  report.med = MeanEndDelay(utterances, include_all);
  for (std::size_t n = 0; n < utterances.size(); ++n) {
    const auto& utt = utterances[n];
    if (utt.hyp.empty() || utt.ref.empty()) continue;
    const WordMatch last{utt.hyp.size() - 1, utt.ref.size() - 1};
    if (include_all ||
        (!report.matches[n].empty() && report.matches[n].back() == last)) {
      ++report.med_utterances;
    }
  }
  return report;
}

std::vector<std::pair<std::string, std::vector<TimedWord>>>
ParseTimestampFile(std::string_view text) {
  std::vector<std::pair<std::string, std::vector<TimedWord>>> records;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;
    auto fail = [&](const std::string& what) {
      throw std::runtime_error("timestamp line " + std::to_string(line_no) +
                               ": " + what);
    };
    const std::size_t tab = line.find('\t');
    if (tab == std::string_view::npos || tab == 0) {
      fail("expected 'utt_id<TAB>word:time ...'");
    }
    std::vector<TimedWord> words;
    std::istringstream fields(std::string(line.substr(tab + 1)));
    std::string field;
    while (fields >> field) {
      const std::size_t colon = field.rfind(':');
      if (colon == std::string::npos || colon == 0 ||
          colon + 1 == field.size()) {
        fail("bad word:time field '" + field + "'");
      }
      double time = 0.0;
      const char* first = field.data() + colon + 1;
      const char* last = field.data() + field.size();
      const auto [ptr, ec] = std::from_chars(first, last, time);
      if (ec != std::errc() || ptr != last || !std::isfinite(time) ||
          time < 0.0) {
        fail("bad time in '" + field + "'");
      }
      words.push_back({field.substr(0, colon), time});
    }
    records.emplace_back(std::string(line.substr(0, tab)), std::move(words));
  }
  return records;
}

std::vector<TimedUtterance> JoinTimestamps(
    const std::vector<std::pair<std::string, std::vector<TimedWord>>>& hyp,
    const std::vector<std::pair<std::string, std::vector<TimedWord>>>& ref) {
  std::map<std::string, const std::vector<TimedWord>*> by_id;
  for (const auto& [id, words] : hyp) {
    if (!by_id.emplace(id, &words).second) {
      throw std::runtime_error("duplicate hypothesis id '" + id + "'");
    }
  }
  std::vector<TimedUtterance> out;
  out.reserve(ref.size());
  std::size_t used = 0;
  for (const auto& [id, words] : ref) {
    TimedUtterance utt{id, {}, words};
    if (auto it = by_id.find(id); it != by_id.end()) {
      utt.hyp = *it->second;
      ++used;
    }
    out.push_back(std::move(utt));
  }
  if (used != by_id.size()) {
    throw std::runtime_error("hypothesis file has ids absent from reference");
  }
  return out;
}

}  // namespace latticeloss
