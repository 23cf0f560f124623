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

#include "latticeloss/loss_core.h"

#include <cstdlib>
#include <stdexcept>
#include <string>

#include <omp.h>

#include "loss_kernels.h"

namespace latticeloss {
namespace {

bool UseWavefront(const Lattice& lattice) {
  const long nodes =
      static_cast<long>(lattice.num_frames()) * (lattice.num_tokens() + 1);
  return nodes >= kWavefrontMinNodes && omp_get_max_threads() > 1;
}

}  // namespace

ForwardResult Forward(const Lattice& lattice) {
  return UseWavefront(lattice) ? parallel::Forward(lattice)
                               : serial::Forward(lattice);
}

Grid Backward(const Lattice& lattice) {
  return UseWavefront(lattice) ? parallel::Backward(lattice)
                               : serial::Backward(lattice);
}

LossResult LossAndGrad(const Lattice& lattice) {
  return UseWavefront(lattice) ? parallel::LossAndGrad(lattice)
                               : serial::LossAndGrad(lattice);
}

std::vector<LossResult> LossAndGradBatch(std::span<const Lattice> lattices) {
  std::vector<LossResult> results(lattices.size());
  const auto n = static_cast<long>(lattices.size());
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < n; ++i) {
    results[i] = serial::LossAndGrad(lattices[i]);
  }
  return results;
}

ViterbiResult Viterbi(const Lattice& lattice) {
  const int T = lattice.num_frames();
  const int U = lattice.num_tokens();
  // best(t, u): max score of any suffix from node (t, u).
  Grid best(T, U + 1, kLogZero);
  for (int t = T - 1; t >= 0; --t) {
    for (int u = U; u >= 0; --u) {
      if (t == T - 1 && u == U) {
        best(t, u) = lattice.blank(t, u);
        continue;
      }
      const double emit = u < U ? lattice.y(t, u) + best(t, u + 1) : kLogZero;
      const double skip =
          t < T - 1 ? lattice.blank(t, u) + best(t + 1, u) : kLogZero;
      best(t, u) = emit >= skip ? emit : skip;
    }
  }
  // Walk forward from the start, emitting whenever that stays optimal.
  ViterbiResult out;
  out.score = best(0, 0);
  out.path.emission_frames.reserve(U);
  int t = 0;
  int u = 0;
  while (u < U) {
    const double emit = lattice.y(t, u) + best(t, u + 1);
    const double skip =
        t < T - 1 ? lattice.blank(t, u) + best(t + 1, u) : kLogZero;
    if (emit >= skip) {
      out.path.emission_frames.push_back(t);
      ++u;
    } else {
      ++t;
    }
  }
  return out;
}

std::vector<double> LogitGrads(const TokenizedUtterance& utt,
                               const LossResult& result) {
  utt.Validate();
  const int T = utt.num_frames;
  const int U = utt.num_tokens();
  const int V = utt.vocab_size;
  if (result.grad_y.rows() != T || result.grad_y.cols() != U ||
      result.grad_blank.rows() != T || result.grad_blank.cols() != U + 1) {
    throw std::invalid_argument("loss result does not match the utterance");
  }
  std::vector<double> grads(utt.logits.size(), 0.0);
  std::vector<double> probs(V);
  for (int t = 0; t < T; ++t) {
    for (int u = 0; u <= U; ++u) {
      const double g_emit = u < U ? result.grad_y(t, u) : 0.0;
      const double g_blank = result.grad_blank(t, u);
      if (g_emit == 0.0 && g_blank == 0.0) continue;
      const std::size_t base = utt.Index(t, u, 0);
      LogSoftmax(std::span<const double>(&utt.logits[base], V), probs);
      const double g_sum = g_emit + g_blank;
      for (int v = 0; v < V; ++v) {
        grads[base + v] = -g_sum * std::exp(probs[v]);
      }
      if (u < U) grads[base + utt.tokens[u]] += g_emit;
      grads[base + utt.blank_id] += g_blank;
    }
  }
  return grads;
}

void ConfigureThreadsFromEnv() {
  const char* env = std::getenv("LATTICELOSS_THREADS");
  if (env == nullptr || *env == '\0') return;
  char* end = nullptr;
  const long n = std::strtol(env, &end, 10);
  if (*end != '\0' || n < 1) {
    throw std::invalid_argument(std::string("LATTICELOSS_THREADS must be a "
                                            "positive integer, got '") +
                                env + "'");
  }
  SetNumThreads(static_cast<int>(n));
}

void SetNumThreads(int num_threads) {
  if (num_threads < 1) throw std::invalid_argument("thread count must be >= 1");
  omp_set_num_threads(num_threads);
}

int NumThreads() { return omp_get_max_threads(); }

}  // namespace latticeloss
