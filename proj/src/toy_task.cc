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

#include "latticeloss/toy_task.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "latticeloss/loss_core.h"

namespace latticeloss::toy {

Utterance GenerateUtterance(const TaskConfig& config, Rng& rng) {
  if (config.num_pairs < 1 || config.min_tokens < 0 ||
      config.max_tokens < config.min_tokens || config.evidence_frames < 1 ||
      config.ambiguous_frames < 0 ||
      config.ambiguous_frames >= config.evidence_frames ||
      config.min_gap < 0 || config.max_gap < config.min_gap) {
    throw std::invalid_argument("inconsistent toy task configuration");
  }
  Utterance utt;
  utt.feature_dim = config.feature_dim();
  const int num_tokens = rng.UniformInt(config.min_tokens, config.max_tokens);
  const int num_ids = 2 * config.num_pairs;
  int t = rng.UniformInt(config.min_gap, config.max_gap);
  for (int u = 0; u < num_tokens; ++u) {
    int token = rng.UniformInt(1, num_ids);
    while (u > 0 && token == utt.tokens.back()) {
      token = rng.UniformInt(1, num_ids);
    }
    utt.tokens.push_back(token);
    utt.onsets.push_back(t);
    t += config.evidence_frames + rng.UniformInt(config.min_gap, config.max_gap);
  }
  utt.num_frames = std::max(t, 1);
  const int D = utt.feature_dim;
  utt.features.resize(static_cast<std::size_t>(utt.num_frames) * D);
  for (int f = 0; f < utt.num_frames; ++f) {
    double* row = &utt.features[static_cast<std::size_t>(f) * D];
    row[0] = 1.0;
    for (int d = 1; d < D; ++d) row[d] = config.noise * rng.Normal();
  }
  for (int u = 0; u < num_tokens; ++u) {
    const int token = utt.tokens[u];
    const int pair_channel = 1 + (token - 1) / 2;
    const int id_channel = 1 + config.num_pairs + (token - 1);
    for (int k = 0; k < config.evidence_frames; ++k) {
      double* row =
          &utt.features[static_cast<std::size_t>(utt.onsets[u] + k) * D];
      row[pair_channel] += 1.0;
      if (k >= config.ambiguous_frames) {
        // Identity evidence builds up over the rest of the span.
        row[id_channel] +=
            config.ramp_identity
                ? static_cast<double>(k - config.ambiguous_frames + 1) /
                      (config.evidence_frames - config.ambiguous_frames)
                : 1.0;
      }
    }
  }
  return utt;
}

Model::Model(int feature_dim, int vocab_size, int window)
    : feature_dim_(feature_dim),
      vocab_size_(vocab_size),
      window_(window),
      bias_offset_(static_cast<std::size_t>(vocab_size) * window *
                   feature_dim) {
  if (feature_dim < 1 || vocab_size < 2 || window < 1) {
    throw std::invalid_argument("bad toy model dimensions");
  }
  params_.assign(bias_offset_ + static_cast<std::size_t>(vocab_size) *
                                    vocab_size,
                 0.0);
}

TokenizedUtterance Model::Logits(const Utterance& utt) const {
  const int T = utt.num_frames;
  const int U = static_cast<int>(utt.tokens.size());
  const int V = vocab_size_;
  TokenizedUtterance out;
  out.num_frames = T;
  out.vocab_size = V;
  out.blank_id = 0;
  out.tokens = utt.tokens;
  out.logits.assign(static_cast<std::size_t>(T) * (U + 1) * V, 0.0);
  std::vector<double> acoustic(V);
  for (int t = 0; t < T; ++t) {
    for (int v = 0; v < V; ++v) {
      double sum = 0.0;
      for (int lag = 0; lag < window_; ++lag) {
        if (lag > t) {
          // Before the first frame the window sees silence: bias channel only.
          sum += params_[WeightIndex(v, lag, 0)];
          continue;
        }
        const auto feat = utt.frame(t - lag);
        for (int d = 0; d < feature_dim_; ++d) {
          sum += params_[WeightIndex(v, lag, d)] * feat[d];
        }
      }
      acoustic[v] = sum;
    }
    for (int u = 0; u <= U; ++u) {
      const int prev = u == 0 ? 0 : utt.tokens[u - 1];
      for (int v = 0; v < V; ++v) {
        out.logits[out.Index(t, u, v)] = acoustic[v] + params_[BiasIndex(prev, v)];
      }
    }
  }
  return out;
}

void Model::AccumulateGrad(const Utterance& utt,
                           std::span<const double> logit_grad,
                           std::span<double> param_grad) const {
  const int T = utt.num_frames;
  const int U = static_cast<int>(utt.tokens.size());
  const int V = vocab_size_;
  std::vector<double> frame_grad(V);
  for (int t = 0; t < T; ++t) {
    std::fill(frame_grad.begin(), frame_grad.end(), 0.0);
    for (int u = 0; u <= U; ++u) {
      const int prev = u == 0 ? 0 : utt.tokens[u - 1];
      const std::size_t base =
          (static_cast<std::size_t>(t) * (U + 1) + u) * V;
      for (int v = 0; v < V; ++v) {
        frame_grad[v] += logit_grad[base + v];
        param_grad[BiasIndex(prev, v)] += logit_grad[base + v];
      }
    }
    for (int v = 0; v < V; ++v) {
      if (frame_grad[v] == 0.0) continue;
      for (int lag = 0; lag < window_; ++lag) {
        if (lag > t) {
          param_grad[WeightIndex(v, lag, 0)] += frame_grad[v];
          continue;
        }
        const auto feat = utt.frame(t - lag);
        for (int d = 0; d < feature_dim_; ++d) {
          param_grad[WeightIndex(v, lag, d)] += frame_grad[v] * feat[d];
        }
      }
    }
  }
}

namespace {

LossResult RegularizedLoss(const Lattice& lattice, const RunSpec& spec,
                           bool active) {
  if (!active || spec.lambda == 0.0) return LossAndGrad(lattice);
  if (spec.method == Method::kFastEmit) {
    return FastEmitLossAndGrad(lattice, spec.lambda);
  }
  return PenalizedLossAndGrad(lattice, {spec.lambda, spec.side, true});
}

// Non-finite logits mean the parameters have blown up.
void CheckFinite(const TokenizedUtterance& logits, int epoch) {
  for (double x : logits.logits) {
    if (!std::isfinite(x)) {
      throw std::runtime_error(
          "toy training diverged (non-finite logits) at epoch " +
          std::to_string(epoch) + "; lower the learning rate");
    }
  }
}

void Evaluate(const Model& model, const std::vector<Utterance>& heldout,
              EpochStats& stats) {
  double loss = 0.0;
  double delay = 0.0;
  std::size_t tokens = 0;
  for (const Utterance& utt : heldout) {
    const TokenizedUtterance logits = model.Logits(utt);
    CheckFinite(logits, stats.epoch);
    const Lattice lattice = LatticeFromLogits(logits);
    loss += -Forward(lattice).total;
    const ViterbiResult best = Viterbi(lattice);
    for (std::size_t u = 0; u < utt.tokens.size(); ++u) {
      delay += best.path.emission_frames[u] - utt.onsets[u];
      ++tokens;
    }
  }
  stats.heldout_loss = loss / static_cast<double>(heldout.size());
  stats.mean_delay = tokens > 0 ? delay / static_cast<double>(tokens) : 0.0;
}

}  // namespace

RunResult TrainRun(const TrainConfig& config, const RunSpec& spec,
                   int seed_index) {
  if (config.train_size < 1 || config.heldout_size < 1 ||
      config.batch_size < 1 || config.epochs < 1 || config.warmup_epochs < 0) {
    throw std::invalid_argument("bad toy training configuration");
  }
  const std::uint64_t data_seed = DeriveSeed(config.seed, seed_index);
  Rng data_rng(data_seed);
  std::vector<Utterance> train;
  std::vector<Utterance> heldout;
  for (int i = 0; i < config.train_size; ++i) {
    train.push_back(GenerateUtterance(config.task, data_rng));
  }
  for (int i = 0; i < config.heldout_size; ++i) {
    heldout.push_back(GenerateUtterance(config.task, data_rng));
  }

  Model model(config.task.feature_dim(), config.task.vocab_size(),
              config.window);
  std::vector<double> grad(model.params().size());

  RunResult result{spec, seed_index, {}};
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    const bool active = epoch > config.warmup_epochs;
    double epoch_loss = 0.0;
    // Minibatches in a fixed cyclic order.
    for (std::size_t start = 0; start < train.size();
         start += config.batch_size) {
      const std::size_t end = std::min(
          train.size(), start + static_cast<std::size_t>(config.batch_size));
      std::fill(grad.begin(), grad.end(), 0.0);
      for (std::size_t k = start; k < end; ++k) {
        const Utterance& utt = train[k];
        const TokenizedUtterance logits = model.Logits(utt);
        CheckFinite(logits, epoch);
        const LossResult loss =
            RegularizedLoss(LatticeFromLogits(logits), spec, active);
        if (!std::isfinite(loss.loss)) {
          throw std::runtime_error(
              "toy training diverged (non-finite loss) at epoch " +
              std::to_string(epoch) + "; lower the learning rate");
        }
        epoch_loss += loss.loss;
        model.AccumulateGrad(utt, LogitGrads(logits, loss), grad);
      }
      const double step =
          config.learning_rate / static_cast<double>(end - start);
      auto params = model.params();
      for (std::size_t p = 0; p < params.size(); ++p) params[p] -= step * grad[p];
    }
    EpochStats stats;
    stats.epoch = epoch;
    stats.train_loss = epoch_loss / static_cast<double>(train.size());
    Evaluate(model, heldout, stats);
    if (!std::isfinite(stats.heldout_loss)) {
      throw std::runtime_error("toy training diverged on held-out data");
    }
    result.epochs.push_back(stats);
  }
  return result;
}

std::vector<RunResult> TrainAll(const TrainConfig& config,
                                const std::vector<RunSpec>& specs,
                                int num_seeds) {
  if (num_seeds < 1) throw std::invalid_argument("need at least one seed");
  const long jobs = static_cast<long>(specs.size()) * num_seeds;
  std::vector<RunResult> results(jobs);
  std::vector<std::string> errors(jobs);
#pragma omp parallel for schedule(dynamic)
  for (long j = 0; j < jobs; ++j) {
    try {
      results[j] = TrainRun(config, specs[j / num_seeds],
                            static_cast<int>(j % num_seeds));
    } catch (const std::exception& e) {
      errors[j] = e.what();
    }
  }
  for (const auto& error : errors) {
    if (!error.empty()) throw std::runtime_error(error);
  }
  return results;
}

std::vector<EpochStats> AverageOverSeeds(const std::vector<RunResult>& runs,
                                         const RunSpec& spec) {
  std::vector<EpochStats> mean;
  int count = 0;
  for (const RunResult& run : runs) {
    if (run.spec.method != spec.method || run.spec.lambda != spec.lambda ||
        run.spec.side != spec.side) {
      continue;
    }
    if (mean.empty()) mean.resize(run.epochs.size());
    for (std::size_t e = 0; e < run.epochs.size(); ++e) {
      mean[e].epoch = run.epochs[e].epoch;
      mean[e].train_loss += run.epochs[e].train_loss;
      mean[e].heldout_loss += run.epochs[e].heldout_loss;
      mean[e].mean_delay += run.epochs[e].mean_delay;
    }
    ++count;
  }
  for (EpochStats& s : mean) {
    s.train_loss /= count;
    s.heldout_loss /= count;
    s.mean_delay /= count;
  }
  return mean;
}

}  // namespace latticeloss::toy
