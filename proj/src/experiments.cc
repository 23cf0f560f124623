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

#include "latticeloss/experiments.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "latticeloss/alignment.h"
#include "latticeloss/loss_core.h"
#include "latticeloss/oracle.h"
#include "latticeloss/random.h"

namespace latticeloss {
namespace {

constexpr double kLossTol = 1e-10;
constexpr double kGradTol = 1e-9;
constexpr double kFdStep = 1e-5;
constexpr double kFdRelTol = 1e-6;
// Relative error denominators never drop below this, so that near-zero
// occupations are judged on absolute error.
constexpr double kFdFloor = 1e-3;
constexpr int kFdLattices = 20;
constexpr int kFdProbes = 20;
constexpr double kIdentityTol = 1e-12;
constexpr double kCenterGradTol = 1e-10;
constexpr double kCenterLossTol = 1e-12;
constexpr double kMonotoneSlack = 1e-12;
constexpr std::size_t kSweepEnumerationLimit = 100'000;

const double kApproxLambdas[] = {1e-3, 1e-2};
const double kMonotoneGrid[] = {0.0, 0.0015, 0.0030, 0.0060,
                                0.0075, 0.0100, 0.05, 0.1};
const double kCenterLambdas[] = {1e-3, 1e-2, 0.1};

double MaxAbsDiff(const Grid& a, const Grid& b) {
  double worst = 0.0;
  const auto av = a.values();
  const auto bv = b.values();
  for (std::size_t i = 0; i < av.size(); ++i) {
    worst = std::max(worst, std::abs(av[i] - bv[i]));
  }
  return worst;
}

double MaxAbsDiff(const std::vector<double>& a, const std::vector<double>& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    worst = std::max(worst, std::abs(a[i] - b[i]));
  }
  return worst;
}

void AddTo(Grid& grid, double delta) {
  for (int r = 0; r < grid.rows(); ++r) {
    for (int c = 0; c < grid.cols(); ++c) grid(r, c) += delta;
  }
}

// The dynamic-programming outputs under test, with the negative-control
// offset applied.
LossResult TestedLoss(const LossResult& result, double perturb) {
  LossResult out = result;
  if (perturb != 0.0) {
    out.loss += perturb;
    AddTo(out.grad_y, perturb);
    AddTo(out.grad_blank, perturb);
  }
  return out;
}

Lattice WithEntry(const Lattice& lattice, bool is_y, int t, int u,
                  double delta) {
  Grid y = lattice.y_grid();
  Grid blank = lattice.blank_grid();
  (is_y ? y : blank)(t, u) += delta;
  const auto yv = y.values();
  const auto bv = blank.values();
  return Lattice(lattice.num_frames(), lattice.num_tokens(),
                 {yv.begin(), yv.end()}, {bv.begin(), bv.end()},
                 lattice.normalized());
}

CheckResult MakeCheck(std::string name, double value, double tolerance,
                      std::string detail = "") {
  return {std::move(name), value, tolerance, value <= tolerance,
          std::move(detail)};
}

std::string Sci(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3e", value);
  return buf;
}

}  // namespace

bool VerifyReport::passed() const {
  return !checks.empty() &&
         std::all_of(checks.begin(), checks.end(),
                     [](const CheckResult& c) { return c.passed; });
}

const CheckResult* VerifyReport::Find(const std::string& name) const {
  for (const CheckResult& c : checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

VerifyReport RunVerify(const VerifyOptions& options) {
  if (options.corpus_size == 0) {
    throw std::invalid_argument("verification corpus is empty");
  }
  if (!std::isfinite(options.perturb)) {
    throw std::invalid_argument("perturbation must be finite");
  }
  const double eps = options.perturb;
  const std::vector<Lattice> corpus =
      RandomCorpus(options.seed, options.corpus_size, 6, 4, -5.0, 0.0);

  double loss_err = 0.0, grad_err = 0.0, beta_err = 0.0;
  double viterbi_err = 0.0;
  int viterbi_path_mismatches = 0;
  double fd_err = 0.0;
  int fd_probes = 0;
  double identity_err = 0.0, penalized_dp_err = 0.0;
  double bound_ratio[2] = {0.0, 0.0};
  double gap[2] = {0.0, 0.0}, half_gap[2] = {0.0, 0.0};
  int monotone_violations = 0;
  double monotone_worst = 0.0;
  double center_grad_err = 0.0, center_loss_err = 0.0;
  double sum_err = 0.0;
  double blank_invariance_err = 0.0, blank_vs_nonblank = 0.0;

  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const Lattice& lat = corpus[i];
    const int T = lat.num_frames();
    const int U = lat.num_tokens();

    const LossResult dp = TestedLoss(LossAndGrad(lat), eps);
    const double total = -dp.loss;
    loss_err = std::max(loss_err, std::abs(total - oracle::OracleLoss(lat)));
    const oracle::OracleGrads og = oracle::OracleGrad(lat);
    grad_err = std::max({grad_err, MaxAbsDiff(dp.grad_y, og.grad_y),
                         MaxAbsDiff(dp.grad_blank, og.grad_blank)});
    beta_err = std::max(
        beta_err, std::abs(Backward(lat)(0, 0) + eps - Forward(lat).total));

    // Viterbi against the brute-force argmax; the first maximum in
    // lexicographic order is the earliest-emitting one.
    const oracle::WeightsAndDelay plain = oracle::OracleWeightsAndDavg(lat);
    std::size_t best = 0;
    for (std::size_t p = 1; p < plain.scores.size(); ++p) {
      if (plain.scores[p] > plain.scores[best]) best = p;
    }
    const ViterbiResult vit = Viterbi(lat);
    viterbi_err = std::max(viterbi_err,
                           std::abs(vit.score + eps - plain.scores[best]));
    if (vit.path != plain.paths[best]) ++viterbi_path_mismatches;

    if (i < static_cast<std::size_t>(kFdLattices)) {
      Rng rng(DeriveSeed(DeriveSeed(options.seed, 0xfdULL), i));
      // Live entries: all of y, and blank except the dead (T-1, u < U).
      const int num_y = T * U;
      const int num_blank = (T - 1) * (U + 1) + 1;
      for (int probe = 0; probe < kFdProbes; ++probe) {
        const int k = rng.UniformInt(0, num_y + num_blank - 1);
        const bool is_y = k < num_y;
        int t, u;
        if (is_y) {
          t = k / U;
          u = k % U;
        } else if (k - num_y < (T - 1) * (U + 1)) {
          t = (k - num_y) / (U + 1);
          u = (k - num_y) % (U + 1);
        } else {
          t = T - 1;
          u = U;
        }
        const double plus = -Forward(WithEntry(lat, is_y, t, u, kFdStep)).total;
        const double minus =
            -Forward(WithEntry(lat, is_y, t, u, -kFdStep)).total;
        const double numeric = (plus - minus) / (2.0 * kFdStep);
        const double analytic = is_y ? dp.grad_y(t, u) : dp.grad_blank(t, u);
        const double denom =
            std::max({std::abs(analytic), std::abs(numeric), kFdFloor});
        fd_err = std::max(fd_err, std::abs(analytic - numeric) / denom);
        ++fd_probes;
      }
    }

    for (int l = 0; l < 2; ++l) {
      const double lambda = kApproxLambdas[l];
      const PenaltyConfig cfg{lambda, PenaltySide::kNonBlank, true};
      const Lattice penalized = ApplyPenalty(lat, cfg);
      const oracle::RegularizedObjective obj =
          oracle::OracleDelayRegularizedObjective(lat, lambda);
      const oracle::WeightsAndDelay pw =
          oracle::OracleWeightsAndDavg(penalized);
      identity_err =
          std::max(identity_err, MaxAbsDiff(pw.weights, obj.approx_grads));

      const LossResult pdp = TestedLoss(PenalizedLossAndGrad(lat, cfg), eps);
      const oracle::OracleGrads pog = oracle::OracleGrad(penalized);
      penalized_dp_err =
          std::max({penalized_dp_err, MaxAbsDiff(pdp.grad_y, pog.grad_y),
                    MaxAbsDiff(pdp.grad_blank, pog.grad_blank)});

      double spread = 0.0;
      for (double d : obj.delay_scores) {
        spread = std::max(spread, std::abs(d - obj.d_avg));
      }
      const double g = MaxAbsDiff(obj.exact_grads, obj.approx_grads);
      const double bound = 2.0 * lambda * lambda * spread * spread;
      if (bound > 0.0) {
        bound_ratio[l] = std::max(bound_ratio[l], g / bound);
      } else if (g > kIdentityTol) {
        bound_ratio[l] = std::max(bound_ratio[l], 2.0);
      }
      gap[l] = std::max(gap[l], g);
      const oracle::RegularizedObjective half =
          oracle::OracleDelayRegularizedObjective(lat, 0.5 * lambda);
      half_gap[l] =
          std::max(half_gap[l], MaxAbsDiff(half.exact_grads, half.approx_grads));
    }

    double previous = 0.0;
    for (std::size_t k = 0; k < std::size(kMonotoneGrid); ++k) {
      const double d_avg =
          oracle::OracleWeightsAndDavg(
              ApplyPenalty(lat, {kMonotoneGrid[k], PenaltySide::kNonBlank,
                                 true}))
              .d_avg;
      if (k > 0 && d_avg < previous - kMonotoneSlack) {
        ++monotone_violations;
        monotone_worst = std::max(monotone_worst, previous - d_avg);
      }
      previous = d_avg;
    }

    for (double lambda : kCenterLambdas) {
      const LossResult c = TestedLoss(
          PenalizedLossAndGrad(lat, {lambda, PenaltySide::kNonBlank, true}),
          eps);
      const LossResult n = TestedLoss(
          PenalizedLossAndGrad(lat, {lambda, PenaltySide::kNonBlank, false}),
          eps);
      center_grad_err =
          std::max({center_grad_err, MaxAbsDiff(c.grad_y, n.grad_y),
                    MaxAbsDiff(c.grad_blank, n.grad_blank)});
      const double expected = lambda * U * (T - 1) / 2.0;
      center_loss_err =
          std::max(center_loss_err, std::abs((n.loss - c.loss) - expected));

      const oracle::RegularizedObjective obj =
          oracle::OracleDelayRegularizedObjective(lat, lambda);
      double sum = 0.0;
      for (double g : obj.exact_grads) sum += g;
      sum_err = std::max(sum_err, std::abs(sum - 1.0));

      const oracle::WeightsAndDelay wb = oracle::OracleWeightsAndDavg(
          ApplyPenalty(lat, {lambda, PenaltySide::kBlank, true}));
      const oracle::WeightsAndDelay wn = oracle::OracleWeightsAndDavg(
          ApplyPenalty(lat, {lambda, PenaltySide::kNonBlank, true}));
      blank_invariance_err =
          std::max(blank_invariance_err, MaxAbsDiff(wb.weights, plain.weights));
      blank_vs_nonblank =
          std::max(blank_vs_nonblank, MaxAbsDiff(wb.weights, wn.weights));
    }
  }

  VerifyReport report;
  auto& checks = report.checks;
  checks.push_back(MakeCheck("loss_vs_oracle", loss_err, kLossTol));
  checks.push_back(MakeCheck("grad_vs_oracle", grad_err, kGradTol));
  checks.push_back(MakeCheck("backward_total", beta_err, kLossTol));
  {
    CheckResult c = MakeCheck(
        "viterbi_vs_argmax", viterbi_err, kIdentityTol,
        std::to_string(viterbi_path_mismatches) + " path mismatches");
    c.passed = c.passed && viterbi_path_mismatches == 0;
    checks.push_back(c);
  }
  checks.push_back(MakeCheck(
      "finite_difference", fd_err, kFdRelTol,
      std::to_string(fd_probes) + " probes, step " + Sci(kFdStep) +
          ", relative error floor " + Sci(kFdFloor)));
  checks.push_back(MakeCheck("penalized_weight_identity", identity_err,
                             kIdentityTol, "lambda in {1e-3, 1e-2}"));
  checks.push_back(
      MakeCheck("penalized_grad_vs_oracle", penalized_dp_err, kGradTol));
  for (int l = 0; l < 2; ++l) {
    const std::string tag = l == 0 ? "1e-3" : "1e-2";
    checks.push_back(MakeCheck(
        "approx_gap_bound@" + tag, bound_ratio[l], 1.0,
        "max gap / (2 lambda^2 max|d - d_avg|^2); max gap " + Sci(gap[l])));
    const double ratio = half_gap[l] > 0.0 ? gap[l] / half_gap[l] : 0.0;
    CheckResult c = MakeCheck("approx_gap_halving@" + tag, ratio, 4.5,
                              "required in [3.5, 4.5]");
    c.passed = ratio >= 3.5 && ratio <= 4.5;
    checks.push_back(c);
  }
  checks.push_back(MakeCheck(
      "d_avg_monotone", monotone_violations, 0.0,
      "violations over the grid 0..0.1; worst drop " + Sci(monotone_worst)));
  checks.push_back(
      MakeCheck("centering_grad", center_grad_err, kCenterGradTol));
  checks.push_back(
      MakeCheck("centering_loss_offset", center_loss_err, kCenterLossTol));
  checks.push_back(MakeCheck("exact_grad_sum", sum_err, kIdentityTol));
  checks.push_back(MakeCheck(
      "blank_side_invariance", blank_invariance_err, kIdentityTol,
      "blank-side weights vs unpenalized; vs non-blank side differs by " +
          Sci(blank_vs_nonblank)));
  return report;
}

std::string FormatVerifyReport(const VerifyReport& report) {
  std::string out;
  char line[256];
  for (const CheckResult& c : report.checks) {
    std::snprintf(line, sizeof(line), "%-4s %-28s %.3e (tol %.1e)",
                  c.passed ? "ok" : "FAIL", c.name.c_str(), c.value,
                  c.tolerance);
    out += line;
    if (!c.detail.empty()) out += "  " + c.detail;
    out += '\n';
  }
  out += report.passed() ? "verify: all checks passed\n"
                         : "verify: FAILED\n";
  return out;
}

std::vector<SweepRow> RunSweep(const SweepConfig& config) {
  if (config.lambdas.empty()) throw std::invalid_argument("no lambdas given");
  for (std::size_t k = 0; k < config.lambdas.size(); ++k) {
    const double lambda = config.lambdas[k];
    if (!std::isfinite(lambda) || lambda < 0.0) {
      throw std::invalid_argument("lambdas must be finite and non-negative");
    }
    if (k > 0 && lambda < config.lambdas[k - 1]) {
      throw std::invalid_argument("lambdas must be sorted ascending");
    }
  }
  if (config.trials < 1) throw std::invalid_argument("need at least one trial");
  if (config.num_frames < 1 || config.num_tokens < 0 || config.vocab_size < 2) {
    throw std::invalid_argument("bad sweep dimensions");
  }
  const bool enumerate = oracle::NumPaths(config.num_frames,
                                          config.num_tokens) <=
                         kSweepEnumerationLimit;
  const int num_lambdas = static_cast<int>(config.lambdas.size());
  std::vector<SweepRow> rows(static_cast<std::size_t>(num_lambdas) *
                             config.trials);
#pragma omp parallel for schedule(dynamic)
  for (int trial = 0; trial < config.trials; ++trial) {
    Rng rng(DeriveSeed(config.seed, static_cast<std::uint64_t>(trial)));
    const Lattice lat = LatticeFromLogits(
        RandomUtterance(rng, config.num_frames, config.num_tokens,
                        config.vocab_size, 2.0));
    for (int k = 0; k < num_lambdas; ++k) {
      const double lambda = config.lambdas[k];
      const Lattice penalized =
          ApplyPenalty(lat, {lambda, PenaltySide::kNonBlank, true});
      SweepRow& row = rows[static_cast<std::size_t>(k) * config.trials + trial];
      row.lambda = lambda;
      row.trial = trial;
      row.d_avg = enumerate ? oracle::OracleWeightsAndDavg(penalized).d_avg
                            : ExpectedDelayScore(penalized);
      const ViterbiResult best = Viterbi(penalized);
      row.viterbi_delay = DelayScore(best.path, config.num_frames);
      row.loss = -PathScore(lat, best.path);
    }
  }
  return rows;
}

std::string FormatSweepCsv(const std::vector<SweepRow>& rows) {
  std::string out = "# latticeloss-sweep v1\nlambda,trial,d_avg,viterbi_delay,loss\n";
  for (const SweepRow& r : rows) {
    out += FormatDouble(r.lambda) + ',' + std::to_string(r.trial) + ',' +
           FormatDouble(r.d_avg) + ',' + FormatDouble(r.viterbi_delay) + ',' +
           FormatDouble(r.loss) + '\n';
  }
  return out;
}

TrendCounts LastHalfTrend(const std::vector<toy::EpochStats>& curve) {
  TrendCounts counts;
  for (std::size_t i = curve.size() / 2 + 1; i < curve.size(); ++i) {
    if (curve[i].mean_delay > curve[i - 1].mean_delay) ++counts.rises;
    if (curve[i].mean_delay < curve[i - 1].mean_delay) ++counts.falls;
  }
  return counts;
}

ToyExperiment RunToyExperiment(const ToyOptions& options) {
  if (!std::isfinite(options.lambda_scale) || options.lambda_scale <= 0.0) {
    throw std::invalid_argument("lambda scale must be positive");
  }
  if (options.epochs < 2) throw std::invalid_argument("need at least 2 epochs");
  if (options.seeds < 1) throw std::invalid_argument("need at least one seed");
  std::vector<double> lambdas;
  for (double lambda : options.lambdas) {
    if (!std::isfinite(lambda) || lambda < 0.0) {
      throw std::invalid_argument("lambdas must be finite and non-negative");
    }
    if (lambda > 0.0) lambdas.push_back(lambda);
  }
  std::sort(lambdas.begin(), lambdas.end());
  lambdas.erase(std::unique(lambdas.begin(), lambdas.end()), lambdas.end());
  if (options.fastemit &&
      (!std::isfinite(*options.fastemit) || *options.fastemit < 0.0)) {
    throw std::invalid_argument("FastEmit lambda must be non-negative");
  }

  ToyExperiment experiment;
  toy::TrainConfig& config = experiment.config;
  config.epochs = options.epochs;
  config.warmup_epochs = options.epochs / 2;
  config.seed = options.seed;

  std::vector<toy::RunSpec> specs;
  std::vector<double> user_lambdas;
  specs.push_back({toy::Method::kDelayPenalty, 0.0, options.side});
  user_lambdas.push_back(0.0);
  for (double lambda : lambdas) {
    specs.push_back({toy::Method::kDelayPenalty, lambda * options.lambda_scale,
                     options.side});
    user_lambdas.push_back(lambda);
  }
  if (options.fastemit) {
    specs.push_back({toy::Method::kFastEmit, *options.fastemit, options.side});
    user_lambdas.push_back(*options.fastemit);
  }

  experiment.runs = toy::TrainAll(config, specs, options.seeds);
  for (std::size_t s = 0; s < specs.size(); ++s) {
    ToySummary summary;
    summary.spec = specs[s];
    summary.user_lambda = user_lambdas[s];
    summary.mean_curve = toy::AverageOverSeeds(experiment.runs, specs[s]);
    summary.final_delay = summary.mean_curve.back().mean_delay;
    summary.final_heldout = summary.mean_curve.back().heldout_loss;
    const TrendCounts trend = LastHalfTrend(summary.mean_curve);
    summary.delay_rises = trend.rises;
    summary.delay_falls = trend.falls;
    experiment.summaries.push_back(std::move(summary));
  }
  return experiment;
}

namespace {

const char* MethodName(toy::Method method) {
  return method == toy::Method::kFastEmit ? "fastemit" : "penalty";
}

std::string ToyRow(const ToySummary& s, const std::string& seed,
                   const toy::EpochStats& e) {
  return std::string(MethodName(s.spec.method)) + ',' +
         FormatDouble(s.user_lambda) + ',' + FormatDouble(s.spec.lambda) +
         ',' + seed + ',' + std::to_string(e.epoch) + ',' +
         FormatDouble(e.train_loss) + ',' + FormatDouble(e.heldout_loss) +
         ',' + FormatDouble(e.mean_delay) + '\n';
}

}  // namespace

std::string FormatToyCsv(const ToyExperiment& experiment) {
  std::string out =
      "# latticeloss-train v1\n"
      "method,lambda,toy_lambda,seed,epoch,train_loss,heldout_loss,"
      "mean_delay\n";
  for (const ToySummary& s : experiment.summaries) {
    for (const toy::RunResult& run : experiment.runs) {
      if (run.spec.method != s.spec.method || run.spec.lambda != s.spec.lambda) {
        continue;
      }
      for (const toy::EpochStats& e : run.epochs) {
        out += ToyRow(s, std::to_string(run.seed_index), e);
      }
    }
  }
  for (const ToySummary& s : experiment.summaries) {
    for (const toy::EpochStats& e : s.mean_curve) out += ToyRow(s, "mean", e);
  }
  return out;
}

std::string FormatToyReport(const ToyExperiment& experiment) {
  std::string out;
  char line[256];
  std::snprintf(line, sizeof(line),
                "%d epochs (regularizer from epoch %d), %d training and %d "
                "held-out utterances per seed\n",
                experiment.config.epochs, experiment.config.warmup_epochs + 1,
                experiment.config.train_size, experiment.config.heldout_size);
  out += line;
  std::snprintf(line, sizeof(line), "%-9s %10s %10s %12s %14s %s\n", "method",
                "lambda", "toy_lambda", "final_delay", "final_heldout",
                "last-half rises/falls");
  out += line;
  for (const ToySummary& s : experiment.summaries) {
    std::snprintf(line, sizeof(line), "%-9s %10.4g %10.4g %12.4f %14.4f %d/%d\n",
                  MethodName(s.spec.method), s.user_lambda, s.spec.lambda,
                  s.final_delay, s.final_heldout, s.delay_rises, s.delay_falls);
    out += line;
  }
  const ToySummary& base = experiment.summaries.front();
  const ToySummary* top = nullptr;
  for (const ToySummary& s : experiment.summaries) {
    if (s.spec.method == toy::Method::kDelayPenalty && s.spec.lambda > 0.0) {
      top = &s;
    }
  }
  if (top != nullptr) {
    std::snprintf(line, sizeof(line),
                  "largest penalty vs none: delay %+.4f frames, held-out loss "
                  "%+.4f\n",
                  top->final_delay - base.final_delay,
                  top->final_heldout - base.final_heldout);
    out += line;
  }
  for (const ToySummary& s : experiment.summaries) {
    if (s.spec.method != toy::Method::kFastEmit) continue;
    std::snprintf(line, sizeof(line),
                  "fastemit %.4g vs none: delay %+.4f frames, held-out loss "
                  "%+.4f\n",
                  s.user_lambda, s.final_delay - base.final_delay,
                  s.final_heldout - base.final_heldout);
    out += line;
  }
  return out;
}

std::string FormatDouble(double value) {
  char buf[64];
  const auto result = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, result.ptr);
}

}  // namespace latticeloss
