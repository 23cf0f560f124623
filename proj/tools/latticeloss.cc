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

// latticeloss: verify | sweep | train-toy | latency
//
// LATTICELOSS_THREADS caps the OpenMP thread count. Output bytes do not
// depend on it.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "latticeloss/experiments.h"
#include "latticeloss/latency_metrics.h"
#include "latticeloss/loss_core.h"

namespace {

using namespace latticeloss;

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void WriteFile(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << contents;
  if (!out.flush()) throw std::runtime_error("write failed: " + path);
}

// "8x4x6" -> T, U, V.
void ParseDims(const std::string& text, SweepConfig& config) {
  int t = 0, u = 0, v = 0;
  char tail = 0;
  if (std::sscanf(text.c_str(), "%dx%dx%d%c", &t, &u, &v, &tail) != 3) {
    throw std::invalid_argument("--dims expects TxUxV, got '" + text + "'");
  }
  config.num_frames = t;
  config.num_tokens = u;
  config.vocab_size = v;
}

int Verify(const VerifyOptions& options) {
  const VerifyReport report = RunVerify(options);
  std::cout << FormatVerifyReport(report);
  return report.passed() ? 0 : 1;
}

int Sweep(SweepConfig config, const std::string& dims,
          const std::string& out_path) {
  ParseDims(dims, config);
  WriteFile(out_path, FormatSweepCsv(RunSweep(config)));
  return 0;
}

int TrainToy(const ToyOptions& options, const std::string& out_path) {
  const ToyExperiment experiment = RunToyExperiment(options);
  WriteFile(out_path, FormatToyCsv(experiment));
  std::cout << FormatToyReport(experiment);
  return 0;
}

int Latency(const std::string& hyp_path, const std::string& ref_path,
            bool med_all) {
  const auto hyp = ParseTimestampFile(ReadFile(hyp_path));
  const auto ref = ParseTimestampFile(ReadFile(ref_path));
  const LatencyReport report =
      ComputeLatency(JoinTimestamps(hyp, ref), med_all);
  std::printf("MAD: %.3f ms\n", report.mad * 1000.0);
  std::printf("MED: %.3f ms (%zu utterances)\n", report.med * 1000.0,
              report.med_utterances);
  std::printf("matched words: %zu\n", report.matched_pairs);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Transducer loss with delay penalty: checks and experiments"};
  app.require_subcommand(1);

  VerifyOptions verify;
  auto* verify_cmd =
      app.add_subcommand("verify", "Oracle-vs-DP validation suite");
  verify_cmd->add_option("--corpus", verify.corpus_size, "Random lattices")
      ->capture_default_str();
  verify_cmd->add_option("--seed", verify.seed)->capture_default_str();
  verify_cmd->add_option("--perturb", verify.perturb,
                         "Offset added to DP outputs (negative control)");

  SweepConfig sweep;
  std::string dims = "8x4x6";
  std::string sweep_out;
  auto* sweep_cmd =
      app.add_subcommand("sweep", "Delay statistics across a lambda grid");
  sweep_cmd->add_option("--lambdas", sweep.lambdas, "Ascending, comma list")
      ->delimiter(',')
      ->capture_default_str();
  sweep_cmd->add_option("--dims", dims, "TxUxV")->capture_default_str();
  sweep_cmd->add_option("--trials", sweep.trials)->capture_default_str();
  sweep_cmd->add_option("--seed", sweep.seed)->capture_default_str();
  sweep_cmd->add_option("--out", sweep_out, "CSV output")->required();

  ToyOptions toy;
  std::string side = "nonblank";
  double fastemit = 0.0;
  std::string toy_out;
  auto* toy_cmd = app.add_subcommand(
      "train-toy", "Train the toy streaming model with and without penalty");
  toy_cmd
      ->add_option("--lambda", toy.lambdas,
                   "Penalty strengths, comma list; 0 is always included")
      ->delimiter(',')
      ->required();
  auto* fastemit_opt =
      toy_cmd->add_option("--fastemit", fastemit, "Also run FastEmit");
  toy_cmd->add_option("--side", side)
      ->check(CLI::IsMember({"nonblank", "blank"}))
      ->capture_default_str();
  toy_cmd->add_option("--epochs", toy.epochs)->capture_default_str();
  toy_cmd->add_option("--seeds", toy.seeds)->capture_default_str();
  toy_cmd->add_option("--seed", toy.seed)->capture_default_str();
  toy_cmd
      ->add_option("--lambda-scale", toy.lambda_scale,
                   "Multiplier from lattice-frame lambda to toy frames")
      ->capture_default_str();
  toy_cmd->add_option("--out", toy_out, "CSV output")->required();

  std::string hyp_path, ref_path;
  bool med_all = false;
  auto* latency_cmd =
      app.add_subcommand("latency", "MAD and MED from timestamp files");
  latency_cmd->add_option("--hyp", hyp_path)->required();
  latency_cmd->add_option("--ref", ref_path)->required();
  latency_cmd->add_flag("--med-all", med_all,
                        "MED over every utterance, matched or not");

  CLI11_PARSE(app, argc, argv);

  try {
    ConfigureThreadsFromEnv();
    if (*verify_cmd) return Verify(verify);
    if (*sweep_cmd) return Sweep(sweep, dims, sweep_out);
    if (*toy_cmd) {
      if (*fastemit_opt) toy.fastemit = fastemit;
      toy.side = side == "blank" ? PenaltySide::kBlank : PenaltySide::kNonBlank;
      return TrainToy(toy, toy_out);
    }
    if (*latency_cmd) return Latency(hyp_path, ref_path, med_all);
  } catch (const std::exception& e) {
    std::cerr << "latticeloss: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
