// Copyright 2026 The fedgnn Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef FEDGNN_TOOLS_CLI_H_
#define FEDGNN_TOOLS_CLI_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "config.h"
#include "fedgnn/attack.h"
#include "fedgnn/graph.h"
#include "fedgnn/model.h"

namespace fedgnn::cli {

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitRuntime = 2;

// Entry point shared by the binary and the tests. Errors are reported as a
// single JSON line on `err`.
int RunCli(int argc, const char* const* argv, std::ostream& out,
           std::ostream& err);

// Graph for one run: the CSV pair, or the generator spec seeded with
// `run_seed` unless the config pins gen.seed.
PartitionedGraph LoadGraph(const ExperimentConfig& config,
                           std::uint64_t run_seed);

ModelConfig ModelFor(const ExperimentConfig& config,
                     const PartitionedGraph& graph);

struct RunSummary {
  std::string variant;
  std::uint64_t seed = 0;
  int rounds = 0;
  double final_macro_f1 = 0.0;
  double final_grad_norm_sq = 0.0;
  std::uint64_t bytes_up = 0;
  std::uint64_t bytes_down = 0;
  std::uint64_t emb_released = 0;
};

// Runs one seed of `config` and writes metrics.csv, comm.csv, config.txt,
// privacy_report.csv and the checkpoint(s) into `dir`.
RunSummary TrainOnce(const ExperimentConfig& config, std::uint64_t seed,
                     const std::filesystem::path& dir);

struct AttackOptions {
  int targets = 5;
  std::vector<int> fanouts = {3, 10};
  AttackConfig attack;
};

struct AttackRow {
  std::uint64_t seed = 0;
  NodeId target = 0;
  int fanout = 0;
  AttackResult result;
};

// For every fanout, samples the target's neighborhood with that fanout at
// each hop, observes its final embedding under `params` and reconstructs
// its features. Targets are drawn from nodes with degree >= the largest
// fanout, so each fanout is actually attained. Initialization is the mean
// feature vector of all other nodes.
std::vector<AttackRow> RunAttacks(const PartitionedGraph& graph,
                                  const ModelParams& params,
                                  const AttackOptions& options,
                                  std::uint64_t seed);

// Median of `values`; averages the two middle elements for even sizes.
double Median(std::vector<double> values);

}  // namespace fedgnn::cli

#endif  // FEDGNN_TOOLS_CLI_H_
