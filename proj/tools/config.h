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

// Flat key=value experiment configuration for the `train` and `attack`
// subcommands.

#ifndef FEDGNN_TOOLS_CONFIG_H_
#define FEDGNN_TOOLS_CONFIG_H_

#include <filesystem>
#include <iterator>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fedgnn/datagen.h"
#include "fedgnn/fed_sim.h"
#include "fedgnn/model.h"
#include "fedgnn/privacy.h"

namespace fedgnn::cli {

struct ExperimentConfig {
  // Graph source: both CSV paths, or the inline generator spec.
  std::filesystem::path nodes_csv;
  std::filesystem::path edges_csv;
  ClientId clients = 0;  // CSV only; 0 keeps the file's client ids
  GenSpec gen;
  bool gen_seed_set = false;  // otherwise each run generates with its seed

  Hyperparams hyper;

  Architecture architecture = Architecture::kSageMean;
  Activation activation = Activation::kTanh;
  std::optional<TaskKind> task;  // inferred from the labels when unset
  std::vector<int> hidden = {16, 16};
  double gin_epsilon = 0.0;

  std::filesystem::path output_dir = "fedgnn_out";
  int repeats = 3;
  int privacy_k = kDefaultNeighbors;
  std::vector<double> percentiles = {std::begin(kDefaultPercentiles),
                                     std::end(kDefaultPercentiles)};
  bool checkpoint = true;

  bool uses_csv() const { return !nodes_csv.empty() || !edges_csv.empty(); }
};

// Applies one assignment. `where` prefixes error messages, e.g.
// "run.cfg:12". Throws ConfigError naming the key.
void SetKey(ExperimentConfig& config, const std::string& key,
            const std::string& value, const std::string& where);

// Parses `key = value` lines; `#` starts a comment. Relative CSV paths are
// resolved against `base_dir`.
ExperimentConfig ParseConfig(std::istream& is, const std::string& source,
                             const std::filesystem::path& base_dir = {});
ExperimentConfig LoadConfig(const std::filesystem::path& path);

// Cross-field checks: graph source, repeats, model and hyperparameters.
void ValidateConfig(const ExperimentConfig& config);

// Every key with its effective value, one per line, in a stable order.
void WriteConfig(std::ostream& os, const ExperimentConfig& config);

std::vector<std::string> KnownKeys();

}  // namespace fedgnn::cli

#endif  // FEDGNN_TOOLS_CONFIG_H_
