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

#ifndef FEDGNN_DATAGEN_H_
#define FEDGNN_DATAGEN_H_

#include <cstdint>
#include <string_view>
#include <utility>
#include <vector>

#include "fedgnn/common.h"
#include "fedgnn/graph.h"

namespace fedgnn {

enum class Generator { kPlantedCycles, kSbmNodes };

std::string_view ToString(Generator g);
Generator ParseGenerator(std::string_view s);

struct GenSpec {
  Generator generator = Generator::kPlantedCycles;
  int nodes = 200;
  int clients = 4;
  int feature_dim = 6;
  std::uint64_t seed = 1;
  // Largest / smallest per-client edge count.
  double imbalance = 1.0;

  // Planted cycles. Background edges per node; -1 derives the pattern count
  // from illicit_ratio.
  double edge_density = 1.5;
  int pattern_count = -1;
  int pattern_length = 4;
  double illicit_ratio = 0.05;
  // Mean shift of the activity feature on cycle members.
  double cycle_signal = 4.0;

  // Stochastic block model.
  int blocks = 3;
  double p_in = 0.05;
  double p_out = 0.005;
  double feature_noise = 1.0;
};

// Throws ValidationError naming the offending field.
void ValidateGenSpec(const GenSpec& spec);

struct GenInfo {
  std::vector<std::vector<NodeId>> cycles;  // planted cycle members in order
  double partition_ratio = 1.0;
  bool partition_within_tolerance = true;
};

// Background transactions labeled 0 plus directed cycles labeled 1, each
// spanning at least two clients. Edges are emitted in time order. Node
// features: a constant 1 (the model has no bias terms), then standardized
// log1p(out-degree), log1p(in-degree), activity and Gaussian noise columns;
// edge features: log amount, time, direction.
PartitionedGraph GenPlantedCycles(const GenSpec& spec, GenInfo* info = nullptr);

// Stochastic block model with block id as node label and block-mean plus
// Gaussian noise features.
PartitionedGraph GenSbmNodes(const GenSpec& spec, GenInfo* info = nullptr);

PartitionedGraph Generate(const GenSpec& spec, GenInfo* info = nullptr);

struct PartitionResult {
  std::vector<ClientId> hosts;
  double ratio = 1.0;  // achieved largest / smallest client edge count
  bool within_tolerance = true;
};

// Per-client visible edge counts (intra once, cross on both sides).
std::vector<std::size_t> ClientEdgeCounts(
    const std::vector<ClientId>& hosts,
    const std::vector<std::pair<NodeId, NodeId>>& edges, ClientId num_clients);

// Assigns nodes to clients in a seeded random order with client shares
// proportional to exp(t i / (N - 1)), searching t so the edge-count ratio is
// within 15% of `imbalance`. Falls back to the closest assignment found
// (within_tolerance = false) after bounded retries.
PartitionResult PartitionHosts(std::size_t num_nodes,
                               const std::vector<std::pair<NodeId, NodeId>>& edges,
                               ClientId num_clients, double imbalance,
                               std::uint64_t seed);

PartitionedGraph Partition(const PartitionedGraph& graph, ClientId num_clients,
                           double imbalance, std::uint64_t seed,
                           PartitionResult* result = nullptr);

}  // namespace fedgnn

#endif  // FEDGNN_DATAGEN_H_
