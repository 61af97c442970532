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

#ifndef FEDGNN_SAMPLING_H_
#define FEDGNN_SAMPLING_H_

#include <cstdint>
#include <span>
#include <vector>

#include "fedgnn/graph.h"
#include "fedgnn/rng.h"

namespace fedgnn {

// How a client treats cross-client neighbors inside message passing.
//
//  kExclude:  cross-client neighbors never enter intra-layer means; they reach
//             the model only through the edge head's released embedding.
//  kBuffered: at layers l >= 2 whose input width equals the embedding width,
//             a cross-client neighbor contributes its released final-layer
//             embedding as a constant.
enum class RemoteMode { kExclude, kBuffered };

// Node sets and neighbor lists for an L-layer computation, built top-down
// from the roots and executed bottom-up.
struct ComputationPlan {
  // sets[l] holds the nodes whose layer-l value is computed (sorted);
  // sets[0] is the input layer. sets[l-1] contains sets[l].
  std::vector<std::vector<NodeId>> sets;
  // neighbors[l][r]: local neighbors aggregated by sets[l][r] (l >= 1).
  std::vector<std::vector<std::vector<NodeId>>> neighbors;
  // remote[l][r]: cross-client neighbors aggregated as constants.
  std::vector<std::vector<std::vector<NodeId>>> remote;
  // include_remote[l]: whether remote neighbors count toward layer l's
  // degree normalization.
  std::vector<bool> include_remote;

  int num_layers() const { return static_cast<int>(sets.size()) - 1; }
};

// fanouts[0] caps the neighbors sampled for layer L (hop 1), fanouts[1] for
// layer L-1 and so on; the last entry repeats. A cap <= 0 means "all".
// With rng == nullptr every neighbor is kept.
ComputationPlan BuildPlan(const GraphView& view, std::vector<NodeId> roots,
                          int num_layers, std::span<const int> fanouts,
                          const std::vector<bool>& include_remote, Rng* rng);

// Seed candidates of one client for one round: training edges visible to the
// client (edge task) or training nodes it hosts (node task).
struct SeedPool {
  std::vector<EdgeId> edges;
  std::vector<NodeId> nodes;
  bool empty() const { return edges.empty() && nodes.empty(); }
};

struct Minibatch {
  ClientId client = 0;
  int round = 0;
  int step = 0;
  std::vector<EdgeId> seed_edges;
  std::vector<NodeId> seed_nodes;
  ComputationPlan plan;

  // No seeds: the step proceeds with a zero update.
  bool empty() const { return seed_edges.empty() && seed_nodes.empty(); }
};

struct SamplingConfig {
  int batch_size = 64;
  std::vector<int> fanouts = {10, 10};
  std::vector<bool> include_remote;  // per layer, index 0 unused
};

// Draws B0 seeds uniformly without replacement from the pool, then samples
// per-hop neighborhoods. The roots are the seeds' locally hosted endpoints.
Minibatch SampleMinibatch(const GraphView& view, const SeedPool& pool,
                          const SamplingConfig& config, int num_layers,
                          Rng& rng);

// Stream for (client, round, step) under `master_seed`; equal inputs give
// identical minibatches regardless of execution order.
Minibatch SampleMinibatch(const GraphView& view, const SeedPool& pool,
                          const SamplingConfig& config, int num_layers,
                          std::uint64_t master_seed, int round, int step);

// Local endpoints of the seeds, sorted and unique.
std::vector<NodeId> SeedRoots(const GraphView& view,
                              std::span<const EdgeId> edges,
                              std::span<const NodeId> nodes);

}  // namespace fedgnn

#endif  // FEDGNN_SAMPLING_H_
