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

#include "fedgnn/sampling.h"

#include <algorithm>
#include <iterator>

namespace fedgnn {
namespace {

void SortUnique(std::vector<NodeId>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

int FanoutFor(std::span<const int> fanouts, int hop) {
  if (fanouts.empty()) return 0;
  const std::size_t i = std::min<std::size_t>(hop, fanouts.size() - 1);
  return fanouts[i];
}

}  // namespace

ComputationPlan BuildPlan(const GraphView& view, std::vector<NodeId> roots,
                          int num_layers, std::span<const int> fanouts,
                          const std::vector<bool>& include_remote, Rng* rng) {
  ComputationPlan plan;
  const int L = num_layers;
  plan.sets.resize(L + 1);
  plan.neighbors.resize(L + 1);
  plan.remote.resize(L + 1);
  plan.include_remote.assign(L + 1, false);
  for (int l = 1; l <= L && l < static_cast<int>(include_remote.size()); ++l) {
    plan.include_remote[l] = include_remote[l];
  }

  SortUnique(roots);
  plan.sets[L] = std::move(roots);
  std::vector<NodeId> candidates;
  std::vector<NodeId> picked;
  for (int l = L; l >= 1; --l) {
    const int cap = FanoutFor(fanouts, L - l);
    const auto& nodes = plan.sets[l];
    std::vector<NodeId> below = nodes;
    plan.neighbors[l].resize(nodes.size());
    plan.remote[l].resize(nodes.size());
    for (std::size_t r = 0; r < nodes.size(); ++r) {
      const NodeId v = nodes[r];
      auto local = view.local_neighbors(v);
      auto remote = plan.include_remote[l] ? view.remote_neighbors(v)
                                           : std::span<const NodeId>{};
      candidates.assign(local.begin(), local.end());
      candidates.insert(candidates.end(), remote.begin(), remote.end());
      std::sort(candidates.begin(), candidates.end());
      if (rng != nullptr && cap > 0 &&
          candidates.size() > static_cast<std::size_t>(cap)) {
        picked.clear();
        std::sample(candidates.begin(), candidates.end(),
                    std::back_inserter(picked), cap, *rng);
      } else {
        picked = candidates;
      }
      for (NodeId u : picked) {
        if (view.is_local(u)) {
          plan.neighbors[l][r].push_back(u);
          below.push_back(u);
        } else {
          plan.remote[l][r].push_back(u);
        }
      }
    }
    SortUnique(below);
    plan.sets[l - 1] = std::move(below);
  }
  return plan;
}

std::vector<NodeId> SeedRoots(const GraphView& view,
                              std::span<const EdgeId> edges,
                              std::span<const NodeId> nodes) {
  std::vector<NodeId> roots;
  const auto& g = view.graph();
  for (EdgeId e : edges) {
    const auto& ed = g.edge(e);
    if (view.is_local(ed.src)) roots.push_back(ed.src);
    if (view.is_local(ed.dst)) roots.push_back(ed.dst);
  }
  for (NodeId v : nodes) {
    if (view.is_local(v)) roots.push_back(v);
  }
  SortUnique(roots);
  return roots;
}

Minibatch SampleMinibatch(const GraphView& view, const SeedPool& pool,
                          const SamplingConfig& config, int num_layers,
                          Rng& rng) {
  Minibatch mb;
  mb.client = view.client().value_or(0);
  if (config.batch_size < 1) {
    throw ValidationError("seed batch size must be >= 1");
  }
  const std::size_t b = static_cast<std::size_t>(config.batch_size);
  if (!pool.edges.empty()) {
    std::sample(pool.edges.begin(), pool.edges.end(),
                std::back_inserter(mb.seed_edges), b, rng);
  } else if (!pool.nodes.empty()) {
    std::sample(pool.nodes.begin(), pool.nodes.end(),
                std::back_inserter(mb.seed_nodes), b, rng);
  }
  if (mb.empty()) return mb;
  mb.plan = BuildPlan(view, SeedRoots(view, mb.seed_edges, mb.seed_nodes),
                      num_layers, config.fanouts, config.include_remote, &rng);
  return mb;
}

Minibatch SampleMinibatch(const GraphView& view, const SeedPool& pool,
                          const SamplingConfig& config, int num_layers,
                          std::uint64_t master_seed, int round, int step) {
  const ClientId client = view.client().value_or(0);
  Rng rng = MakeStream(master_seed, StreamPurpose::kSampling, client,
                       static_cast<std::uint64_t>(round),
                       static_cast<std::uint64_t>(step));
  Minibatch mb = SampleMinibatch(view, pool, config, num_layers, rng);
  mb.round = round;
  mb.step = step;
  return mb;
}

}  // namespace fedgnn
