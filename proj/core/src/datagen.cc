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

#include "fedgnn/datagen.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include "fedgnn/rng.h"

namespace fedgnn {
namespace {

constexpr double kPartitionTolerance = 0.15;
constexpr int kPartitionRetries = 8;
constexpr int kBisectionSteps = 60;

void Require(bool ok, const std::string& message) {
  if (!ok) throw ValidationError(message);
}

double EdgeRatio(const std::vector<std::size_t>& counts) {
  const auto [lo, hi] = std::minmax_element(counts.begin(), counts.end());
  if (*lo == 0) return *hi == 0 ? 1.0 : std::numeric_limits<double>::infinity();
  return static_cast<double>(*hi) / static_cast<double>(*lo);
}

std::vector<ClientId> AssignByShares(const std::vector<NodeId>& order,
                                     ClientId n_clients, double t) {
  const std::size_t n = order.size();
  std::vector<double> share(n_clients);
  for (ClientId i = 0; i < n_clients; ++i) {
    share[i] = n_clients == 1 ? 1.0 : std::exp(t * i / (n_clients - 1.0));
  }
  const double total = std::accumulate(share.begin(), share.end(), 0.0);
  std::vector<ClientId> hosts(n, 0);
  std::size_t start = 0;
  double cum = 0.0;
  for (ClientId i = 0; i < n_clients; ++i) {
    cum += share[i];
    std::size_t end = i + 1 == n_clients
                          ? n
                          : static_cast<std::size_t>(std::llround(cum / total * n));
    // Every client keeps at least one node.
    end = std::max(end, start + 1);
    end = std::min(end, n - (n_clients - 1 - i));
    for (std::size_t k = start; k < end; ++k) hosts[order[k]] = i;
    start = end;
  }
  return hosts;
}

std::vector<std::pair<NodeId, NodeId>> EdgePairs(const PartitionedGraph& g) {
  std::vector<std::pair<NodeId, NodeId>> out;
  out.reserve(g.num_edges());
  for (EdgeId e = 0; e < g.num_edges(); ++e) {
    out.emplace_back(g.edge(e).src, g.edge(e).dst);
  }
  return out;
}

}  // namespace

std::string_view ToString(Generator g) {
  return g == Generator::kPlantedCycles ? "planted_cycles" : "sbm_nodes";
}

Generator ParseGenerator(std::string_view s) {
  if (s == "planted_cycles") return Generator::kPlantedCycles;
  if (s == "sbm_nodes" || s == "sbm") return Generator::kSbmNodes;
  throw ValidationError("unknown generator '" + std::string(s) + "'");
}

void ValidateGenSpec(const GenSpec& s) {
  Require(s.clients >= 1, "clients must be >= 1");
  Require(s.nodes >= s.clients, "nodes must be >= clients");
  Require(s.imbalance >= 1.0, "imbalance must be >= 1");
  if (s.generator == Generator::kPlantedCycles) {
    Require(s.feature_dim >= 4, "feature_dim must be >= 4 for planted_cycles");
    Require(s.edge_density > 0.0, "edge_density must be > 0");
    Require(s.pattern_length >= 3, "pattern_length must be >= 3");
    Require(s.illicit_ratio > 0.0 && s.illicit_ratio <= 0.5,
            "illicit_ratio must be in (0, 0.5]");
    Require(s.pattern_count >= -1, "pattern_count must be >= 0 or -1 (auto)");
  } else {
    Require(s.feature_dim >= 1, "feature_dim must be >= 1");
    Require(s.blocks >= 2, "blocks must be >= 2");
    Require(s.blocks <= s.nodes, "blocks must be <= nodes");
    Require(s.p_in >= 0.0 && s.p_in <= 1.0, "p_in must be in [0, 1]");
    Require(s.p_out >= 0.0 && s.p_out <= 1.0, "p_out must be in [0, 1]");
    Require(s.feature_noise >= 0.0, "feature_noise must be >= 0");
  }
}

std::vector<std::size_t> ClientEdgeCounts(
    const std::vector<ClientId>& hosts,
    const std::vector<std::pair<NodeId, NodeId>>& edges, ClientId num_clients) {
  std::vector<std::size_t> counts(num_clients, 0);
  for (const auto& [u, v] : edges) {
    ++counts[hosts[u]];
    if (hosts[v] != hosts[u]) ++counts[hosts[v]];
  }
  return counts;
}

PartitionResult PartitionHosts(std::size_t num_nodes,
                               const std::vector<std::pair<NodeId, NodeId>>& edges,
                               ClientId num_clients, double imbalance,
                               std::uint64_t seed) {
  Require(num_clients >= 1, "clients must be >= 1");
  Require(num_nodes >= num_clients, "nodes must be >= clients");
  Require(imbalance >= 1.0, "imbalance must be >= 1");
  PartitionResult best;
  best.ratio = std::numeric_limits<double>::infinity();
  best.within_tolerance = false;
  auto error_of = [imbalance](double ratio) {
    return std::abs(ratio - imbalance) / imbalance;
  };
  auto consider = [&](std::vector<ClientId> hosts) {
    const double ratio =
        EdgeRatio(ClientEdgeCounts(hosts, edges, num_clients));
    if (best.hosts.empty() || error_of(ratio) < error_of(best.ratio)) {
      best.hosts = std::move(hosts);
      best.ratio = ratio;
      best.within_tolerance = error_of(ratio) <= kPartitionTolerance;
    }
  };

  for (int attempt = 0; attempt < kPartitionRetries; ++attempt) {
    std::vector<NodeId> order(num_nodes);
    std::iota(order.begin(), order.end(), 0);
    Rng rng = MakeStream(seed, StreamPurpose::kGeneration, 1, attempt);
    std::shuffle(order.begin(), order.end(), rng);
    if (num_clients == 1) {
      consider(AssignByShares(order, 1, 0.0));
      break;
    }
    auto ratio_at = [&](double t) {
      auto hosts = AssignByShares(order, num_clients, t);
      const double r = EdgeRatio(ClientEdgeCounts(hosts, edges, num_clients));
      consider(std::move(hosts));
      return r;
    };
    double lo = 0.0;
    double hi = 1.0;
    if (ratio_at(lo) < imbalance) {
      while (hi < 64.0 && ratio_at(hi) < imbalance) hi *= 2.0;
      for (int i = 0; i < kBisectionSteps && !best.within_tolerance; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (ratio_at(mid) < imbalance) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
    }
    if (best.within_tolerance) break;
  }
  return best;
}

PartitionedGraph Partition(const PartitionedGraph& graph, ClientId num_clients,
                           double imbalance, std::uint64_t seed,
                           PartitionResult* result) {
  PartitionResult r = PartitionHosts(graph.num_nodes(), EdgePairs(graph),
                                     num_clients, imbalance, seed);
  PartitionedGraph out = graph.Rehosted(r.hosts, num_clients);
  if (result != nullptr) *result = std::move(r);
  return out;
}

PartitionedGraph GenPlantedCycles(const GenSpec& spec, GenInfo* info) {
  ValidateGenSpec(spec);
  Require(spec.generator == Generator::kPlantedCycles,
          "spec is not a planted_cycles spec");
  const auto n = static_cast<std::size_t>(spec.nodes);
  const auto n_clients = static_cast<ClientId>(spec.clients);
  Rng rng = MakeStream(spec.seed, StreamPurpose::kGeneration, 0);
  std::uniform_int_distribution<NodeId> pick(0, static_cast<NodeId>(n - 1));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);

  struct Draft {
    NodeId src;
    NodeId dst;
    Label label;
    double time;
    double log_amount;
  };
  std::vector<Draft> drafts;
  const auto m_bg = static_cast<std::size_t>(std::llround(spec.edge_density * n));
  std::vector<std::pair<NodeId, NodeId>> background;
  while (background.size() < m_bg) {
    const NodeId a = pick(rng);
    const NodeId b = pick(rng);
    if (a == b) continue;
    background.emplace_back(a, b);
  }
  for (const auto& [a, b] : background) {
    drafts.push_back({a, b, 0, unit(rng), 4.0 + normal(rng)});
  }

  PartitionResult part =
      PartitionHosts(n, background, n_clients, spec.imbalance, spec.seed);

  int count = spec.pattern_count;
  const int len = spec.pattern_length;
  if (count < 0) {
    const double r = spec.illicit_ratio;
    count = static_cast<int>(
        std::llround(r * static_cast<double>(m_bg) / ((1.0 - r) * len)));
  }
  if (count > 0) {
    Require(n_clients >= 2, "planted cycles must span two clients; need clients >= 2");
    Require(static_cast<std::size_t>(len) <= 2 * (n / n_clients),
            "pattern_length exceeds the nodes available to a pair of clients");
  }

  std::vector<std::vector<NodeId>> cycles;
  std::vector<int> membership(n, 0);
  for (int c = 0; c < count; ++c) {
    std::vector<NodeId> members;
    while (static_cast<int>(members.size()) < len) {
      const NodeId v = pick(rng);
      if (std::find(members.begin(), members.end(), v) == members.end()) {
        members.push_back(v);
      }
    }
    const bool single_host =
        std::all_of(members.begin(), members.end(), [&](NodeId v) {
          return part.hosts[v] == part.hosts[members[0]];
        });
    if (single_host) {
      std::uniform_int_distribution<int> slot(0, len - 1);
      const int s = slot(rng);
      NodeId v = pick(rng);
      while (part.hosts[v] == part.hosts[members[0]] ||
             std::find(members.begin(), members.end(), v) != members.end()) {
        v = pick(rng);
      }
      members[s] = v;
    }
    const double start = 0.95 * unit(rng);
    const double amount = 5.0 + 0.5 * normal(rng);
    double t = start;
    for (int k = 0; k < len; ++k) {
      drafts.push_back({members[k], members[(k + 1) % len], 1, t,
                        amount - 0.02 * k + 0.05 * normal(rng)});
      t += 0.01 * unit(rng);
    }
    for (NodeId v : members) ++membership[v];
    cycles.push_back(std::move(members));
  }

  std::stable_sort(drafts.begin(), drafts.end(),
                   [](const Draft& a, const Draft& b) { return a.time < b.time; });

  std::vector<int> out_degree(n, 0);
  std::vector<int> in_degree(n, 0);
  std::vector<EdgeRecord> edges;
  edges.reserve(drafts.size());
  for (std::size_t i = 0; i < drafts.size(); ++i) {
    const Draft& d = drafts[i];
    ++out_degree[d.src];
    ++in_degree[d.dst];
    edges.push_back({static_cast<std::int64_t>(i), d.src, d.dst, d.label,
                     {d.log_amount, d.time, d.src < d.dst ? 1.0 : -1.0}});
  }

  std::vector<NodeRecord> nodes;
  nodes.reserve(n);
  for (std::size_t v = 0; v < n; ++v) {
    NodeRecord r;
    r.id = static_cast<std::int64_t>(v);
    r.host = part.hosts[v];
    r.features.push_back(1.0);
    r.features.push_back(std::log1p(out_degree[v]) + 0.1 * normal(rng));
    r.features.push_back(std::log1p(in_degree[v]) + 0.1 * normal(rng));
    r.features.push_back((membership[v] > 0 ? spec.cycle_signal : 0.0) +
                         normal(rng));
    for (int j = 4; j < spec.feature_dim; ++j) r.features.push_back(normal(rng));
    nodes.push_back(std::move(r));
  }

  // Standardize every column but the constant one.
  for (int j = 1; j < spec.feature_dim; ++j) {
    double mean = 0.0;
    for (const NodeRecord& r : nodes) mean += r.features[j];
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (const NodeRecord& r : nodes) var += (r.features[j] - mean) * (r.features[j] - mean);
    const double sd = std::sqrt(var / static_cast<double>(n));
    for (NodeRecord& r : nodes) {
      r.features[j] = sd > 0.0 ? (r.features[j] - mean) / sd : 0.0;
    }
  }

  if (info != nullptr) {
    info->cycles = std::move(cycles);
    info->partition_ratio = part.ratio;
    info->partition_within_tolerance = part.within_tolerance;
  }
  return PartitionedGraph::Build(std::move(nodes), std::move(edges), n_clients);
}

PartitionedGraph GenSbmNodes(const GenSpec& spec, GenInfo* info) {
  ValidateGenSpec(spec);
  Require(spec.generator == Generator::kSbmNodes, "spec is not an sbm_nodes spec");
  const auto n = static_cast<std::size_t>(spec.nodes);
  const auto n_clients = static_cast<ClientId>(spec.clients);
  Rng rng = MakeStream(spec.seed, StreamPurpose::kGeneration, 0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);

  Matrix means(spec.blocks, spec.feature_dim);
  for (Eigen::Index i = 0; i < means.size(); ++i) means.data()[i] = normal(rng);

  std::vector<std::pair<NodeId, NodeId>> pairs;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool same = i % spec.blocks == j % spec.blocks;
      if (unit(rng) < (same ? spec.p_in : spec.p_out)) {
        pairs.emplace_back(static_cast<NodeId>(i), static_cast<NodeId>(j));
      }
    }
  }
  PartitionResult part =
      PartitionHosts(n, pairs, n_clients, spec.imbalance, spec.seed);

  std::vector<NodeRecord> nodes;
  nodes.reserve(n);
  for (std::size_t v = 0; v < n; ++v) {
    NodeRecord r;
    r.id = static_cast<std::int64_t>(v);
    r.host = part.hosts[v];
    r.label = static_cast<Label>(v % spec.blocks);
    for (int j = 0; j < spec.feature_dim; ++j) {
      r.features.push_back(means(r.label, j) + spec.feature_noise * normal(rng));
    }
    nodes.push_back(std::move(r));
  }
  std::vector<EdgeRecord> edges;
  edges.reserve(pairs.size());
  for (std::size_t e = 0; e < pairs.size(); ++e) {
    edges.push_back({static_cast<std::int64_t>(e), pairs[e].first,
                     pairs[e].second, kNoLabel, {}});
  }
  if (info != nullptr) {
    info->cycles.clear();
    info->partition_ratio = part.ratio;
    info->partition_within_tolerance = part.within_tolerance;
  }
  return PartitionedGraph::Build(std::move(nodes), std::move(edges), n_clients);
}

PartitionedGraph Generate(const GenSpec& spec, GenInfo* info) {
  return spec.generator == Generator::kPlantedCycles ? GenPlantedCycles(spec, info)
                                                     : GenSbmNodes(spec, info);
}

}  // namespace fedgnn
