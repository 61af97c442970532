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

#include "fedgnn/graph.h"

#include <algorithm>
#include <numeric>
#include <string>
#include <unordered_map>

#include "fedgnn/rng.h"

namespace fedgnn {

Csr::Csr(const std::vector<std::vector<std::uint32_t>>& rows) {
  offsets_.reserve(rows.size() + 1);
  offsets_.push_back(0);
  for (const auto& r : rows) {
    data_.insert(data_.end(), r.begin(), r.end());
    offsets_.push_back(data_.size());
  }
}

PartitionedGraph PartitionedGraph::Build(std::vector<NodeRecord> nodes,
                                         std::vector<EdgeRecord> edges,
                                         ClientId num_clients) {
  if (num_clients == 0) {
    throw ValidationError("graph needs at least one client");
  }
  PartitionedGraph g;
  g.num_clients_ = num_clients;

  // Dense indices follow ascending external id so that the index order, and
  // every neighbor list derived from it, is independent of input order.
  std::sort(nodes.begin(), nodes.end(),
            [](const NodeRecord& a, const NodeRecord& b) { return a.id < b.id; });
  const std::size_t n = nodes.size();
  const std::size_t d0 = n == 0 ? 0 : nodes.front().features.size();
  std::unordered_map<std::int64_t, NodeId> index;
  index.reserve(n);
  g.features_.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d0));
  for (std::size_t i = 0; i < n; ++i) {
    const NodeRecord& rec = nodes[i];
    if (rec.id < 0) {
      throw ValidationError("negative node id " + std::to_string(rec.id));
    }
    if (i > 0 && nodes[i - 1].id == rec.id) {
      throw ValidationError("duplicate node id " + std::to_string(rec.id));
    }
    if (rec.host >= num_clients) {
      throw ValidationError("node " + std::to_string(rec.id) + " has host " +
                            std::to_string(rec.host) + " outside [0, " +
                            std::to_string(num_clients) + ")");
    }
    if (rec.features.size() != d0) {
      throw ValidationError("node " + std::to_string(rec.id) + " has " +
                            std::to_string(rec.features.size()) +
                            " features, expected " + std::to_string(d0));
    }
    index.emplace(rec.id, static_cast<NodeId>(i));
    g.node_ids_.push_back(rec.id);
    g.hosts_.push_back(rec.host);
    g.node_labels_.push_back(rec.label);
    for (std::size_t j = 0; j < d0; ++j) {
      g.features_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          rec.features[j];
    }
  }

  std::sort(edges.begin(), edges.end(),
            [](const EdgeRecord& a, const EdgeRecord& b) { return a.id < b.id; });
  const std::size_t m = edges.size();
  const std::size_t p = m == 0 ? 0 : edges.front().features.size();
  g.edge_features_.resize(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(p));
  for (std::size_t i = 0; i < m; ++i) {
    const EdgeRecord& rec = edges[i];
    if (i > 0 && edges[i - 1].id == rec.id) {
      throw ValidationError("duplicate edge id " + std::to_string(rec.id));
    }
    auto src = index.find(rec.src);
    auto dst = index.find(rec.dst);
    if (src == index.end() || dst == index.end()) {
      throw ValidationError("edge " + std::to_string(rec.id) +
                            " has dangling endpoint " +
                            std::to_string(src == index.end() ? rec.src : rec.dst));
    }
    if (rec.features.size() != p) {
      throw ValidationError("edge " + std::to_string(rec.id) + " has " +
                            std::to_string(rec.features.size()) +
                            " features, expected " + std::to_string(p));
    }
    g.edge_ids_.push_back(rec.id);
    g.edges_.push_back(Edge{src->second, dst->second, rec.label});
    for (std::size_t j = 0; j < p; ++j) {
      g.edge_features_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          rec.features[j];
    }
  }
  g.Index();
  return g;
}

PartitionedGraph PartitionedGraph::Rehosted(const std::vector<ClientId>& hosts,
                                            ClientId num_clients) const {
  if (hosts.size() != num_nodes()) {
    throw ValidationError("host map size does not match node count");
  }
  if (num_clients == 0) {
    throw ValidationError("graph needs at least one client");
  }
  for (ClientId h : hosts) {
    if (h >= num_clients) {
      throw ValidationError("host " + std::to_string(h) + " outside [0, " +
                            std::to_string(num_clients) + ")");
    }
  }
  PartitionedGraph g = *this;
  g.hosts_ = hosts;
  g.num_clients_ = num_clients;
  g.Index();
  return g;
}

void PartitionedGraph::Index() {
  const std::size_t n = num_nodes();
  std::vector<std::vector<std::uint32_t>> adj(n);
  std::vector<std::vector<std::uint32_t>> per_client_edges(num_clients_);
  std::vector<std::vector<std::uint32_t>> per_client_nodes(num_clients_);
  for (NodeId v = 0; v < n; ++v) per_client_nodes[hosts_[v]].push_back(v);

  has_edge_labels_ = false;
  has_node_labels_ = false;
  Label max_edge_label = kNoLabel;
  Label max_node_label = kNoLabel;
  for (EdgeId e = 0; e < edges_.size(); ++e) {
    const Edge& ed = edges_[e];
    if (ed.src != ed.dst) {
      adj[ed.src].push_back(ed.dst);
      adj[ed.dst].push_back(ed.src);
    }
    const ClientId a = hosts_[ed.src];
    const ClientId b = hosts_[ed.dst];
    per_client_edges[a].push_back(e);
    if (b != a) per_client_edges[b].push_back(e);
    if (ed.label != kNoLabel) {
      has_edge_labels_ = true;
      max_edge_label = std::max(max_edge_label, ed.label);
    }
  }
  for (Label l : node_labels_) {
    if (l != kNoLabel) {
      has_node_labels_ = true;
      max_node_label = std::max(max_node_label, l);
    }
  }
  for (auto& row : adj) {
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end()), row.end());
  }
  neighbors_ = Csr(adj);
  client_edges_ = Csr(per_client_edges);
  client_nodes_ = Csr(per_client_nodes);
  num_classes_ = has_edge_labels_ ? max_edge_label + 1 : max_node_label + 1;
  if (num_classes_ < 0) num_classes_ = 0;
}

std::vector<NodeId> BoundaryNodes(const PartitionedGraph& graph,
                                  ClientId client) {
  std::vector<NodeId> out;
  if (client >= graph.num_clients()) return out;
  for (NodeId v : graph.client_nodes(client)) {
    for (NodeId u : graph.neighbors(v)) {
      if (graph.host(u) != client) {
        out.push_back(v);
        break;
      }
    }
  }
  return out;
}

GraphView GraphView::Full(const PartitionedGraph& graph) {
  GraphView view;
  view.graph_ = &graph;
  const std::size_t n = graph.num_nodes();
  std::vector<std::vector<std::uint32_t>> local(n);
  for (NodeId v = 0; v < n; ++v) {
    auto nb = graph.neighbors(v);
    local[v].assign(nb.begin(), nb.end());
    view.local_nodes_.push_back(v);
  }
  view.local_ = Csr(local);
  return view;
}

GraphView GraphView::IntraClient(const PartitionedGraph& graph) {
  GraphView view;
  view.graph_ = &graph;
  const std::size_t n = graph.num_nodes();
  std::vector<std::vector<std::uint32_t>> local(n);
  for (NodeId v = 0; v < n; ++v) {
    for (NodeId u : graph.neighbors(v)) {
      if (graph.host(u) == graph.host(v)) local[v].push_back(u);
    }
    view.local_nodes_.push_back(v);
  }
  view.local_ = Csr(local);
  return view;
}

GraphView GraphView::Client(const PartitionedGraph& graph, ClientId client) {
  if (client >= graph.num_clients()) {
    throw ValidationError("client " + std::to_string(client) + " out of range");
  }
  GraphView view;
  view.graph_ = &graph;
  view.client_ = client;
  const std::size_t n = graph.num_nodes();
  std::vector<std::vector<std::uint32_t>> local(n);
  std::vector<std::vector<std::uint32_t>> remote(n);
  for (NodeId v : graph.client_nodes(client)) {
    for (NodeId u : graph.neighbors(v)) {
      (graph.host(u) == client ? local[v] : remote[v]).push_back(u);
    }
    view.local_nodes_.push_back(v);
  }
  view.local_ = Csr(local);
  view.remote_ = Csr(remote);
  return view;
}

DataSplit MakeSplit(const PartitionedGraph& graph, std::uint64_t seed) {
  DataSplit split;
  auto assign = [](std::size_t rank, std::size_t total) {
    // rank / total in [0, 1): first 60% train, next 20% validation.
    if (rank * 10 < total * 6) return Split::kTrain;
    if (rank * 10 < total * 8) return Split::kValidation;
    return Split::kTest;
  };
  const std::size_t m = graph.num_edges();
  split.edges.resize(m);
  for (std::size_t e = 0; e < m; ++e) split.edges[e] = assign(e, m);

  const std::size_t n = graph.num_nodes();
  std::vector<NodeId> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng = MakeStream(seed, StreamPurpose::kSplit);
  std::shuffle(order.begin(), order.end(), rng);
  split.nodes.resize(n);
  for (std::size_t r = 0; r < n; ++r) split.nodes[order[r]] = assign(r, n);
  return split;
}

}  // namespace fedgnn
