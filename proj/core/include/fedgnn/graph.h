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

#ifndef FEDGNN_GRAPH_H_
#define FEDGNN_GRAPH_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "fedgnn/common.h"

namespace fedgnn {

struct NodeRecord {
  std::int64_t id = 0;
  ClientId host = 0;
  Label label = kNoLabel;
  std::vector<double> features;
};

struct EdgeRecord {
  std::int64_t id = 0;
  std::int64_t src = 0;
  std::int64_t dst = 0;
  Label label = kNoLabel;
  std::vector<double> features;
};

// Compressed adjacency lists: row v spans data[offsets[v], offsets[v+1]).
class Csr {
 public:
  Csr() = default;
  explicit Csr(const std::vector<std::vector<std::uint32_t>>& rows);

  std::span<const std::uint32_t> row(std::size_t v) const {
    return {data_.data() + offsets_[v], data_.data() + offsets_[v + 1]};
  }
  std::size_t num_rows() const {
    return offsets_.empty() ? 0 : offsets_.size() - 1;
  }
  std::size_t num_entries() const { return data_.size(); }

 private:
  std::vector<std::size_t> offsets_;
  std::vector<std::uint32_t> data_;
};

// A graph whose nodes are hosted by N clients. Node features and labels stay
// with the host; an edge whose endpoints live on different clients is visible,
// with its attributes, to both of them.
//
// Immutable after construction and safe for concurrent reads.
class PartitionedGraph {
 public:
  struct Edge {
    NodeId src;
    NodeId dst;
    Label label;
  };

  // Validates ids and builds every adjacency view. Throws ValidationError on
  // duplicate node ids, dangling endpoints (naming the edge id), hosts outside
  // [0, num_clients) or ragged feature dimensions.
  static PartitionedGraph Build(std::vector<NodeRecord> nodes,
                                std::vector<EdgeRecord> edges,
                                ClientId num_clients);

  // Same topology and attributes with a new host map.
  PartitionedGraph Rehosted(const std::vector<ClientId>& hosts,
                            ClientId num_clients) const;

  std::size_t num_nodes() const { return hosts_.size(); }
  std::size_t num_edges() const { return edges_.size(); }
  ClientId num_clients() const { return num_clients_; }
  std::size_t feature_dim() const { return features_.cols(); }
  std::size_t edge_feature_dim() const { return edge_features_.cols(); }

  const Matrix& features() const { return features_; }
  const Matrix& edge_features() const { return edge_features_; }
  ClientId host(NodeId v) const { return hosts_[v]; }
  const std::vector<ClientId>& hosts() const { return hosts_; }
  Label node_label(NodeId v) const { return node_labels_[v]; }
  const Edge& edge(EdgeId e) const { return edges_[e]; }
  std::int64_t external_node_id(NodeId v) const { return node_ids_[v]; }
  std::int64_t external_edge_id(EdgeId e) const { return edge_ids_[e]; }

  bool is_cross_client(EdgeId e) const {
    return hosts_[edges_[e].src] != hosts_[edges_[e].dst];
  }

  // Undirected, deduplicated, sorted neighbor set without the node itself.
  std::span<const NodeId> neighbors(NodeId v) const {
    return neighbors_.row(v);
  }

  // Edges visible to a client: intra-client edges of its nodes plus every
  // cross-client edge incident to one of them. Sorted by EdgeId.
  std::span<const EdgeId> client_edges(ClientId i) const {
    return client_edges_.row(i);
  }
  std::span<const NodeId> client_nodes(ClientId i) const {
    return client_nodes_.row(i);
  }

  bool has_edge_labels() const { return has_edge_labels_; }
  bool has_node_labels() const { return has_node_labels_; }
  // 1 + largest label seen on the labeled entity type (edges take priority).
  int num_classes() const { return num_classes_; }

 private:
  PartitionedGraph() = default;
  void Index();

  ClientId num_clients_ = 0;
  std::vector<std::int64_t> node_ids_;
  std::vector<ClientId> hosts_;
  std::vector<Label> node_labels_;
  Matrix features_;
  std::vector<std::int64_t> edge_ids_;
  std::vector<Edge> edges_;
  Matrix edge_features_;
  Csr neighbors_;
  Csr client_edges_;
  Csr client_nodes_;
  bool has_edge_labels_ = false;
  bool has_node_labels_ = false;
  int num_classes_ = 0;
};

// Nodes hosted by `client` with at least one neighbor hosted elsewhere.
std::vector<NodeId> BoundaryNodes(const PartitionedGraph& graph,
                                  ClientId client);

// The adjacency used for message passing.
//
//  Full:        every node computable, all edges aggregate.
//  IntraClient: every node computable, only same-host edges aggregate. This
//               is the centralized counterpart of federated training, where
//               cross-client neighbors enter through released embeddings only.
//  Client(i):   nodes hosted by i computable; same-host edges aggregate;
//               cross-client neighbors are listed separately as remote.
class GraphView {
 public:
  static GraphView Full(const PartitionedGraph& graph);
  static GraphView IntraClient(const PartitionedGraph& graph);
  static GraphView Client(const PartitionedGraph& graph, ClientId client);

  const PartitionedGraph& graph() const { return *graph_; }
  std::optional<ClientId> client() const { return client_; }

  bool is_local(NodeId v) const {
    return !client_ || graph_->host(v) == *client_;
  }
  std::span<const NodeId> local_neighbors(NodeId v) const {
    return local_.row(v);
  }
  std::span<const NodeId> remote_neighbors(NodeId v) const {
    return remote_.num_rows() == 0 ? std::span<const NodeId>{}
                                   : remote_.row(v);
  }
  const std::vector<NodeId>& local_nodes() const { return local_nodes_; }

 private:
  const PartitionedGraph* graph_ = nullptr;
  std::optional<ClientId> client_;
  Csr local_;
  Csr remote_;
  std::vector<NodeId> local_nodes_;
};

enum class Split : std::uint8_t { kTrain = 0, kValidation = 1, kTest = 2 };

// Train/validation/test assignment for whichever entity type carries labels.
// Edge tasks split temporally by EdgeId order (generators emit edges in time
// order); node tasks split uniformly at random. Fractions are 60/20/20.
struct DataSplit {
  std::vector<Split> edges;
  std::vector<Split> nodes;
};

DataSplit MakeSplit(const PartitionedGraph& graph, std::uint64_t seed);

}  // namespace fedgnn

#endif  // FEDGNN_GRAPH_H_
