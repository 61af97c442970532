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

#ifndef FEDGNN_GRAPH_IO_H_
#define FEDGNN_GRAPH_IO_H_

#include <filesystem>
#include <iosfwd>

#include "fedgnn/graph.h"

namespace fedgnn {

// nodes.csv: node_id,client_id,label,f0,...,f{d0-1}   (label empty if absent)
// edges.csv: edge_id,src,dst,label,e0,...,e{p-1}
//
// The header row is required. Ragged rows are rejected with their line number.
// The client count is 1 + the largest client_id unless `num_clients` is given.
PartitionedGraph ReadGraphCsv(std::istream& nodes, std::istream& edges,
                              ClientId num_clients = 0);
PartitionedGraph LoadGraphCsv(const std::filesystem::path& nodes_csv,
                              const std::filesystem::path& edges_csv,
                              ClientId num_clients = 0);

void WriteGraphCsv(const PartitionedGraph& graph, std::ostream& nodes,
                   std::ostream& edges);
void SaveGraphCsv(const PartitionedGraph& graph,
                  const std::filesystem::path& nodes_csv,
                  const std::filesystem::path& edges_csv);

}  // namespace fedgnn

#endif  // FEDGNN_GRAPH_IO_H_
