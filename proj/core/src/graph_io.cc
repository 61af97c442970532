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

#include "fedgnn/graph_io.h"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "fedgnn/csv.h"

namespace fedgnn {
namespace {

struct Table {
  std::vector<std::string> lines;  // data rows only
  std::size_t width = 0;
};

// Reads header + rows, checking that every row has the header's width.
Table ReadTable(std::istream& in, const std::string& name,
                std::size_t fixed_columns) {
  Table t;
  std::string line;
  if (!std::getline(in, line)) {
    throw ValidationError(name + ": missing header row");
  }
  t.width = SplitCsvLine(line).size();
  if (t.width < fixed_columns) {
    throw ValidationError(name + ": header has " + std::to_string(t.width) +
                          " columns, expected at least " +
                          std::to_string(fixed_columns));
  }
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const std::size_t w = SplitCsvLine(line).size();
    if (w != t.width) {
      throw ValidationError(name + ": line " + std::to_string(line_no) +
                            " has " + std::to_string(w) + " fields, expected " +
                            std::to_string(t.width));
    }
    t.lines.push_back(line);
  }
  return t;
}

Label ParseLabel(std::string_view field, const std::string& what) {
  if (field.empty()) return kNoLabel;
  const long long v = ParseInt(field, what);
  if (v < 0) throw ValidationError(what + ": negative label");
  return static_cast<Label>(v);
}

}  // namespace

PartitionedGraph ReadGraphCsv(std::istream& nodes_in, std::istream& edges_in,
                              ClientId num_clients) {
  const Table nt = ReadTable(nodes_in, "nodes.csv", 3);
  const Table et = ReadTable(edges_in, "edges.csv", 4);

  std::vector<NodeRecord> nodes;
  nodes.reserve(nt.lines.size());
  ClientId max_client = 0;
  for (std::size_t i = 0; i < nt.lines.size(); ++i) {
    const std::string where = "nodes.csv line " + std::to_string(i + 2);
    auto f = SplitCsvLine(nt.lines[i]);
    NodeRecord rec;
    rec.id = ParseInt(f[0], where);
    const long long host = ParseInt(f[1], where);
    if (host < 0) throw ValidationError(where + ": negative client_id");
    rec.host = static_cast<ClientId>(host);
    max_client = std::max(max_client, rec.host);
    rec.label = ParseLabel(f[2], where);
    for (std::size_t j = 3; j < f.size(); ++j) {
      rec.features.push_back(ParseDouble(f[j], where));
    }
    nodes.push_back(std::move(rec));
  }

  std::vector<EdgeRecord> edges;
  edges.reserve(et.lines.size());
  for (std::size_t i = 0; i < et.lines.size(); ++i) {
    const std::string where = "edges.csv line " + std::to_string(i + 2);
    auto f = SplitCsvLine(et.lines[i]);
    EdgeRecord rec;
    rec.id = ParseInt(f[0], where);
    rec.src = ParseInt(f[1], where);
    rec.dst = ParseInt(f[2], where);
    rec.label = ParseLabel(f[3], where);
    for (std::size_t j = 4; j < f.size(); ++j) {
      rec.features.push_back(ParseDouble(f[j], where));
    }
    edges.push_back(std::move(rec));
  }
  if (num_clients == 0) num_clients = nodes.empty() ? 1 : max_client + 1;
  return PartitionedGraph::Build(std::move(nodes), std::move(edges), num_clients);
}

PartitionedGraph LoadGraphCsv(const std::filesystem::path& nodes_csv,
                              const std::filesystem::path& edges_csv,
                              ClientId num_clients) {
  std::ifstream nodes(nodes_csv);
  if (!nodes) throw ValidationError("cannot open " + nodes_csv.string());
  std::ifstream edges(edges_csv);
  if (!edges) throw ValidationError("cannot open " + edges_csv.string());
  return ReadGraphCsv(nodes, edges, num_clients);
}

void WriteGraphCsv(const PartitionedGraph& graph, std::ostream& nodes,
                   std::ostream& edges) {
  std::vector<std::string> header = {"node_id", "client_id", "label"};
  for (std::size_t j = 0; j < graph.feature_dim(); ++j) {
    header.push_back("f" + std::to_string(j));
  }
  nodes << JoinCsv(header) << '\n';
  for (NodeId v = 0; v < graph.num_nodes(); ++v) {
    std::vector<std::string> row = {
        std::to_string(graph.external_node_id(v)),
        std::to_string(graph.host(v)),
        graph.node_label(v) == kNoLabel ? std::string()
                                        : std::to_string(graph.node_label(v))};
    for (std::size_t j = 0; j < graph.feature_dim(); ++j) {
      row.push_back(FormatDouble(graph.features()(v, static_cast<Eigen::Index>(j))));
    }
    nodes << JoinCsv(row) << '\n';
  }

  header = {"edge_id", "src", "dst", "label"};
  for (std::size_t j = 0; j < graph.edge_feature_dim(); ++j) {
    header.push_back("e" + std::to_string(j));
  }
  edges << JoinCsv(header) << '\n';
  for (EdgeId e = 0; e < graph.num_edges(); ++e) {
    const auto& ed = graph.edge(e);
    std::vector<std::string> row = {
        std::to_string(graph.external_edge_id(e)),
        std::to_string(graph.external_node_id(ed.src)),
        std::to_string(graph.external_node_id(ed.dst)),
        ed.label == kNoLabel ? std::string() : std::to_string(ed.label)};
    for (std::size_t j = 0; j < graph.edge_feature_dim(); ++j) {
      row.push_back(
          FormatDouble(graph.edge_features()(e, static_cast<Eigen::Index>(j))));
    }
    edges << JoinCsv(row) << '\n';
  }
}

void SaveGraphCsv(const PartitionedGraph& graph,
                  const std::filesystem::path& nodes_csv,
                  const std::filesystem::path& edges_csv) {
  std::ofstream nodes(nodes_csv);
  if (!nodes) throw ValidationError("cannot write " + nodes_csv.string());
  std::ofstream edges(edges_csv);
  if (!edges) throw ValidationError("cannot write " + edges_csv.string());
  WriteGraphCsv(graph, nodes, edges);
}

}  // namespace fedgnn
