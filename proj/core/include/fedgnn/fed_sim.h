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

#ifndef FEDGNN_FED_SIM_H_
#define FEDGNN_FED_SIM_H_

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <string_view>
#include <utility>
#include <vector>

#include "fedgnn/common.h"
#include "fedgnn/estimators.h"
#include "fedgnn/forward.h"
#include "fedgnn/graph.h"
#include "fedgnn/model.h"
#include "fedgnn/privacy.h"
#include "fedgnn/sampling.h"

namespace fedgnn {

enum class Algorithm { kCeFedGnn, kFedAvg, kSingleClient, kStaleEmb, kNoGradMa };

std::string_view ToString(Algorithm a);
Algorithm ParseAlgorithm(std::string_view s);

struct Hyperparams {
  Algorithm algorithm = Algorithm::kCeFedGnn;
  int rounds = 50;       // R
  int local_steps = 8;   // K
  double lr = 0.1;       // eta
  double gamma = 0.5;
  double beta = 0.9;
  int batch_size = 64;   // B0
  std::vector<int> fanouts = {10, 10};
  RemoteMode remote_mode = RemoteMode::kExclude;
  bool class_weighting = true;
  NoiseConfig noise;
  std::uint64_t seed = 7;
  Split eval_split = Split::kTest;
  bool track_grad_norm = true;
  // Wall-clock timing in metrics; off keeps metrics byte-reproducible.
  bool timing = false;
  int threads = 1;
};

// Throws ConfigError naming the offending field.
void ValidateHyperparams(const Hyperparams& h);

// Model shape for a graph: d0 from the features, `hidden` for every layer
// (the last one is the embedding width), classes from the labels.
ModelConfig MakeModelConfig(const PartitionedGraph& graph, TaskKind task,
                            std::vector<int> hidden,
                            Architecture arch = Architecture::kSageMean,
                            Activation act = Activation::kTanh);

// Task type implied by which entity carries labels (edges win).
TaskKind InferTask(const PartitionedGraph& graph);

struct BufferEntry {
  Vector value;
  int round = 0;     // round of the most recent release
  int releases = 0;  // R'(v)
};

// Server-side store of released final-layer embeddings of boundary nodes.
class GlobalEmbeddingBuffer {
 public:
  const Vector* Find(NodeId v) const;
  // Overwrites the value and counts one more release.
  void Store(NodeId v, Vector value, int round);
  int releases(NodeId v) const;
  std::size_t size() const { return entries_.size(); }
  const std::map<NodeId, BufferEntry>& entries() const { return entries_; }
  EmbeddingLookup Lookup() const;

 private:
  std::map<NodeId, BufferEntry> entries_;
};

inline constexpr std::uint64_t kBytesPerElement = 8;
inline constexpr std::uint64_t kTensorHeaderBytes = 16;
inline constexpr std::uint64_t kEmbeddingHeaderBytes = 8;

struct RoundComm {
  std::uint64_t param_bytes_up = 0;  // parameters and gradient averages
  std::uint64_t param_bytes_down = 0;
  std::uint64_t embedding_bytes_up = 0;
  std::uint64_t embedding_bytes_down = 0;
  std::uint64_t tensors_up = 0;
  std::uint64_t tensors_down = 0;
  std::uint64_t embeddings_up = 0;
  std::uint64_t embeddings_down = 0;

  std::uint64_t bytes_up() const { return param_bytes_up + embedding_bytes_up; }
  std::uint64_t bytes_down() const {
    return param_bytes_down + embedding_bytes_down;
  }
};

class CommLedger {
 public:
  void Add(const RoundComm& round) { rounds_.push_back(round); }
  const std::vector<RoundComm>& rounds() const { return rounds_; }
  RoundComm Total() const;

 private:
  std::vector<RoundComm> rounds_;
};

struct CommSummary {
  std::size_t rounds = 0;
  RoundComm total;
  // Running totals of bytes_up + bytes_down after each round.
  std::vector<std::uint64_t> cumulative_bytes;
};

CommSummary CommReport(const CommLedger& ledger);
void WriteCommCsv(std::ostream& os, const CommLedger& ledger);

// Bytes to ship every tensor the task uses once.
std::uint64_t ParamBytes(const ParamSet& params, TaskKind task);

// Training data shared read-only by all clients.
struct TaskData {
  const PartitionedGraph* graph = nullptr;
  TaskKind task = TaskKind::kEdge;
  DataSplit split;
  std::vector<double> class_weights;  // indexed by label
};

TaskData MakeTaskData(const PartitionedGraph& graph, TaskKind task,
                      std::uint64_t seed, bool class_weighting);

// Inverse-frequency weights over the training targets, normalized so the
// weighted count equals the plain count. Unseen classes get weight 1.
std::vector<double> ClassWeights(const TaskData& data, int num_classes);

struct ClientState {
  ClientId id = 0;
  GraphView view;
  SeedPool pool;
  EmbeddingState embeddings;
  std::vector<NodeId> boundary;  // sorted
  // Private model for SINGLE_CLIENT, which never aggregates.
  ModelParams own_params;
  ParamSet own_grad;
};

std::vector<ClientState> MakeClients(const TaskData& data,
                                     const ModelConfig& config,
                                     const Hyperparams& h);

struct ClientOutput {
  ClientId client = 0;
  ParamSet params;
  ParamSet grad_ma;
  // Final-layer embeddings of boundary nodes touched this round, sorted.
  std::vector<std::pair<NodeId, Vector>> released;
  int empty_steps = 0;
};

// Targets for a minibatch with class and cross-edge share weights.
std::vector<Target> MinibatchTargets(const TaskData& data, const Minibatch& batch);

// K local steps of Algorithm-style training on one client. Reads the buffer
// as of the previous round. Throws NumericError on a non-finite tensor.
ClientOutput LocalUpdate(ClientState& client, const ModelParams& params_in,
                         const ParamSet& grad_in,
                         const GlobalEmbeddingBuffer* buffer,
                         const TaskData& data, const Hyperparams& h, int round);

struct ServerOutput {
  ParamSet params;
  ParamSet grad_ma;
  std::size_t stored = 0;  // embeddings written into the buffer
};

// Means parameters and gradient averages in ascending client order, noises
// the aggregates when configured, and stores released embeddings. Throws
// ProtocolError unless exactly one output per client is present.
ServerOutput ServerRound(std::vector<ClientOutput> outputs, ClientId num_clients,
                         const Hyperparams& h, int round,
                         GlobalEmbeddingBuffer* buffer);

struct RoundMetrics {
  int round = 0;
  double mean_macro_f1 = 0.0;
  std::vector<double> client_f1;  // NaN for clients with no held-out targets
  double grad_norm_sq = 0.0;
  std::uint64_t bytes_up = 0;
  std::uint64_t bytes_down = 0;
  std::uint64_t emb_released = 0;
  double wall_ms = 0.0;
};

struct ExperimentResult {
  ModelConfig config;
  std::vector<RoundMetrics> metrics;
  ModelParams final_params;
  std::vector<ModelParams> client_params;  // SINGLE_CLIENT only
  GlobalEmbeddingBuffer buffer;
  CommLedger ledger;
  // Every released node with the client that released it, in release order.
  std::vector<std::pair<ClientId, NodeId>> release_log;
};

using RoundCallback = std::function<void(const RoundMetrics&)>;

ExperimentResult RunExperiment(const PartitionedGraph& graph,
                               const ModelConfig& config, const Hyperparams& h,
                               const RoundCallback& on_round = {});

// Macro-F1 of one client's held-out targets, or NaN if it has none.
double EvaluateClient(const ModelParams& params, const TaskData& data,
                      ClientId client, Split split,
                      const GlobalEmbeddingBuffer* buffer, RemoteMode mode);

// Squared norm of the full-graph training gradient on the intra-client view.
double FullGradientNormSq(const ModelParams& params, const TaskData& data);

void WriteMetricsCsv(std::ostream& os, const std::vector<RoundMetrics>& metrics);

}  // namespace fedgnn

#endif  // FEDGNN_FED_SIM_H_
