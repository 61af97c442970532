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

#include "fedgnn/fed_sim.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <ostream>
#include <set>
#include <string>
#include <thread>

#include "fedgnn/csv.h"
#include "fedgnn/metrics.h"
#include "fedgnn/rng.h"

namespace fedgnn {
namespace {

bool ExchangesEmbeddings(Algorithm a) {
  return a == Algorithm::kCeFedGnn || a == Algorithm::kStaleEmb ||
         a == Algorithm::kNoGradMa;
}

bool DropsCrossEdges(Algorithm a) {
  return a == Algorithm::kFedAvg || a == Algorithm::kSingleClient;
}

RemoteMode EffectiveMode(const Hyperparams& h) {
  return ExchangesEmbeddings(h.algorithm) ? h.remote_mode : RemoteMode::kExclude;
}

double EffectiveBeta(const Hyperparams& h) {
  return h.algorithm == Algorithm::kNoGradMa ? 1.0 : h.beta;
}

void CheckFinite(const ParamSet& p, const char* what, int round, int step) {
  for (std::size_t i = 0; i < p.num_tensors(); ++i) {
    if (!p.tensor(i).allFinite()) {
      throw NumericError(std::string("non-finite ") + what + " tensor " +
                         p.tensor_name(i) + " at round " + std::to_string(round) +
                         " step " + std::to_string(step));
    }
  }
}

std::vector<Target> HeldOutTargets(const TaskData& data, ClientId client,
                                   Split split) {
  const auto& g = *data.graph;
  std::vector<Target> out;
  if (data.task == TaskKind::kEdge) {
    for (EdgeId e : g.client_edges(client)) {
      if (data.split.edges[e] != split) continue;
      const auto& ed = g.edge(e);
      if (ed.label < 0) continue;
      out.push_back({ed.src, ed.dst, true, ed.label, 1.0});
    }
  } else {
    for (NodeId v : g.client_nodes(client)) {
      if (data.split.nodes[v] != split || g.node_label(v) < 0) continue;
      out.push_back({v, v, false, g.node_label(v), 1.0});
    }
  }
  return out;
}

std::vector<Label> Predict(const ForwardTrace& trace) {
  std::vector<Label> out(static_cast<std::size_t>(trace.logits.rows()));
  for (Eigen::Index t = 0; t < trace.logits.rows(); ++t) {
    Eigen::Index best = 0;
    trace.logits.row(t).maxCoeff(&best);
    out[static_cast<std::size_t>(t)] = static_cast<Label>(best);
  }
  return out;
}

}  // namespace

std::string_view ToString(Algorithm a) {
  switch (a) {
    case Algorithm::kCeFedGnn: return "ce_fedgnn";
    case Algorithm::kFedAvg: return "fedavg";
    case Algorithm::kSingleClient: return "single_client";
    case Algorithm::kStaleEmb: return "stale_emb";
    case Algorithm::kNoGradMa: return "no_grad_ma";
  }
  return "unknown";
}

Algorithm ParseAlgorithm(std::string_view s) {
  for (Algorithm a : {Algorithm::kCeFedGnn, Algorithm::kFedAvg,
                      Algorithm::kSingleClient, Algorithm::kStaleEmb,
                      Algorithm::kNoGradMa}) {
    if (s == ToString(a)) return a;
  }
  throw ValidationError("unknown algorithm '" + std::string(s) + "'");
}

void ValidateHyperparams(const Hyperparams& h) {
  auto bad = [](const std::string& what) { throw ConfigError(what); };
  if (h.rounds < 1) bad("rounds must be >= 1");
  if (h.local_steps < 1) bad("k_local must be >= 1");
  if (h.batch_size < 1) bad("batch_size must be >= 1");
  if (!(h.lr > 0.0 && h.lr <= 1.0)) bad("lr must be in (0, 1]");
  if (!(h.gamma > 0.0 && h.gamma <= 1.0)) bad("gamma must be in (0, 1]");
  if (!(h.beta > 0.0 && h.beta <= 1.0)) bad("beta must be in (0, 1]");
  if (h.fanouts.empty()) bad("fanouts must not be empty");
  if (h.threads < 1) bad("threads must be >= 1");
  ValidateNoise(h.noise);
}

TaskKind InferTask(const PartitionedGraph& graph) {
  if (graph.has_edge_labels()) return TaskKind::kEdge;
  if (graph.has_node_labels()) return TaskKind::kNode;
  throw ValidationError("graph has neither edge nor node labels");
}

ModelConfig MakeModelConfig(const PartitionedGraph& graph, TaskKind task,
                            std::vector<int> hidden, Architecture arch,
                            Activation act) {
  ModelConfig c;
  c.architecture = arch;
  c.activation = act;
  c.task = task;
  c.dims.push_back(static_cast<int>(graph.feature_dim()));
  c.dims.insert(c.dims.end(), hidden.begin(), hidden.end());
  c.num_classes = std::max(graph.num_classes(), 2);
  ValidateConfig(c);
  return c;
}

const Vector* GlobalEmbeddingBuffer::Find(NodeId v) const {
  auto it = entries_.find(v);
  return it == entries_.end() ? nullptr : &it->second.value;
}

void GlobalEmbeddingBuffer::Store(NodeId v, Vector value, int round) {
  BufferEntry& e = entries_[v];
  e.value = std::move(value);
  e.round = round;
  ++e.releases;
}

int GlobalEmbeddingBuffer::releases(NodeId v) const {
  auto it = entries_.find(v);
  return it == entries_.end() ? 0 : it->second.releases;
}

EmbeddingLookup GlobalEmbeddingBuffer::Lookup() const {
  return [this](NodeId v) { return Find(v); };
}

RoundComm CommLedger::Total() const {
  RoundComm t;
  for (const RoundComm& r : rounds_) {
    t.param_bytes_up += r.param_bytes_up;
    t.param_bytes_down += r.param_bytes_down;
    t.embedding_bytes_up += r.embedding_bytes_up;
    t.embedding_bytes_down += r.embedding_bytes_down;
    t.tensors_up += r.tensors_up;
    t.tensors_down += r.tensors_down;
    t.embeddings_up += r.embeddings_up;
    t.embeddings_down += r.embeddings_down;
  }
  return t;
}

CommSummary CommReport(const CommLedger& ledger) {
  CommSummary s;
  s.rounds = ledger.rounds().size();
  s.total = ledger.Total();
  std::uint64_t running = 0;
  for (const RoundComm& r : ledger.rounds()) {
    running += r.bytes_up() + r.bytes_down();
    s.cumulative_bytes.push_back(running);
  }
  return s;
}

void WriteCommCsv(std::ostream& os, const CommLedger& ledger) {
  os << "round,param_bytes_up,param_bytes_down,embedding_bytes_up,"
        "embedding_bytes_down,embeddings_up,embeddings_down\n";
  int round = 0;
  for (const RoundComm& r : ledger.rounds()) {
    os << ++round << ',' << r.param_bytes_up << ',' << r.param_bytes_down << ','
       << r.embedding_bytes_up << ',' << r.embedding_bytes_down << ','
       << r.embeddings_up << ',' << r.embeddings_down << '\n';
  }
}

std::uint64_t ParamBytes(const ParamSet& params, TaskKind task) {
  std::uint64_t bytes = 0;
  for (std::size_t i = 0; i < params.num_tensors(); ++i) {
    if (task == TaskKind::kNode && &params.tensor(i) == &params.edge_head) continue;
    bytes += kTensorHeaderBytes +
             kBytesPerElement * static_cast<std::uint64_t>(params.tensor(i).size());
  }
  return bytes;
}

TaskData MakeTaskData(const PartitionedGraph& graph, TaskKind task,
                      std::uint64_t seed, bool class_weighting) {
  TaskData d;
  d.graph = &graph;
  d.task = task;
  d.split = MakeSplit(graph, seed);
  const int classes = std::max(graph.num_classes(), 2);
  if (class_weighting) {
    d.class_weights = ClassWeights(d, classes);
  } else {
    d.class_weights.assign(classes, 1.0);
  }
  return d;
}

std::vector<double> ClassWeights(const TaskData& data, int num_classes) {
  const auto& g = *data.graph;
  std::vector<double> counts(num_classes, 0.0);
  double total = 0.0;
  if (data.task == TaskKind::kEdge) {
    for (EdgeId e = 0; e < g.num_edges(); ++e) {
      const Label y = g.edge(e).label;
      if (data.split.edges[e] == Split::kTrain && y >= 0) {
        counts[y] += 1.0;
        total += 1.0;
      }
    }
  } else {
    for (NodeId v = 0; v < g.num_nodes(); ++v) {
      const Label y = g.node_label(v);
      if (data.split.nodes[v] == Split::kTrain && y >= 0) {
        counts[y] += 1.0;
        total += 1.0;
      }
    }
  }
  int present = 0;
  for (double c : counts) present += c > 0.0 ? 1 : 0;
  std::vector<double> w(num_classes, 1.0);
  for (int c = 0; c < num_classes; ++c) {
    if (counts[c] > 0.0) w[c] = total / (present * counts[c]);
  }
  return w;
}

std::vector<ClientState> MakeClients(const TaskData& data,
                                     const ModelConfig& config,
                                     const Hyperparams& h) {
  const auto& g = *data.graph;
  const bool drop_cross = DropsCrossEdges(h.algorithm);
  std::vector<int> layer_dims(config.dims.begin() + 1, config.dims.end());
  std::vector<ClientState> clients;
  clients.reserve(g.num_clients());
  for (ClientId i = 0; i < g.num_clients(); ++i) {
    ClientState c;
    c.id = i;
    c.view = GraphView::Client(g, i);
    if (data.task == TaskKind::kEdge) {
      for (EdgeId e : g.client_edges(i)) {
        if (data.split.edges[e] != Split::kTrain || g.edge(e).label < 0) continue;
        if (drop_cross && g.is_cross_client(e)) continue;
        c.pool.edges.push_back(e);
      }
    } else {
      for (NodeId v : g.client_nodes(i)) {
        if (data.split.nodes[v] == Split::kTrain && g.node_label(v) >= 0) {
          c.pool.nodes.push_back(v);
        }
      }
    }
    c.embeddings = EmbeddingState(g.num_nodes(), layer_dims, config.activation);
    if (ExchangesEmbeddings(h.algorithm)) c.boundary = BoundaryNodes(g, i);
    clients.push_back(std::move(c));
  }
  return clients;
}

std::vector<Target> MinibatchTargets(const TaskData& data, const Minibatch& batch) {
  const auto& g = *data.graph;
  std::vector<Target> out;
  for (EdgeId e : batch.seed_edges) {
    const auto& ed = g.edge(e);
    const double share = g.is_cross_client(e) ? 0.5 : 1.0;
    out.push_back({ed.src, ed.dst, true, ed.label,
                   share * data.class_weights[ed.label]});
  }
  for (NodeId v : batch.seed_nodes) {
    const Label y = g.node_label(v);
    out.push_back({v, v, false, y, data.class_weights[y]});
  }
  return out;
}

ClientOutput LocalUpdate(ClientState& client, const ModelParams& params_in,
                         const ParamSet& grad_in,
                         const GlobalEmbeddingBuffer* buffer,
                         const TaskData& data, const Hyperparams& h, int round) {
  if (h.local_steps < 1) throw ConfigError("k_local must be >= 1");
  const int L = params_in.config.num_layers();
  const RemoteMode mode = EffectiveMode(h);
  const double beta = EffectiveBeta(h);

  SamplingConfig scfg;
  scfg.batch_size = h.batch_size;
  scfg.fanouts = h.fanouts;
  scfg.include_remote = RemoteLayers(params_in.config, mode);
  ForwardOptions options;
  options.remote_mode = mode;
  EmbeddingLookup lookup;
  if (buffer != nullptr) lookup = buffer->Lookup();

  ModelParams params = params_in;
  GradientMA grad{grad_in, -1};
  ClientOutput out;
  out.client = client.id;
  std::set<NodeId> touched;

  for (int k = 0; k < h.local_steps; ++k) {
    const Minibatch batch = SampleMinibatch(client.view, client.pool, scfg, L,
                                            h.seed, round, k);
    if (batch.empty()) {
      ++out.empty_steps;
      continue;
    }
    const std::vector<Target> targets = MinibatchTargets(data, batch);
    const ForwardTrace trace =
        ForwardStochastic(params, client.view, batch, targets, client.embeddings,
                          lookup, h.gamma, options);
    const Gradients grads = Backward(trace, params);
    CheckFinite(grads.weights, "gradient", round, k);
    UpdateGradient(grad, grads.weights, beta);
    params.weights.Axpy(-h.lr, grad.value);
    CheckFinite(params.weights, "parameter", round, k);
    if (!client.boundary.empty()) {
      for (NodeId v : batch.plan.sets[L]) {
        if (std::binary_search(client.boundary.begin(), client.boundary.end(), v)) {
          touched.insert(v);
        }
      }
    }
  }

  const bool raw = h.algorithm == Algorithm::kStaleEmb;
  Rng noise = MakeStream(h.seed, StreamPurpose::kEmbeddingNoise, client.id, round);
  for (NodeId v : touched) {
    Vector value = raw ? Vector(Activate(params.config.activation,
                                         Matrix(client.embeddings.message(v, L)))
                                    .transpose())
                       : Vector(client.embeddings.act(v, L).transpose());
    if (h.noise.sigma0 > 0.0) {
      ClipAndNoise(value, h.noise.clip_embed, h.noise.sigma0, noise);
    }
    out.released.emplace_back(v, std::move(value));
  }
  out.params = std::move(params.weights);
  out.grad_ma = std::move(grad.value);
  return out;
}

ServerOutput ServerRound(std::vector<ClientOutput> outputs, ClientId num_clients,
                         const Hyperparams& h, int round,
                         GlobalEmbeddingBuffer* buffer) {
  std::sort(outputs.begin(), outputs.end(),
            [](const ClientOutput& a, const ClientOutput& b) { return a.client < b.client; });
  if (outputs.size() != num_clients) {
    throw ProtocolError("expected " + std::to_string(num_clients) +
                        " client outputs, got " + std::to_string(outputs.size()));
  }
  for (ClientId i = 0; i < num_clients; ++i) {
    if (outputs[i].client != i) {
      throw ProtocolError("missing output from client " + std::to_string(i));
    }
  }
  ServerOutput s;
  s.params = ParamSet::ZerosLike(outputs[0].params);
  s.grad_ma = ParamSet::ZerosLike(outputs[0].grad_ma);
  for (const ClientOutput& o : outputs) {
    s.params.Axpy(1.0, o.params);
    s.grad_ma.Axpy(1.0, o.grad_ma);
  }
  s.params.Scale(1.0 / num_clients);
  s.grad_ma.Scale(1.0 / num_clients);
  if (h.noise.sigma1 > 0.0) {
    Rng rng = MakeStream(h.seed, StreamPurpose::kAggregateNoise, round, 0);
    ClipAndNoise(s.params, h.noise.clip_model, h.noise.sigma1, rng);
  }
  if (h.noise.sigma2 > 0.0) {
    Rng rng = MakeStream(h.seed, StreamPurpose::kAggregateNoise, round, 1);
    ClipAndNoise(s.grad_ma, h.noise.clip_model, h.noise.sigma2, rng);
  }
  if (buffer != nullptr) {
    for (ClientOutput& o : outputs) {
      for (auto& [v, value] : o.released) {
        buffer->Store(v, std::move(value), round);
        ++s.stored;
      }
    }
  }
  return s;
}

double EvaluateClient(const ModelParams& params, const TaskData& data,
                      ClientId client, Split split,
                      const GlobalEmbeddingBuffer* buffer, RemoteMode mode) {
  const std::vector<Target> targets = HeldOutTargets(data, client, split);
  if (targets.empty()) return std::numeric_limits<double>::quiet_NaN();
  const GraphView view = GraphView::Client(*data.graph, client);
  StopGradientMap released;
  if (buffer != nullptr) {
    for (const auto& [v, entry] : buffer->entries()) released.emplace(v, entry.value);
  }
  ForwardOptions options;
  options.remote_mode = buffer != nullptr ? mode : RemoteMode::kExclude;
  const ForwardTrace trace = ForwardExact(params, view, targets, released, options);
  std::vector<Label> truth;
  truth.reserve(targets.size());
  for (const Target& t : targets) truth.push_back(t.label);
  return MacroF1(truth, Predict(trace));
}

double FullGradientNormSq(const ModelParams& params, const TaskData& data) {
  const auto& g = *data.graph;
  std::vector<Target> targets;
  if (data.task == TaskKind::kEdge) {
    for (EdgeId e = 0; e < g.num_edges(); ++e) {
      const auto& ed = g.edge(e);
      if (data.split.edges[e] != Split::kTrain || ed.label < 0) continue;
      targets.push_back({ed.src, ed.dst, true, ed.label, data.class_weights[ed.label]});
    }
  } else {
    for (NodeId v = 0; v < g.num_nodes(); ++v) {
      const Label y = g.node_label(v);
      if (data.split.nodes[v] != Split::kTrain || y < 0) continue;
      targets.push_back({v, v, false, y, data.class_weights[y]});
    }
  }
  const ForwardTrace trace =
      ForwardExact(params, GraphView::IntraClient(g), targets);
  return Backward(trace, params).weights.SquaredNorm();
}

ExperimentResult RunExperiment(const PartitionedGraph& graph,
                               const ModelConfig& config, const Hyperparams& h,
                               const RoundCallback& on_round) {
  ValidateHyperparams(h);
  ValidateConfig(config);
  const TaskData data = MakeTaskData(graph, config.task, h.seed, h.class_weighting);
  std::vector<ClientState> clients = MakeClients(data, config, h);
  const ClientId n = graph.num_clients();
  const bool single = h.algorithm == Algorithm::kSingleClient;
  const bool exchange = ExchangesEmbeddings(h.algorithm);
  const RemoteMode mode = EffectiveMode(h);

  ExperimentResult result;
  result.config = config;
  ModelParams global = InitParams(config, h.seed);
  ParamSet global_grad = ParamSet::ZerosLike(global.weights);
  if (single) {
    for (ClientState& c : clients) {
      c.own_params = global;
      c.own_grad = global_grad;
    }
  }
  const std::uint64_t param_bytes = ParamBytes(global.weights, config.task);
  const std::uint64_t tensors =
      global.weights.num_tensors() - (config.task == TaskKind::kNode ? 1 : 0);
  const std::uint64_t embedding_bytes =
      kEmbeddingHeaderBytes +
      kBytesPerElement * static_cast<std::uint64_t>(config.embedding_dim());

  for (int round = 1; round <= h.rounds; ++round) {
    const auto start = std::chrono::steady_clock::now();
    std::vector<ClientOutput> outputs(n);
    auto run_client = [&](ClientId i) {
      ClientState& c = clients[i];
      if (single) {
        outputs[i] = LocalUpdate(c, c.own_params, c.own_grad, nullptr, data, h, round);
      } else {
        outputs[i] = LocalUpdate(c, global, global_grad,
                                 exchange ? &result.buffer : nullptr, data, h, round);
      }
    };
    if (h.threads > 1 && n > 1) {
      std::vector<std::thread> workers;
      std::vector<std::exception_ptr> errors(n);
      const auto width = static_cast<ClientId>(std::min<int>(h.threads, n));
      for (ClientId w = 0; w < width; ++w) {
        workers.emplace_back([&, w] {
          for (ClientId i = w; i < n; i += width) {
            try {
              run_client(i);
            } catch (...) {
              errors[i] = std::current_exception();
            }
          }
        });
      }
      for (auto& t : workers) t.join();
      for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
      }
    } else {
      for (ClientId i = 0; i < n; ++i) run_client(i);
    }

    RoundComm comm;
    RoundMetrics m;
    m.round = round;
    for (const ClientOutput& o : outputs) {
      for (const auto& [v, value] : o.released) result.release_log.emplace_back(o.client, v);
    }
    if (single) {
      for (ClientId i = 0; i < n; ++i) {
        clients[i].own_params.weights = std::move(outputs[i].params);
        clients[i].own_grad = std::move(outputs[i].grad_ma);
      }
    } else {
      // Embeddings travel to every other client hosting a neighbor.
      for (const ClientOutput& o : outputs) {
        comm.embeddings_up += o.released.size();
        for (const auto& [v, value] : o.released) {
          std::set<ClientId> dest;
          for (NodeId u : graph.neighbors(v)) {
            if (graph.host(u) != o.client) dest.insert(graph.host(u));
          }
          comm.embeddings_down += dest.size();
        }
      }
      ServerOutput s = ServerRound(std::move(outputs), n, h, round,
                                   exchange ? &result.buffer : nullptr);
      global.weights = std::move(s.params);
      global_grad = std::move(s.grad_ma);
      comm.param_bytes_up = 2 * param_bytes * n;
      comm.param_bytes_down = 2 * param_bytes * n;
      comm.tensors_up = 2 * tensors * n;
      comm.tensors_down = 2 * tensors * n;
      comm.embedding_bytes_up = embedding_bytes * comm.embeddings_up;
      comm.embedding_bytes_down = embedding_bytes * comm.embeddings_down;
    }
    result.ledger.Add(comm);

    double f1_sum = 0.0;
    int f1_count = 0;
    for (ClientId i = 0; i < n; ++i) {
      const ModelParams& p = single ? clients[i].own_params : global;
      const double f1 = EvaluateClient(p, data, i, h.eval_split,
                                       exchange ? &result.buffer : nullptr, mode);
      m.client_f1.push_back(f1);
      if (!std::isnan(f1)) {
        f1_sum += f1;
        ++f1_count;
      }
    }
    m.mean_macro_f1 = f1_count > 0 ? f1_sum / f1_count : 0.0;
    if (h.track_grad_norm) {
      if (single) {
        ModelParams mean = global;
        mean.weights.SetZero();
        for (const ClientState& c : clients) mean.weights.Axpy(1.0 / n, c.own_params.weights);
        m.grad_norm_sq = FullGradientNormSq(mean, data);
      } else {
        m.grad_norm_sq = FullGradientNormSq(global, data);
      }
    }
    m.bytes_up = comm.bytes_up();
    m.bytes_down = comm.bytes_down();
    m.emb_released = comm.embeddings_up;
    if (h.timing) {
      m.wall_ms = std::chrono::duration<double, std::milli>(
                      std::chrono::steady_clock::now() - start)
                      .count();
    }
    if (on_round) on_round(m);
    result.metrics.push_back(std::move(m));
  }

  result.final_params = global;
  if (single) {
    for (const ClientState& c : clients) result.client_params.push_back(c.own_params);
  }
  return result;
}

void WriteMetricsCsv(std::ostream& os, const std::vector<RoundMetrics>& metrics) {
  os << "round,mean_macro_f1,grad_norm_sq,bytes_up,bytes_down,emb_released,wall_ms\n";
  for (const RoundMetrics& m : metrics) {
    os << m.round << ',' << FormatDouble(m.mean_macro_f1) << ','
       << FormatDouble(m.grad_norm_sq) << ',' << m.bytes_up << ',' << m.bytes_down
       << ',' << m.emb_released << ',' << FormatDouble(m.wall_ms) << '\n';
  }
}

}  // namespace fedgnn
