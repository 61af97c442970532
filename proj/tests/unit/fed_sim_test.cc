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
#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "fedgnn/datagen.h"
#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "test_graphs.h"

namespace fedgnn {
namespace {

using ::testing::HasSubstr;

std::string MetricsCsv(const ExperimentResult& r) {
  std::ostringstream os;
  WriteMetricsCsv(os, r.metrics);
  return os.str();
}

ParamSet Filled(double x) {
  ParamSet p;
  p.layers = {Matrix::Constant(2, 2, x)};
  p.edge_head = Matrix::Constant(2, 2, x);
  p.task_head = Matrix::Constant(2, 2, x);
  return p;
}

ClientOutput Output(ClientId c, double x) {
  ClientOutput o;
  o.client = c;
  o.params = Filled(x);
  o.grad_ma = Filled(-x);
  return o;
}

Hyperparams Small(Algorithm algorithm) {
  Hyperparams h;
  h.algorithm = algorithm;
  h.rounds = 3;
  h.local_steps = 2;
  h.batch_size = 8;
  h.fanouts = {4, 4};
  h.lr = 0.2;
  return h;
}

PartitionedGraph Toy() {
  GenSpec spec;
  spec.nodes = 120;
  spec.clients = 3;
  spec.seed = 4;
  return GenPlantedCycles(spec);
}

TEST(AlgorithmNameTest, RoundTrips) {
  for (Algorithm a : {Algorithm::kCeFedGnn, Algorithm::kFedAvg,
                      Algorithm::kSingleClient, Algorithm::kStaleEmb,
                      Algorithm::kNoGradMa}) {
    EXPECT_EQ(ParseAlgorithm(ToString(a)), a);
  }
  EXPECT_THROW(ParseAlgorithm("fedprox"), ValidationError);
}

TEST(HyperparamsTest, RejectsOutOfRange) {
  Hyperparams h;
  EXPECT_NO_THROW(ValidateHyperparams(h));
  h.gamma = 0.0;
  EXPECT_THROW(ValidateHyperparams(h), ConfigError);
  h = Hyperparams{};
  h.local_steps = 0;
  EXPECT_THROW(ValidateHyperparams(h), ConfigError);
  h = Hyperparams{};
  h.noise.sigma0 = -1;
  EXPECT_THROW(ValidateHyperparams(h), ConfigError);
}

TEST(ServerRoundTest, AveragesInClientOrder) {
  std::vector<ClientOutput> outs = {Output(1, 3.0), Output(0, 1.0)};
  const ServerOutput s = ServerRound(std::move(outs), 2, Hyperparams{}, 1, nullptr);
  EXPECT_EQ(s.params.layers[0](0, 0), 2.0);
  EXPECT_EQ(s.grad_ma.task_head(1, 1), -2.0);
}

TEST(ServerRoundTest, MissingOrExtraOutputIsProtocolError) {
  std::vector<ClientOutput> missing = {Output(0, 1.0), Output(2, 1.0)};
  EXPECT_THROW(ServerRound(missing, 3, Hyperparams{}, 1, nullptr), ProtocolError);
  std::vector<ClientOutput> dup = {Output(0, 1.0), Output(0, 1.0)};
  EXPECT_THROW(ServerRound(dup, 2, Hyperparams{}, 1, nullptr), ProtocolError);
  std::vector<ClientOutput> extra = {Output(0, 1.0), Output(1, 1.0)};
  EXPECT_THROW(ServerRound(extra, 1, Hyperparams{}, 1, nullptr), ProtocolError);
}

TEST(ServerRoundTest, StoresReleasesAndCountsThem) {
  GlobalEmbeddingBuffer buffer;
  std::vector<ClientOutput> outs = {Output(0, 0.0), Output(1, 0.0)};
  outs[0].released.emplace_back(5, Vector::Constant(2, 1.0));
  outs[1].released.emplace_back(9, Vector::Constant(2, 2.0));
  EXPECT_EQ(ServerRound(outs, 2, Hyperparams{}, 1, &buffer).stored, 2u);
  outs[0].released[0].second = Vector::Constant(2, 7.0);
  ServerRound(outs, 2, Hyperparams{}, 2, &buffer);
  ASSERT_NE(buffer.Find(5), nullptr);
  EXPECT_EQ((*buffer.Find(5))(0), 7.0);
  EXPECT_EQ(buffer.releases(5), 2);
  EXPECT_EQ(buffer.entries().at(5).round, 2);
  EXPECT_EQ(buffer.releases(4), 0);
  EXPECT_EQ(buffer.Find(4), nullptr);
  EXPECT_EQ(buffer.Lookup()(9), buffer.Find(9));
}

TEST(ServerRoundTest, AggregateNoiseIsSeededPerRound) {
  Hyperparams h;
  h.noise.sigma1 = 0.1;
  std::vector<ClientOutput> outs = {Output(0, 1.0)};
  const ServerOutput a = ServerRound(outs, 1, h, 1, nullptr);
  const ServerOutput b = ServerRound(outs, 1, h, 1, nullptr);
  const ServerOutput c = ServerRound(outs, 1, h, 2, nullptr);
  EXPECT_EQ(a.params.layers[0], b.params.layers[0]);
  EXPECT_NE(a.params.layers[0], c.params.layers[0]);
  EXPECT_NE(a.params.layers[0](0, 0), 1.0);
  EXPECT_EQ(a.grad_ma.layers[0](0, 0), -1.0);
}

TEST(ServerRoundTest, IdenticalInputsPassThroughAndOppositesCancel) {
  std::vector<ClientOutput> same = {Output(0, 0.1), Output(1, 0.1), Output(2, 0.1)};
  EXPECT_EQ(ServerRound(same, 3, Hyperparams{}, 1, nullptr).params.layers[0],
            Filled(0.1).layers[0]);
  std::vector<ClientOutput> opposite = {Output(0, 0.7), Output(1, -0.7)};
  EXPECT_EQ(ServerRound(opposite, 2, Hyperparams{}, 1, nullptr)
                .params.edge_head.cwiseAbs()
                .maxCoeff(),
            0.0);
}

TEST(ServerRoundTest, AggregationIsLinear) {
  std::vector<ClientOutput> base = {Output(0, 0.3), Output(1, 1.1)};
  std::vector<ClientOutput> scaled = {Output(0, 0.3 * 4), Output(1, 1.1 * 4)};
  const ServerOutput a = ServerRound(base, 2, Hyperparams{}, 1, nullptr);
  const ServerOutput b = ServerRound(scaled, 2, Hyperparams{}, 1, nullptr);
  EXPECT_NEAR((4.0 * a.params.task_head - b.params.task_head).norm(), 0.0, 1e-15);
}

TEST(CommReportTest, EmptyLedgerIsZero) {
  const CommSummary s = CommReport(CommLedger{});
  EXPECT_EQ(s.rounds, 0u);
  EXPECT_EQ(s.total.bytes_up() + s.total.bytes_down(), 0u);
  EXPECT_TRUE(s.cumulative_bytes.empty());
}

TEST(ParamBytesTest, CountsHeadersAndElements) {
  ModelConfig config;
  config.dims = {3, 4, 4};
  const ModelParams p = InitParams(config, 1);
  // 16+8*12, 16+8*16, 16+8*16, 16+8*8.
  EXPECT_EQ(ParamBytes(p.weights, TaskKind::kEdge), 480u);
  EXPECT_EQ(ParamBytes(p.weights, TaskKind::kNode), 336u);
}

TEST(ClassWeightsTest, BalanceTrainingCounts) {
  const auto g = Toy();
  const TaskData d = MakeTaskData(g, TaskKind::kEdge, 1, true);
  double plain = 0.0;
  double weighted = 0.0;
  for (EdgeId e = 0; e < g.num_edges(); ++e) {
    if (d.split.edges[e] != Split::kTrain) continue;
    plain += 1.0;
    weighted += d.class_weights[g.edge(e).label];
  }
  EXPECT_NEAR(weighted, plain, 1e-9);
  EXPECT_GT(d.class_weights[1], d.class_weights[0]);
  const TaskData flat = MakeTaskData(g, TaskKind::kEdge, 1, false);
  EXPECT_EQ(flat.class_weights, (std::vector<double>{1.0, 1.0}));
}

TEST(MinibatchTargetsTest, CrossEdgesGetHalfWeight) {
  const auto g = PartitionedGraph::Build(
      {{0, 0, kNoLabel, {1.0}}, {1, 0, kNoLabel, {1.0}}, {2, 1, kNoLabel, {1.0}}},
      {{0, 0, 1, 0, {}}, {1, 1, 2, 0, {}}}, 2);
  const TaskData d = MakeTaskData(g, TaskKind::kEdge, 1, false);
  Minibatch mb;
  mb.seed_edges = {0, 1};
  const auto t = MinibatchTargets(d, mb);
  ASSERT_EQ(t.size(), 2u);
  EXPECT_EQ(t[0].weight, 1.0);
  EXPECT_EQ(t[1].weight, 0.5);
}

// One local step with gamma = beta = 1, full neighborhoods and a batch that
// covers the pool is plain gradient descent on the client's full loss.
TEST(LocalUpdateTest, SingleStepIsPlainGradientDescent) {
  const auto g = testing::RandomGraph(30, 20, 1, 3, 2, 5, false);
  const TaskData d = MakeTaskData(g, TaskKind::kEdge, 2, true);
  const ModelConfig config = MakeModelConfig(g, TaskKind::kEdge, {4, 4});
  Hyperparams h;
  h.local_steps = 1;
  h.gamma = 1.0;
  h.beta = 1.0;
  h.lr = 0.3;
  h.batch_size = 1000;
  h.fanouts = {0, 0};
  auto clients = MakeClients(d, config, h);
  const ModelParams p0 = InitParams(config, 3);
  const ClientOutput out = LocalUpdate(clients[0], p0, ParamSet::ZerosLike(p0.weights),
                                       nullptr, d, h, 1);

  std::vector<Target> targets;
  for (EdgeId e : clients[0].pool.edges) {
    targets.push_back({g.edge(e).src, g.edge(e).dst, true, g.edge(e).label,
                       d.class_weights[g.edge(e).label]});
  }
  const ForwardTrace trace = ForwardExact(p0, GraphView::Full(g), targets);
  ParamSet expected = p0.weights;
  expected.Axpy(-h.lr, Backward(trace, p0).weights);
  for (std::size_t i = 0; i < expected.num_tensors(); ++i) {
    EXPECT_LE((out.params.tensor(i) - expected.tensor(i)).cwiseAbs().maxCoeff(),
              1e-12)
        << expected.tensor_name(i);
  }
  EXPECT_LE((out.grad_ma.tensor(0) - Backward(trace, p0).weights.tensor(0))
                .cwiseAbs()
                .maxCoeff(),
            1e-12);
}

TEST(LocalUpdateTest, NonFiniteParameterNamesRoundAndStep) {
  const auto g = Toy();
  const TaskData d = MakeTaskData(g, TaskKind::kEdge, 1, true);
  const ModelConfig config = MakeModelConfig(g, TaskKind::kEdge, {4, 4});
  const Hyperparams h = Small(Algorithm::kCeFedGnn);
  auto clients = MakeClients(d, config, h);
  ModelParams p = InitParams(config, 1);
  p.weights.edge_head(0, 0) = std::numeric_limits<double>::quiet_NaN();
  try {
    LocalUpdate(clients[0], p, ParamSet::ZerosLike(p.weights), nullptr, d, h, 4);
    FAIL();
  } catch (const NumericError& e) {
    EXPECT_THAT(e.what(), HasSubstr("round 4 step 0"));
  }
}

TEST(LocalUpdateTest, ReleasesOnlyTouchedBoundaryNodes) {
  const auto g = Toy();
  const TaskData d = MakeTaskData(g, TaskKind::kEdge, 1, true);
  const ModelConfig config = MakeModelConfig(g, TaskKind::kEdge, {4, 4});
  const Hyperparams h = Small(Algorithm::kCeFedGnn);
  auto clients = MakeClients(d, config, h);
  const ModelParams p = InitParams(config, 1);
  const ClientOutput out = LocalUpdate(clients[1], p, ParamSet::ZerosLike(p.weights),
                                       nullptr, d, h, 1);
  ASSERT_FALSE(out.released.empty());
  for (const auto& [v, value] : out.released) {
    EXPECT_TRUE(std::binary_search(clients[1].boundary.begin(),
                                   clients[1].boundary.end(), v));
    EXPECT_EQ(value, clients[1].embeddings.act(v, 2).transpose());
  }
}

TEST(ExperimentTest, SameSeedSameMetrics) {
  const auto g = Toy();
  const ModelConfig config = MakeModelConfig(g, TaskKind::kEdge, {4, 4});
  const Hyperparams h = Small(Algorithm::kCeFedGnn);
  const auto a = RunExperiment(g, config, h);
  const auto b = RunExperiment(g, config, h);
  EXPECT_EQ(MetricsCsv(a), MetricsCsv(b));
  Hyperparams other = h;
  other.seed = 8;
  EXPECT_NE(MetricsCsv(a), MetricsCsv(RunExperiment(g, config, other)));
}

TEST(ExperimentTest, ThreadCountDoesNotChangeResults) {
  const auto g = Toy();
  const ModelConfig config = MakeModelConfig(g, TaskKind::kEdge, {4, 4});
  Hyperparams h = Small(Algorithm::kCeFedGnn);
  const auto serial = RunExperiment(g, config, h);
  h.threads = 3;
  const auto parallel = RunExperiment(g, config, h);
  EXPECT_EQ(MetricsCsv(serial), MetricsCsv(parallel));
  EXPECT_EQ(serial.release_log, parallel.release_log);
}

TEST(ExperimentTest, FedAvgMatchesCeWithoutCrossEdges) {
  // Two components, one per client.
  auto a = testing::RandomGraph(40, 30, 1, 3, 2, 1, false);
  std::vector<NodeRecord> nodes;
  std::vector<EdgeRecord> edges;
  for (int copy = 0; copy < 2; ++copy) {
    for (NodeId v = 0; v < a.num_nodes(); ++v) {
      const auto f = a.features().row(v);
      nodes.push_back({copy * 100 + v, static_cast<ClientId>(copy), kNoLabel,
                       std::vector<double>(f.begin(), f.end())});
    }
    for (EdgeId e = 0; e < a.num_edges(); ++e) {
      const auto& ed = a.edge(e);
      edges.push_back({copy * 1000 + e, copy * 100 + ed.src,
                       copy * 100 + ed.dst, ed.label, {}});
    }
  }
  const auto g = PartitionedGraph::Build(nodes, edges, 2);
  const ModelConfig config = MakeModelConfig(g, TaskKind::kEdge, {4, 4});
  const auto ce = RunExperiment(g, config, Small(Algorithm::kCeFedGnn));
  const auto fa = RunExperiment(g, config, Small(Algorithm::kFedAvg));
  EXPECT_EQ(MetricsCsv(ce), MetricsCsv(fa));
  EXPECT_EQ(ce.final_params.weights.layers[0], fa.final_params.weights.layers[0]);
  EXPECT_TRUE(ce.release_log.empty());
}

TEST(ExperimentTest, NoGradMaIsBetaOne) {
  const auto g = Toy();
  const ModelConfig config = MakeModelConfig(g, TaskKind::kEdge, {4, 4});
  Hyperparams ce = Small(Algorithm::kCeFedGnn);
  ce.beta = 1.0;
  const auto a = RunExperiment(g, config, ce);
  const auto b = RunExperiment(g, config, Small(Algorithm::kNoGradMa));
  EXPECT_EQ(MetricsCsv(a), MetricsCsv(b));
}

TEST(ExperimentTest, ReleaseLogHoldsOnlyBoundaryNodesOfTheReleaser) {
  const auto g = Toy();
  const ModelConfig config = MakeModelConfig(g, TaskKind::kEdge, {4, 4});
  const auto r = RunExperiment(g, config, Small(Algorithm::kCeFedGnn));
  ASSERT_FALSE(r.release_log.empty());
  for (const auto& [client, v] : r.release_log) {
    EXPECT_EQ(g.host(v), client);
    const auto b = BoundaryNodes(g, client);
    EXPECT_TRUE(std::binary_search(b.begin(), b.end(), v)) << v;
  }
  std::size_t released = 0;
  for (const auto& m : r.metrics) released += m.emb_released;
  EXPECT_EQ(released, r.release_log.size());
  for (const auto& [v, entry] : r.buffer.entries()) {
    const auto n = std::count_if(r.release_log.begin(), r.release_log.end(),
                                 [v = v](const auto& p) { return p.second == v; });
    EXPECT_EQ(entry.releases, n);
  }
}

TEST(ExperimentTest, DoublingKHalvesParameterBytes) {
  const auto g = Toy();
  const ModelConfig config = MakeModelConfig(g, TaskKind::kEdge, {4, 4});
  Hyperparams h = Small(Algorithm::kCeFedGnn);
  h.rounds = 8;
  h.local_steps = 2;
  const auto a = RunExperiment(g, config, h);
  h.rounds = 4;
  h.local_steps = 4;
  const auto b = RunExperiment(g, config, h);
  EXPECT_EQ(a.ledger.Total().param_bytes_up, 2 * b.ledger.Total().param_bytes_up);
  EXPECT_EQ(a.ledger.Total().param_bytes_down,
            2 * b.ledger.Total().param_bytes_down);
  EXPECT_EQ(a.ledger.Total().param_bytes_up,
            8u * 2 * 3 * ParamBytes(a.final_params.weights, TaskKind::kEdge));
}

TEST(ExperimentTest, CommReportAccumulates) {
  const auto g = Toy();
  const ModelConfig config = MakeModelConfig(g, TaskKind::kEdge, {4, 4});
  const auto r = RunExperiment(g, config, Small(Algorithm::kCeFedGnn));
  const CommSummary s = CommReport(r.ledger);
  ASSERT_EQ(s.rounds, 3u);
  ASSERT_EQ(s.cumulative_bytes.size(), 3u);
  EXPECT_TRUE(std::is_sorted(s.cumulative_bytes.begin(), s.cumulative_bytes.end()));
  EXPECT_EQ(s.cumulative_bytes.back(), s.total.bytes_up() + s.total.bytes_down());
  EXPECT_EQ(s.total.embedding_bytes_up, (8u + 8u * 4) * s.total.embeddings_up);
  EXPECT_GE(s.total.embeddings_down, s.total.embeddings_up);
  std::ostringstream os;
  WriteCommCsv(os, r.ledger);
  const std::string csv = os.str();
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 4);
}

TEST(ExperimentTest, SingleClientSendsNothing) {
  const auto g = Toy();
  const ModelConfig config = MakeModelConfig(g, TaskKind::kEdge, {4, 4});
  const auto r = RunExperiment(g, config, Small(Algorithm::kSingleClient));
  EXPECT_EQ(r.ledger.Total().bytes_up(), 0u);
  EXPECT_EQ(r.ledger.Total().bytes_down(), 0u);
  EXPECT_EQ(r.client_params.size(), 3u);
  EXPECT_TRUE(r.release_log.empty());
}

TEST(ExperimentTest, FedAvgReleasesNothing) {
  const auto g = Toy();
  const ModelConfig config = MakeModelConfig(g, TaskKind::kEdge, {4, 4});
  const auto r = RunExperiment(g, config, Small(Algorithm::kFedAvg));
  EXPECT_TRUE(r.release_log.empty());
  EXPECT_EQ(r.ledger.Total().embedding_bytes_up, 0u);
  EXPECT_GT(r.ledger.Total().param_bytes_up, 0u);
}

TEST(ExperimentTest, NodeTaskRuns) {
  GenSpec spec;
  spec.generator = Generator::kSbmNodes;
  spec.nodes = 90;
  spec.clients = 3;
  const auto g = Generate(spec);
  ASSERT_EQ(InferTask(g), TaskKind::kNode);
  const ModelConfig config = MakeModelConfig(g, TaskKind::kNode, {4, 4});
  EXPECT_EQ(config.num_classes, 3);
  const auto r = RunExperiment(g, config, Small(Algorithm::kCeFedGnn));
  ASSERT_EQ(r.metrics.size(), 3u);
  EXPECT_GT(r.metrics.back().mean_macro_f1, 0.0);
}

TEST(ExperimentTest, MetricsCsvHeaderAndTiming) {
  const auto g = Toy();
  const ModelConfig config = MakeModelConfig(g, TaskKind::kEdge, {4, 4});
  std::vector<int> seen;
  const auto r = RunExperiment(g, config, Small(Algorithm::kCeFedGnn),
                               [&](const RoundMetrics& m) { seen.push_back(m.round); });
  EXPECT_EQ(seen, (std::vector<int>{1, 2, 3}));
  const std::string csv = MetricsCsv(r);
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "round,mean_macro_f1,grad_norm_sq,bytes_up,bytes_down,emb_released,"
            "wall_ms");
  for (const auto& m : r.metrics) EXPECT_EQ(m.wall_ms, 0.0);
}

}  // namespace
}  // namespace fedgnn
