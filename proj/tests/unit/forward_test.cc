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

#include "fedgnn/forward.h"

#include <algorithm>
#include <cmath>
#include <string>
#include <tuple>
#include <vector>

#include "gtest/gtest.h"
#include "test_graphs.h"

namespace fedgnn {
namespace {

using ::fedgnn::testing::RandomGraph;

std::vector<Target> AllTargets(const PartitionedGraph& g, TaskKind task) {
  std::vector<Target> out;
  if (task == TaskKind::kEdge) {
    for (EdgeId e = 0; e < g.num_edges(); ++e) {
      const auto& ed = g.edge(e);
      out.push_back({ed.src, ed.dst, true, ed.label, 1.0 + 0.25 * (e % 3)});
    }
  } else {
    for (NodeId v = 0; v < g.num_nodes(); ++v) {
      out.push_back({v, v, false, g.node_label(v), 1.0 + 0.5 * (v % 2)});
    }
  }
  return out;
}

ModelConfig SmallConfig(Architecture arch, TaskKind task) {
  ModelConfig c;
  c.architecture = arch;
  c.task = task;
  c.dims = {4, 5, 3};
  c.num_classes = 3;
  return c;
}

// Dense propagation matrix for one layer on the full graph.
Matrix DenseOperator(const PartitionedGraph& g, Architecture arch,
                     double eps) {
  const auto n = static_cast<Eigen::Index>(g.num_nodes());
  Matrix a = Matrix::Zero(n, n);
  for (EdgeId e = 0; e < g.num_edges(); ++e) {
    const auto& ed = g.edge(e);
    if (ed.src == ed.dst) continue;
    a(ed.src, ed.dst) = 1.0;
    a(ed.dst, ed.src) = 1.0;
  }
  Vector deg = a.rowwise().sum();
  Matrix op(n, n);
  switch (arch) {
    case Architecture::kSageMean:
      op = a + Matrix::Identity(n, n);
      for (Eigen::Index i = 0; i < n; ++i) op.row(i) /= deg(i) + 1.0;
      break;
    case Architecture::kGcn:
      op = a + Matrix::Identity(n, n);
      for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
          op(i, j) /= std::sqrt((deg(i) + 1.0) * (deg(j) + 1.0));
        }
      }
      break;
    case Architecture::kGin:
      op = a + (1.0 + eps) * Matrix::Identity(n, n);
      break;
  }
  return op;
}

class ArchTaskTest
    : public ::testing::TestWithParam<std::tuple<Architecture, TaskKind>> {};

TEST_P(ArchTaskTest, MatchesDenseOracle) {
  const auto [arch, task] = GetParam();
  const auto g = RandomGraph(10, 6, 1, 4, 3, 11, task == TaskKind::kNode);
  ModelConfig cfg = SmallConfig(arch, task);
  const ModelParams p = InitParams(cfg, 3);
  const auto view = GraphView::Full(g);
  const auto targets = AllTargets(g, task);
  const ForwardTrace trace = ForwardExact(p, view, targets);

  const Matrix op = DenseOperator(g, arch, cfg.gin_epsilon);
  Matrix h = g.features();
  for (int l = 0; l < cfg.num_layers(); ++l) {
    h = (op * h * p.weights.layers[l].transpose()).array().tanh().matrix();
  }
  double loss = 0.0;
  double wsum = 0.0;
  for (std::size_t t = 0; t < targets.size(); ++t) {
    Vector z = task == TaskKind::kEdge
                   ? Vector(0.5 * (h.row(targets[t].src) + h.row(targets[t].dst))
                                      .transpose())
                   : Vector(h.row(targets[t].src).transpose());
    if (task == TaskKind::kEdge) {
      z = (p.weights.edge_head * z).array().tanh().matrix();
    }
    const Vector logits = p.weights.task_head * z;
    const double lse = std::log(logits.array().exp().sum());
    loss += targets[t].weight * (lse - logits(targets[t].label));
    wsum += targets[t].weight;
  }
  EXPECT_NEAR(trace.loss, loss / wsum, 1e-12);
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    if (trace.FinalRow(v) < 0) continue;
    EXPECT_LT((trace.FinalEmbedding(v) - h.row(v).transpose()).norm(), 1e-12);
  }
}

TEST_P(ArchTaskTest, GradientMatchesFiniteDifferences) {
  const auto [arch, task] = GetParam();
  const auto g = RandomGraph(10, 6, 1, 4, 3, 5, task == TaskKind::kNode);
  ModelParams p = InitParams(SmallConfig(arch, task), 17);
  const auto view = GraphView::Full(g);
  const auto targets = AllTargets(g, task);
  const Gradients grads = Backward(ForwardExact(p, view, targets), p, true);

  constexpr double kStep = 1e-5;
  double worst = 0.0;
  for (std::size_t i = 0; i < p.weights.num_tensors(); ++i) {
    if (task == TaskKind::kNode && p.weights.tensor_name(i) == "edge_head") continue;
    Matrix& w = p.weights.tensor(i);
    for (Eigen::Index k = 0; k < w.size(); ++k) {
      const double saved = w.data()[k];
      w.data()[k] = saved + kStep;
      const double up = ForwardExact(p, view, targets).loss;
      w.data()[k] = saved - kStep;
      const double down = ForwardExact(p, view, targets).loss;
      w.data()[k] = saved;
      const double numeric = (up - down) / (2 * kStep);
      const double analytic = grads.weights.tensor(i).data()[k];
      const double rel = std::abs(numeric - analytic) /
                         std::max({std::abs(numeric), std::abs(analytic), 1e-10});
      worst = std::max(worst, rel);
      EXPECT_LE(rel, 1e-5) << p.weights.tensor_name(i) << "[" << k << "]";
    }
  }
  RecordProperty("max_rel_error", std::to_string(worst));
}

std::string ArchTaskName(
    const ::testing::TestParamInfo<std::tuple<Architecture, TaskKind>>& info) {
  return std::string(ToString(std::get<0>(info.param))) +
         (std::get<1>(info.param) == TaskKind::kEdge ? "_edge" : "_node");
}

INSTANTIATE_TEST_SUITE_P(
    AllArchitectures, ArchTaskTest,
    ::testing::Combine(::testing::Values(Architecture::kSageMean,
                                         Architecture::kGcn, Architecture::kGin),
                       ::testing::Values(TaskKind::kEdge, TaskKind::kNode)),
    ArchTaskName);

TEST(ForwardTest, InputGradientMatchesFiniteDifferences) {
  const auto g = RandomGraph(8, 4, 1, 4, 3, 9, false);
  const ModelParams p = InitParams(SmallConfig(Architecture::kGcn, TaskKind::kEdge), 2);
  const auto view = GraphView::Full(g);
  const std::vector<NodeId> roots = {2};
  const ForwardTrace trace = ForwardExact(p, view, {}, {}, {}, roots);
  // Objective: sum of the root's final embedding weighted by a fixed vector.
  const Vector dir = Vector::LinSpaced(3, 0.5, -1.0);
  Matrix d_final = Matrix::Zero(trace.layers.back().act.rows(), 3);
  d_final.row(trace.FinalRow(2)) = dir.transpose();
  const Gradients grads = BackwardFromEmbeddings(trace, p, d_final);

  for (NodeId v : trace.input_nodes) {
    const Vector analytic = grads.InputGradient(trace, v);
    for (int j = 0; j < 4; ++j) {
      auto objective = [&](double delta) {
        std::vector<NodeRecord> nodes;
        std::vector<EdgeRecord> edges;
        for (NodeId u = 0; u < g.num_nodes(); ++u) {
          NodeRecord r{static_cast<std::int64_t>(u), 0, kNoLabel, {}};
          for (int k = 0; k < 4; ++k) r.features.push_back(g.features()(u, k));
          if (u == v) r.features[j] += delta;
          nodes.push_back(r);
        }
        for (EdgeId e = 0; e < g.num_edges(); ++e) {
          edges.push_back({static_cast<std::int64_t>(e), g.edge(e).src,
                           g.edge(e).dst, g.edge(e).label, {}});
        }
        const auto g2 = PartitionedGraph::Build(nodes, edges, 1);
        const auto t2 = ForwardExact(p, GraphView::Full(g2), {}, {}, {}, roots);
        return dir.dot(t2.FinalEmbedding(2));
      };
      const double numeric = (objective(1e-6) - objective(-1e-6)) / 2e-6;
      EXPECT_NEAR(analytic(j), numeric, 1e-7) << "node " << v << " feature " << j;
    }
  }
}

// One cross-client edge between two two-node clients plus intra edges.
PartitionedGraph TwoClientGraph() {
  std::vector<NodeRecord> nodes;
  const double feats[6][3] = {{0.3, -1.2, 0.8}, {1.1, 0.4, -0.5},
                              {-0.7, 0.9, 0.2}, {0.5, 0.5, -1.0},
                              {-1.3, 0.1, 0.6}, {0.2, -0.8, 1.4}};
  for (int v = 0; v < 6; ++v) {
    nodes.push_back({v, static_cast<ClientId>(v / 3), kNoLabel,
                     {feats[v][0], feats[v][1], feats[v][2]}});
  }
  std::vector<EdgeRecord> edges = {
      {0, 0, 1, 0, {}}, {1, 1, 2, 1, {}}, {2, 0, 2, 1, {}},
      {3, 2, 3, 0, {}},  // the cross-client edge
      {4, 3, 4, 1, {}}, {5, 4, 5, 0, {}},
  };
  return PartitionedGraph::Build(nodes, edges, 2);
}

TEST(ForwardTest, StopGradientHalvesRecoverCentralizedGradient) {
  const auto g = TwoClientGraph();
  for (Architecture arch :
       {Architecture::kSageMean, Architecture::kGcn, Architecture::kGin}) {
    ModelConfig cfg = SmallConfig(arch, TaskKind::kEdge);
    cfg.dims = {3, 4, 4};
    cfg.num_classes = 2;
    const ModelParams p = InitParams(cfg, 23);

    std::vector<Target> all;
    for (EdgeId e = 0; e < g.num_edges(); ++e) {
      all.push_back({g.edge(e).src, g.edge(e).dst, true, g.edge(e).label, 1.0});
    }
    const auto central_view = GraphView::IntraClient(g);
    const ForwardTrace central = ForwardExact(p, central_view, all);
    const Gradients gc = Backward(central, p);

    ParamSet avg = ParamSet::ZerosLike(p.weights);
    ForwardOptions opts;
    opts.loss_normalizer = static_cast<double>(all.size()) / 2.0;
    for (ClientId c = 0; c < 2; ++c) {
      const auto view = GraphView::Client(g, c);
      std::vector<Target> local;
      StopGradientMap remote;
      for (const Target& t : all) {
        const bool a = view.is_local(t.src);
        const bool b = view.is_local(t.dst);
        if (!a && !b) continue;
        Target copy = t;
        if (a != b) {
          copy.weight = 0.5;
          const NodeId r = a ? t.dst : t.src;
          remote[r] = central.FinalEmbedding(r);
        }
        local.push_back(copy);
      }
      const ForwardTrace tr = ForwardExact(p, view, local, remote, opts);
      avg.Axpy(0.5, Backward(tr, p).weights);
    }
    for (std::size_t i = 0; i < avg.num_tensors(); ++i) {
      const double diff = (avg.tensor(i) - gc.weights.tensor(i)).cwiseAbs().maxCoeff();
      EXPECT_LE(diff, 1e-10) << ToString(arch) << " " << avg.tensor_name(i);
    }
  }
}

TEST(ForwardTest, RemoteEndpointReceivesNoGradient) {
  const auto g = TwoClientGraph();
  ModelConfig cfg = SmallConfig(Architecture::kSageMean, TaskKind::kEdge);
  cfg.dims = {3, 4, 4};
  cfg.num_classes = 2;
  const ModelParams p = InitParams(cfg, 1);
  const auto view = GraphView::Client(g, 0);
  StopGradientMap remote;
  remote[3] = Vector::Constant(4, 0.25);
  const std::vector<Target> t = {{2, 3, true, 0, 1.0}};
  const ForwardTrace tr = ForwardExact(p, view, t, remote);
  EXPECT_TRUE(tr.stale[0]);
  EXPECT_FALSE(tr.cold[0]);
  EXPECT_LT(tr.FinalRow(3), 0);
  const Gradients gr = Backward(tr, p, true);
  EXPECT_EQ(gr.InputGradient(tr, 3).norm(), 0.0);
}

TEST(ForwardTest, MissingRemoteValueIsColdZero) {
  const auto g = TwoClientGraph();
  ModelConfig cfg = SmallConfig(Architecture::kSageMean, TaskKind::kEdge);
  cfg.dims = {3, 4, 4};
  cfg.num_classes = 2;
  const ModelParams p = InitParams(cfg, 1);
  const std::vector<Target> t = {{2, 3, true, 0, 1.0}};
  const ForwardTrace tr = ForwardExact(p, GraphView::Client(g, 0), t);
  EXPECT_TRUE(tr.cold[0]);
  EXPECT_EQ(tr.remote_values.norm(), 0.0);
}

TEST(ForwardTest, RejectsMismatchedWeights) {
  const auto g = TwoClientGraph();
  ModelConfig cfg = SmallConfig(Architecture::kGin, TaskKind::kEdge);
  cfg.dims = {3, 4, 4};
  cfg.num_classes = 2;
  ModelParams p = InitParams(cfg, 1);
  p.weights.layers[1] = Matrix::Zero(4, 5);
  const std::vector<Target> t = {{0, 1, true, 0, 1.0}};
  try {
    ForwardExact(p, GraphView::Full(g), t);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("layer2"), std::string::npos);
  }
}

TEST(ForwardTest, EmptyTargetsGiveZeroLoss) {
  const auto g = TwoClientGraph();
  ModelConfig cfg = SmallConfig(Architecture::kGcn, TaskKind::kEdge);
  cfg.dims = {3, 4, 4};
  cfg.num_classes = 2;
  const ModelParams p = InitParams(cfg, 1);
  const ForwardTrace tr = ForwardExact(p, GraphView::Full(g), {});
  EXPECT_EQ(tr.loss, 0.0);
  EXPECT_EQ(Backward(tr, p).weights.SquaredNorm(), 0.0);
}

TEST(ForwardTest, ZeroInputGivesZeroEmbeddings) {
  std::vector<NodeRecord> nodes;
  for (int v = 0; v < 4; ++v) nodes.push_back({v, 0, kNoLabel, {0.0, 0.0}});
  const auto g = PartitionedGraph::Build(
      nodes, {{0, 0, 1, 0, {}}, {1, 1, 2, 1, {}}, {2, 2, 3, 0, {}}}, 1);
  ModelConfig config;
  config.dims = {2, 3, 3};
  const ModelParams params = InitParams(config, 5);
  const std::vector<NodeId> all = {0, 1, 2, 3};
  const ForwardTrace t = ForwardExact(params, GraphView::Full(g), {}, {}, {}, all);
  EXPECT_EQ(t.layers.back().act.cwiseAbs().maxCoeff(), 0.0);
}

TEST(ForwardTest, IdentityWeightsPassIsolatedNodeThrough) {
  const auto g =
      PartitionedGraph::Build({{0, 0, kNoLabel, {0.5, 2.0}}}, {}, 1);
  ModelConfig config;
  config.activation = Activation::kLeakyRelu;
  config.task = TaskKind::kNode;
  config.dims = {2, 2, 2};
  ModelParams params = InitParams(config, 1);
  for (auto& w : params.weights.layers) w = Matrix::Identity(2, 2);
  const std::vector<NodeId> root = {0};
  const ForwardTrace t = ForwardExact(params, GraphView::Full(g), {}, {}, {}, root);
  EXPECT_EQ(t.FinalEmbedding(0), g.features().row(0).transpose());
}

TEST(ForwardTest, NodeTaskLeavesEdgeHeadGradientZero) {
  const auto g = testing::RandomGraph(12, 6, 1, 3, 3, 2, true);
  ModelConfig config;
  config.task = TaskKind::kNode;
  config.dims = {3, 4, 4};
  config.num_classes = 3;
  const ModelParams params = InitParams(config, 2);
  std::vector<Target> targets;
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    targets.push_back({v, v, false, g.node_label(v), 1.0});
  }
  const ForwardTrace t = ForwardExact(params, GraphView::Full(g), targets);
  const Gradients grads = Backward(t, params);
  EXPECT_EQ(grads.weights.edge_head.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_GT(grads.weights.task_head.cwiseAbs().maxCoeff(), 0.0);
}

TEST(ForwardTest, RelabelingNodesPermutesEmbeddings) {
  const auto g = testing::RandomGraph(10, 8, 1, 2, 2, 6, false);
  // Same graph with external ids reversed.
  std::vector<NodeRecord> nodes;
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    const auto f = g.features().row(v);
    nodes.push_back({static_cast<std::int64_t>(9 - v), 0, kNoLabel,
                     std::vector<double>(f.begin(), f.end())});
  }
  std::vector<EdgeRecord> edges;
  for (EdgeId e = 0; e < g.num_edges(); ++e) {
    edges.push_back({e, 9 - static_cast<std::int64_t>(g.edge(e).src),
                     9 - static_cast<std::int64_t>(g.edge(e).dst), 0, {}});
  }
  const auto h = PartitionedGraph::Build(nodes, edges, 1);
  ModelConfig config;
  config.architecture = Architecture::kGcn;
  config.dims = {2, 3, 3};
  const ModelParams params = InitParams(config, 8);
  std::vector<NodeId> all(10);
  for (NodeId v = 0; v < 10; ++v) all[v] = v;
  const auto a = ForwardExact(params, GraphView::Full(g), {}, {}, {}, all);
  const auto b = ForwardExact(params, GraphView::Full(h), {}, {}, {}, all);
  for (NodeId v = 0; v < 10; ++v) {
    const NodeId w = static_cast<NodeId>(
        std::find_if(all.begin(), all.end(),
                     [&](NodeId u) { return h.external_node_id(u) == 9 - static_cast<std::int64_t>(v); }) -
        all.begin());
    EXPECT_NEAR((a.FinalEmbedding(v) - b.FinalEmbedding(w)).norm(), 0.0, 1e-14);
  }
}

}  // namespace
}  // namespace fedgnn
