#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "fedgnn/datagen.h"
#include "fedgnn/fed_sim.h"
#include "fedgnn/forward.h"
#include "fedgnn/privacy.h"
#include "fedgnn/sampling.h"

namespace fedgnn {
namespace {

PartitionedGraph BenchGraph(int nodes) {
  GenSpec spec;
  spec.nodes = nodes;
  spec.clients = 4;
  spec.seed = 1;
  return GenPlantedCycles(spec);
}

std::vector<Target> EdgeTargets(const PartitionedGraph& g) {
  std::vector<Target> out;
  for (EdgeId e = 0; e < g.num_edges(); ++e) {
    out.push_back({g.edge(e).src, g.edge(e).dst, true, g.edge(e).label, 1.0});
  }
  return out;
}

void BM_ForwardExact(benchmark::State& state) {
  const auto g = BenchGraph(static_cast<int>(state.range(0)));
  const ModelParams p = InitParams(MakeModelConfig(g, TaskKind::kEdge, {16, 16}), 1);
  const auto view = GraphView::Full(g);
  const auto targets = EdgeTargets(g);
  for (auto _ : state) {
    benchmark::DoNotOptimize(ForwardExact(p, view, targets).loss);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(targets.size()));
}
BENCHMARK(BM_ForwardExact)->Arg(500)->Arg(2000);

void BM_ForwardBackward(benchmark::State& state) {
  const auto g = BenchGraph(static_cast<int>(state.range(0)));
  const ModelParams p = InitParams(MakeModelConfig(g, TaskKind::kEdge, {16, 16}), 1);
  const auto view = GraphView::Full(g);
  const auto targets = EdgeTargets(g);
  for (auto _ : state) {
    const ForwardTrace trace = ForwardExact(p, view, targets);
    benchmark::DoNotOptimize(Backward(trace, p).weights.SquaredNorm());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(targets.size()));
}
BENCHMARK(BM_ForwardBackward)->Arg(500)->Arg(2000);

void BM_SampleMinibatch(benchmark::State& state) {
  const auto g = BenchGraph(2000);
  const auto view = GraphView::Client(g, 0);
  SeedPool pool;
  for (EdgeId e = 0; e < g.num_edges(); ++e) {
    if (view.is_local(g.edge(e).src) || view.is_local(g.edge(e).dst)) pool.edges.push_back(e);
  }
  SamplingConfig config;
  config.batch_size = static_cast<int>(state.range(0));
  int step = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(SampleMinibatch(view, pool, config, 2, 1, 0, step++));
  }
}
BENCHMARK(BM_SampleMinibatch)->Arg(64)->Arg(512);

void BM_RhoPercentiles(benchmark::State& state) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> normal;
  Matrix x(state.range(0), 16);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = normal(rng);
  const std::vector<double> qs(std::begin(kDefaultPercentiles), std::end(kDefaultPercentiles));
  for (auto _ : state) {
    benchmark::DoNotOptimize(RhoPercentiles(x, 50, qs).rho);
  }
}
BENCHMARK(BM_RhoPercentiles)->Arg(1000)->Arg(4000);

void BM_MdpEpsilon(benchmark::State& state) {
  double rho = 0.05;
  for (auto _ : state) {
    benchmark::DoNotOptimize(MdpEpsilon(rho, 1.0, 200, 1e-5));
    rho = rho < 2.0 ? rho * 1.01 : 0.05;
  }
}
BENCHMARK(BM_MdpEpsilon);

}  // namespace
}  // namespace fedgnn

BENCHMARK_MAIN();
