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

#ifndef FEDGNN_FORWARD_H_
#define FEDGNN_FORWARD_H_

#include <functional>
#include <span>
#include <unordered_map>
#include <vector>

#include "fedgnn/common.h"
#include "fedgnn/estimators.h"
#include "fedgnn/graph.h"
#include "fedgnn/model.h"
#include "fedgnn/sampling.h"

namespace fedgnn {

// One supervised example. Node targets set src == dst and is_edge = false.
struct Target {
  NodeId src = 0;
  NodeId dst = 0;
  bool is_edge = true;
  Label label = 0;
  double weight = 1.0;
};

// Fixed final-layer embeddings for nodes the view cannot compute. Values are
// constants: backward never differentiates through them.
using StopGradientMap = std::unordered_map<NodeId, Vector>;
using EmbeddingLookup = std::function<const Vector*(NodeId)>;

EmbeddingLookup LookupIn(const StopGradientMap& map);

struct ForwardOptions {
  RemoteMode remote_mode = RemoteMode::kExclude;
  // When one endpoint of an edge target is a stop-gradient constant, the
  // local endpoint's chain is scaled by this factor in backward. With the
  // default of 2 the two incident clients' half-weighted contributions sum to
  // the centralized gradient: each computes the full edge-head term once and
  // exactly one of them owns each endpoint chain.
  double remote_chain_scale = 2.0;
  // Denominator of the weighted-mean loss. Zero means the local weight sum;
  // a shared positive value lets per-client losses add up to the global one.
  double loss_normalizer = 0.0;
  // Replacement input features for selected nodes (attack reconstruction).
  const StopGradientMap* input_override = nullptr;
};

// Which layers aggregate remote neighbors under `mode`.
std::vector<bool> RemoteLayers(const ModelConfig& config, RemoteMode mode);

// Values computed at one message-passing layer.
struct LayerTrace {
  std::vector<NodeId> nodes;
  // Row r aggregates previous-layer rows inputs[input_offsets[r] ..
  // input_offsets[r+1]) with the paired coefficients.
  std::vector<std::size_t> input_offsets;
  std::vector<std::pair<std::uint32_t, double>> inputs;
  Matrix aggregated;  // h^ = sum of coefficient * lower value (+ constants)
  Matrix pre;         // h~ (exact) or H~ (moving average)
  Matrix act;         // phi(pre)
};

// A target endpoint is either a row of the final layer or a constant row of
// `remote_values`.
struct EndpointRef {
  int row = -1;
  int remote = -1;
};

struct ForwardTrace {
  std::vector<NodeId> input_nodes;
  Matrix input;
  std::vector<LayerTrace> layers;  // layers[l-1] is layer l

  std::vector<Target> targets;
  std::vector<EndpointRef> src;
  std::vector<EndpointRef> dst;
  Matrix remote_values;
  // Per target: an endpoint came from a released (possibly stale) embedding,
  // or had no released value at all and used the zero cold-start vector.
  std::vector<bool> stale;
  std::vector<bool> cold;

  Matrix head_in;   // edge: (H(u)+H(v))/2; node: H^(L)(v)
  Matrix head_pre;  // edge only: W^e head_in
  Matrix head_act;  // edge only: phi(head_pre)
  Matrix logits;
  Matrix probs;
  double loss = 0.0;
  double weight_sum = 0.0;
  double normalizer = 0.0;
  double remote_chain_scale = 2.0;

  // Row of `v` in the final layer, or -1.
  int FinalRow(NodeId v) const;
  // Final-layer value of a computed node.
  Vector FinalEmbedding(NodeId v) const;
};

// Exact message passing over full neighborhoods of `view`. Endpoints the
// view does not host are read from `stop_gradient`; a missing entry becomes
// the zero vector and is flagged cold. `extra_roots` adds nodes whose
// embeddings should be computed even when no target needs them.
ForwardTrace ForwardExact(const ModelParams& params, const GraphView& view,
                          std::span<const Target> targets,
                          const StopGradientMap& stop_gradient = {},
                          const ForwardOptions& options = {},
                          std::span<const NodeId> extra_roots = {});

// Moving-average forward pass over a sampled minibatch. Every node of
// plan.sets[l] has its layer-l estimate updated in `state`, bottom-up, from
// this step's lower-layer values. Cross-client endpoints and (in buffered
// mode) remote neighbors are read from `released`.
ForwardTrace ForwardStochastic(const ModelParams& params,
                               const GraphView& view, const Minibatch& batch,
                               std::span<const Target> targets,
                               EmbeddingState& state,
                               const EmbeddingLookup& released, double gamma,
                               const ForwardOptions& options = {});

// Executes an arbitrary plan exactly (no estimator state).
ForwardTrace ForwardPlan(const ModelParams& params, const GraphView& view,
                         const ComputationPlan& plan,
                         std::span<const Target> targets,
                         const EmbeddingLookup& released,
                         const ForwardOptions& options = {});

struct Gradients {
  ParamSet weights;
  // d loss / d input features, rows aligned with trace.input_nodes. Empty
  // unless requested.
  Matrix input;

  // Gradient row for one node's input features (zero if not in the trace).
  Vector InputGradient(const ForwardTrace& trace, NodeId v) const;
};

// Reverse-mode gradient of trace.loss. Released embeddings are constants.
Gradients Backward(const ForwardTrace& trace, const ModelParams& params,
                   bool with_input_gradient = false);

// Backward pass seeded with d(objective)/d(final-layer activations) instead
// of the task loss; rows align with trace.layers.back().nodes.
Gradients BackwardFromEmbeddings(const ForwardTrace& trace,
                                 const ModelParams& params,
                                 const Matrix& d_final,
                                 bool with_input_gradient = true);

}  // namespace fedgnn

#endif  // FEDGNN_FORWARD_H_
