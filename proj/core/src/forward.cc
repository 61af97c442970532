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

namespace fedgnn {
namespace {

int RowOf(const std::vector<NodeId>& sorted, NodeId v) {
  auto it = std::lower_bound(sorted.begin(), sorted.end(), v);
  if (it == sorted.end() || *it != v) return -1;
  return static_cast<int>(it - sorted.begin());
}

// Degree used for normalization at a layer: local neighbors, plus remote ones
// when the layer aggregates them.
double ViewDegree(const GraphView& view, NodeId v, bool with_remote) {
  if (!view.is_local(v)) {
    return static_cast<double>(view.graph().neighbors(v).size());
  }
  double d = static_cast<double>(view.local_neighbors(v).size());
  if (with_remote) d += static_cast<double>(view.remote_neighbors(v).size());
  return d;
}

void CheckShapes(const ModelParams& params, const GraphView& view) {
  const auto& cfg = params.config;
  ValidateConfig(cfg);
  if (static_cast<int>(params.weights.layers.size()) != cfg.num_layers()) {
    throw ConfigError("model has " + std::to_string(params.weights.layers.size()) +
                      " weight matrices for " + std::to_string(cfg.num_layers()) +
                      " layers");
  }
  if (static_cast<int>(view.graph().feature_dim()) != cfg.dims[0]) {
    throw ConfigError("layer1 expects input width " + std::to_string(cfg.dims[0]) +
                      " but graph features have width " +
                      std::to_string(view.graph().feature_dim()));
  }
  for (int l = 1; l <= cfg.num_layers(); ++l) {
    const Matrix& w = params.weights.layers[l - 1];
    if (w.rows() != cfg.dims[l] || w.cols() != cfg.dims[l - 1]) {
      throw ConfigError("layer" + std::to_string(l) + " weight is " +
                        std::to_string(w.rows()) + "x" + std::to_string(w.cols()) +
                        ", expected " + std::to_string(cfg.dims[l]) + "x" +
                        std::to_string(cfg.dims[l - 1]));
    }
  }
  const int dL = cfg.embedding_dim();
  if (params.weights.task_head.rows() != cfg.num_classes ||
      params.weights.task_head.cols() != dL) {
    throw ConfigError("task_head shape does not match classes x embedding width");
  }
  if (cfg.task == TaskKind::kEdge &&
      (params.weights.edge_head.rows() != dL || params.weights.edge_head.cols() != dL)) {
    throw ConfigError("edge_head shape does not match embedding width");
  }
}

// Aggregation coefficients and constants for every row of layer l.
void Aggregate(const ModelParams& params, const GraphView& view,
               const ComputationPlan& plan, int l, const Matrix& prev,
               const EmbeddingLookup& released, LayerTrace& out) {
  const auto& cfg = params.config;
  const auto& nodes = plan.sets[l];
  const auto& below = plan.sets[l - 1];
  const bool with_remote = plan.include_remote[l];
  const Eigen::Index width = prev.cols();

  out.nodes = nodes;
  out.input_offsets.assign(1, 0);
  out.inputs.clear();
  out.aggregated = Matrix::Zero(static_cast<Eigen::Index>(nodes.size()), width);

  for (std::size_t r = 0; r < nodes.size(); ++r) {
    const NodeId v = nodes[r];
    const auto& local = plan.neighbors[l][r];
    const auto& remote = plan.remote[l][r];
    const double sampled = static_cast<double>(local.size() + remote.size());
    const double degree = ViewDegree(view, v, with_remote);
    const double scale = sampled > 0 ? degree / sampled : 0.0;

    double self = 0.0;
    auto neighbor_coeff = [&](NodeId u) -> double {
      switch (cfg.architecture) {
        case Architecture::kSageMean:
          return 1.0 / (sampled + 1.0);
        case Architecture::kGcn:
          return scale / std::sqrt((degree + 1.0) *
                                   (ViewDegree(view, u, with_remote) + 1.0));
        case Architecture::kGin:
          return scale;
      }
      return 0.0;
    };
    switch (cfg.architecture) {
      case Architecture::kSageMean: self = 1.0 / (sampled + 1.0); break;
      case Architecture::kGcn: self = 1.0 / (degree + 1.0); break;
      case Architecture::kGin: self = 1.0 + cfg.gin_epsilon; break;
    }

    // Inputs are emitted in ascending NodeId order, self included, so the
    // floating-point summation order never depends on list order.
    std::vector<std::pair<NodeId, double>> terms;
    terms.reserve(local.size() + 1);
    terms.emplace_back(v, self);
    for (NodeId u : local) terms.emplace_back(u, neighbor_coeff(u));
    std::sort(terms.begin(), terms.end());
    auto row = out.aggregated.row(static_cast<Eigen::Index>(r));
    for (const auto& [u, c] : terms) {
      const int pr = RowOf(below, u);
      if (pr < 0) throw ConfigError("plan is missing a lower-layer node");
      out.inputs.emplace_back(static_cast<std::uint32_t>(pr), c);
      row += c * prev.row(pr);
    }
    for (NodeId u : remote) {
      const Vector* value = released ? released(u) : nullptr;
      if (value != nullptr) {
        if (value->size() != width) {
          throw ConfigError("released embedding width does not match layer" +
                            std::to_string(l) + " input");
        }
        row += neighbor_coeff(u) * value->transpose();
      }
    }
    out.input_offsets.push_back(out.inputs.size());
  }
}

void FinishTargets(const ModelParams& params, const GraphView& view,
                   std::span<const Target> targets,
                   const EmbeddingLookup& released, double normalizer,
                   ForwardTrace& trace) {
  const auto& cfg = params.config;
  const auto& W = params.weights;
  const int dL = cfg.embedding_dim();
  const Eigen::Index T = static_cast<Eigen::Index>(targets.size());
  trace.targets.assign(targets.begin(), targets.end());
  trace.src.assign(targets.size(), {});
  trace.dst.assign(targets.size(), {});
  trace.stale.assign(targets.size(), false);
  trace.cold.assign(targets.size(), false);
  trace.head_in = Matrix::Zero(T, dL);

  std::vector<Vector> remote_rows;
  const Matrix empty_final;
  const Matrix& final_act =
      trace.layers.empty() ? empty_final : trace.layers.back().act;
  auto resolve = [&](NodeId v, std::size_t t) -> EndpointRef {
    EndpointRef ref;
    if (view.is_local(v)) {
      ref.row = trace.FinalRow(v);
      if (ref.row < 0) throw ConfigError("target endpoint missing from plan");
      return ref;
    }
    const Vector* value = released ? released(v) : nullptr;
    trace.stale[t] = true;
    if (value == nullptr) {
      trace.cold[t] = true;
      remote_rows.push_back(Vector::Zero(dL));
    } else {
      if (value->size() != dL) {
        throw ConfigError("released embedding width does not match model");
      }
      remote_rows.push_back(*value);
    }
    ref.remote = static_cast<int>(remote_rows.size()) - 1;
    return ref;
  };
  auto value_of = [&](const EndpointRef& ref) -> Vector {
    if (ref.row >= 0) return final_act.row(ref.row).transpose();
    return remote_rows[ref.remote];
  };

  for (std::size_t t = 0; t < targets.size(); ++t) {
    const Target& tg = targets[t];
    const Eigen::Index ti = static_cast<Eigen::Index>(t);
    if (tg.is_edge) {
      trace.src[t] = resolve(tg.src, t);
      trace.dst[t] = resolve(tg.dst, t);
      trace.head_in.row(ti) =
          0.5 * (value_of(trace.src[t]) + value_of(trace.dst[t])).transpose();
    } else {
      if (!view.is_local(tg.src)) {
        throw ConfigError("node target is not hosted by this view");
      }
      trace.src[t] = resolve(tg.src, t);
      trace.dst[t] = trace.src[t];
      trace.head_in.row(ti) = value_of(trace.src[t]).transpose();
    }
    if (tg.label < 0 || tg.label >= cfg.num_classes) {
      throw ConfigError("target label outside task_head classes");
    }
  }
  trace.remote_values = Matrix::Zero(static_cast<Eigen::Index>(remote_rows.size()), dL);
  for (std::size_t i = 0; i < remote_rows.size(); ++i) {
    trace.remote_values.row(static_cast<Eigen::Index>(i)) = remote_rows[i].transpose();
  }

  if (cfg.task == TaskKind::kEdge) {
    trace.head_pre = trace.head_in * W.edge_head.transpose();
    trace.head_act = Activate(cfg.activation, trace.head_pre);
    trace.logits = trace.head_act * W.task_head.transpose();
  } else {
    trace.logits = trace.head_in * W.task_head.transpose();
  }

  trace.probs = Matrix::Zero(trace.logits.rows(), trace.logits.cols());
  double loss = 0.0;
  double wsum = 0.0;
  for (Eigen::Index t = 0; t < trace.logits.rows(); ++t) {
    const double mx = trace.logits.row(t).maxCoeff();
    const double lse =
        mx + std::log((trace.logits.row(t).array() - mx).exp().sum());
    trace.probs.row(t) = (trace.logits.row(t).array() - lse).exp().matrix();
    const Target& tg = targets[static_cast<std::size_t>(t)];
    loss += tg.weight * (lse - trace.logits(t, tg.label));
    wsum += tg.weight;
  }
  trace.weight_sum = wsum;
  trace.normalizer = normalizer > 0.0 ? normalizer : wsum;
  trace.loss = trace.normalizer > 0.0 ? loss / trace.normalizer : 0.0;
}

ForwardTrace Execute(const ModelParams& params, const GraphView& view,
                     const ComputationPlan& plan,
                     std::span<const Target> targets,
                     const EmbeddingLookup& released,
                     const ForwardOptions& options, EmbeddingState* state,
                     double gamma, StepStamp stamp) {
  CheckShapes(params, view);
  const auto& cfg = params.config;
  const int L = cfg.num_layers();
  ForwardTrace trace;
  trace.remote_chain_scale = options.remote_chain_scale;
  const auto& g = view.graph();
  trace.input_nodes = plan.sets.empty() ? std::vector<NodeId>{} : plan.sets[0];
  trace.input = Matrix(static_cast<Eigen::Index>(trace.input_nodes.size()),
                       static_cast<Eigen::Index>(g.feature_dim()));
  for (std::size_t i = 0; i < trace.input_nodes.size(); ++i) {
    const NodeId v = trace.input_nodes[i];
    const Vector* replaced = nullptr;
    if (options.input_override != nullptr) {
      auto it = options.input_override->find(v);
      if (it != options.input_override->end()) replaced = &it->second;
    }
    if (replaced != nullptr) {
      if (replaced->size() != trace.input.cols()) {
        throw ConfigError("input override width does not match features");
      }
      trace.input.row(static_cast<Eigen::Index>(i)) = replaced->transpose();
    } else {
      trace.input.row(static_cast<Eigen::Index>(i)) = g.features().row(v);
    }
  }

  trace.layers.resize(L);
  const Matrix* prev = &trace.input;
  for (int l = 1; l <= L; ++l) {
    LayerTrace& lt = trace.layers[l - 1];
    Aggregate(params, view, plan, l, *prev, released, lt);
    const Matrix& W = params.weights.layers[l - 1];
    Matrix message = lt.aggregated * W.transpose();
    if (state == nullptr) {
      lt.pre = std::move(message);
      lt.act = Activate(cfg.activation, lt.pre);
    } else {
      lt.pre.resize(message.rows(), message.cols());
      lt.act.resize(message.rows(), message.cols());
      for (std::size_t r = 0; r < lt.nodes.size(); ++r) {
        const Eigen::Index ri = static_cast<Eigen::Index>(r);
        state->Update(lt.nodes[r], l, message.row(ri).transpose(), gamma, stamp);
        lt.pre.row(ri) = state->pre(lt.nodes[r], l);
        lt.act.row(ri) = state->act(lt.nodes[r], l);
      }
    }
    prev = &lt.act;
  }
  FinishTargets(params, view, targets, released, options.loss_normalizer, trace);
  return trace;
}

void BackwardLayers(const ForwardTrace& trace, const ModelParams& params,
                    Matrix d_act, bool with_input, Gradients& grads) {
  const auto& cfg = params.config;
  const int L = cfg.num_layers();
  for (int l = L; l >= 1; --l) {
    const LayerTrace& lt = trace.layers[l - 1];
    Matrix d_pre = d_act.cwiseProduct(lt.pre.unaryExpr(
        [&cfg](double x) { return ActivateDerivative(cfg.activation, x); }));
    grads.weights.layers[l - 1] += d_pre.transpose() * lt.aggregated;
    if (l == 1 && !with_input) break;
    Matrix d_agg = d_pre * params.weights.layers[l - 1];
    const Eigen::Index below_rows =
        l >= 2 ? trace.layers[l - 2].act.rows() : trace.input.rows();
    Matrix d_prev = Matrix::Zero(below_rows, d_agg.cols());
    for (std::size_t r = 0; r < lt.nodes.size(); ++r) {
      for (std::size_t k = lt.input_offsets[r]; k < lt.input_offsets[r + 1]; ++k) {
        const auto& [row, c] = lt.inputs[k];
        d_prev.row(row) += c * d_agg.row(static_cast<Eigen::Index>(r));
      }
    }
    d_act = std::move(d_prev);
  }
  if (with_input) grads.input = std::move(d_act);
}

}  // namespace

EmbeddingLookup LookupIn(const StopGradientMap& map) {
  return [&map](NodeId v) -> const Vector* {
    auto it = map.find(v);
    return it == map.end() ? nullptr : &it->second;
  };
}

std::vector<bool> RemoteLayers(const ModelConfig& config, RemoteMode mode) {
  const int L = config.num_layers();
  std::vector<bool> out(L + 1, false);
  if (mode == RemoteMode::kBuffered) {
    for (int l = 2; l <= L; ++l) {
      out[l] = config.dims[l - 1] == config.embedding_dim();
    }
  }
  return out;
}

int ForwardTrace::FinalRow(NodeId v) const {
  if (layers.empty()) return -1;
  return RowOf(layers.back().nodes, v);
}

Vector ForwardTrace::FinalEmbedding(NodeId v) const {
  const int r = FinalRow(v);
  if (r < 0) throw ConfigError("node not computed in this trace");
  return layers.back().act.row(r).transpose();
}

ForwardTrace ForwardPlan(const ModelParams& params, const GraphView& view,
                         const ComputationPlan& plan,
                         std::span<const Target> targets,
                         const EmbeddingLookup& released,
                         const ForwardOptions& options) {
  return Execute(params, view, plan, targets, released, options, nullptr, 1.0, {});
}

ForwardTrace ForwardExact(const ModelParams& params, const GraphView& view,
                          std::span<const Target> targets,
                          const StopGradientMap& stop_gradient,
                          const ForwardOptions& options,
                          std::span<const NodeId> extra_roots) {
  std::vector<NodeId> roots(extra_roots.begin(), extra_roots.end());
  for (const Target& t : targets) {
    if (view.is_local(t.src)) roots.push_back(t.src);
    if (t.is_edge && view.is_local(t.dst)) roots.push_back(t.dst);
  }
  const ComputationPlan plan =
      BuildPlan(view, std::move(roots), params.config.num_layers(), {},
                RemoteLayers(params.config, options.remote_mode), nullptr);
  return Execute(params, view, plan, targets, LookupIn(stop_gradient), options,
                 nullptr, 1.0, {});
}

ForwardTrace ForwardStochastic(const ModelParams& params,
                               const GraphView& view, const Minibatch& batch,
                               std::span<const Target> targets,
                               EmbeddingState& state,
                               const EmbeddingLookup& released, double gamma,
                               const ForwardOptions& options) {
  if (state.num_layers() != params.config.num_layers()) {
    throw ConfigError("embedding state depth does not match model");
  }
  if (batch.plan.sets.empty()) {
    ComputationPlan plan;
    plan.sets.resize(params.config.num_layers() + 1);
    plan.neighbors.resize(plan.sets.size());
    plan.remote.resize(plan.sets.size());
    plan.include_remote.assign(plan.sets.size(), false);
    return Execute(params, view, plan, targets, released, options, &state, gamma,
                   {batch.round, batch.step});
  }
  return Execute(params, view, batch.plan, targets, released, options, &state,
                 gamma, {batch.round, batch.step});
}

Vector Gradients::InputGradient(const ForwardTrace& trace, NodeId v) const {
  const int r = RowOf(trace.input_nodes, v);
  if (r < 0 || input.rows() == 0) return Vector::Zero(trace.input.cols());
  return input.row(r).transpose();
}

Gradients Backward(const ForwardTrace& trace, const ModelParams& params,
                   bool with_input_gradient) {
  const auto& cfg = params.config;
  const auto& W = params.weights;
  Gradients grads;
  grads.weights = ParamSet::ZerosLike(W);
  const Eigen::Index T = trace.logits.rows();
  const int dL = cfg.embedding_dim();
  const Eigen::Index final_rows =
      trace.layers.empty() ? 0 : trace.layers.back().act.rows();
  Matrix d_final = Matrix::Zero(final_rows, dL);

  if (T > 0 && trace.normalizer > 0.0) {
    Matrix d_logits = trace.probs;
    for (Eigen::Index t = 0; t < T; ++t) {
      const Target& tg = trace.targets[static_cast<std::size_t>(t)];
      d_logits(t, tg.label) -= 1.0;
      d_logits.row(t) *= tg.weight / trace.normalizer;
    }
    Matrix d_head_in;
    if (cfg.task == TaskKind::kEdge) {
      grads.weights.task_head = d_logits.transpose() * trace.head_act;
      Matrix d_head_act = d_logits * W.task_head;
      Matrix d_head_pre = d_head_act.cwiseProduct(trace.head_pre.unaryExpr(
          [&cfg](double x) { return ActivateDerivative(cfg.activation, x); }));
      grads.weights.edge_head = d_head_pre.transpose() * trace.head_in;
      d_head_in = d_head_pre * W.edge_head;
    } else {
      grads.weights.task_head = d_logits.transpose() * trace.head_in;
      d_head_in = d_logits * W.task_head;
    }
    for (Eigen::Index t = 0; t < T; ++t) {
      const std::size_t ts = static_cast<std::size_t>(t);
      const Target& tg = trace.targets[ts];
      if (!tg.is_edge) {
        d_final.row(trace.src[ts].row) += d_head_in.row(t);
        continue;
      }
      const EndpointRef& a = trace.src[ts];
      const EndpointRef& b = trace.dst[ts];
      if (a.row >= 0) {
        const double c = b.row >= 0 ? 0.5 : 0.5 * trace.remote_chain_scale;
        d_final.row(a.row) += c * d_head_in.row(t);
      }
      if (b.row >= 0) {
        const double c = a.row >= 0 ? 0.5 : 0.5 * trace.remote_chain_scale;
        d_final.row(b.row) += c * d_head_in.row(t);
      }
    }
  }
  if (!trace.layers.empty()) {
    BackwardLayers(trace, params, std::move(d_final), with_input_gradient, grads);
  }
  return grads;
}

Gradients BackwardFromEmbeddings(const ForwardTrace& trace,
                                 const ModelParams& params,
                                 const Matrix& d_final,
                                 bool with_input_gradient) {
  Gradients grads;
  grads.weights = ParamSet::ZerosLike(params.weights);
  if (trace.layers.empty()) return grads;
  if (d_final.rows() != trace.layers.back().act.rows() ||
      d_final.cols() != trace.layers.back().act.cols()) {
    throw ConfigError("upstream gradient shape does not match final layer");
  }
  BackwardLayers(trace, params, d_final, with_input_gradient, grads);
  return grads;
}

}  // namespace fedgnn
