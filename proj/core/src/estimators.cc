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

#include "fedgnn/estimators.h"

#include <string>

#include "fedgnn/forward.h"

namespace fedgnn {

EmbeddingState::EmbeddingState(std::size_t num_nodes,
                               std::vector<int> layer_dims,
                               Activation activation)
    : num_nodes_(num_nodes), activation_(activation) {
  const auto n = static_cast<Eigen::Index>(num_nodes);
  for (int d : layer_dims) {
    if (d <= 0) throw ConfigError("embedding state layer width must be positive");
    pre_.push_back(Matrix::Zero(n, d));
    act_.push_back(Matrix::Zero(n, d));
    message_.push_back(Matrix::Zero(n, d));
    cold_.emplace_back(num_nodes, std::uint8_t{1});
    stamp_.emplace_back(num_nodes, StepStamp{});
  }
}

void EmbeddingState::Update(NodeId v, int layer,
                            const Eigen::Ref<const Vector>& message,
                            double gamma, StepStamp stamp) {
  if (!(gamma > 0.0 && gamma <= 1.0)) {
    throw ConfigError("gamma must be in (0, 1], got " + std::to_string(gamma));
  }
  if (layer < 1 || layer > num_layers() || v >= num_nodes_) {
    throw ConfigError("embedding state index out of range");
  }
  Matrix& pre = pre_[layer - 1];
  if (message.size() != pre.cols()) {
    throw ConfigError("message width does not match layer" + std::to_string(layer));
  }
  message_[layer - 1].row(v) = message.transpose();
  auto row = pre.row(v);
  if (cold_[layer - 1][v] || gamma == 1.0) {
    row = message.transpose();
  } else {
    row = (1.0 - gamma) * row + gamma * message.transpose();
  }
  for (Eigen::Index j = 0; j < row.size(); ++j) {
    act_[layer - 1](v, j) = Activate(activation_, row(j));
  }
  cold_[layer - 1][v] = 0;
  stamp_[layer - 1][v] = stamp;
}

void EmbeddingState::Seed(NodeId v, int layer,
                          const Eigen::Ref<const Vector>& pre) {
  if (layer < 1 || layer > num_layers() || v >= num_nodes_) {
    throw ConfigError("embedding state index out of range");
  }
  if (pre.size() != pre_[layer - 1].cols()) {
    throw ConfigError("seed width does not match layer" + std::to_string(layer));
  }
  pre_[layer - 1].row(v) = pre.transpose();
  message_[layer - 1].row(v) = pre.transpose();
  for (Eigen::Index j = 0; j < pre.size(); ++j) {
    act_[layer - 1](v, j) = Activate(activation_, pre(j));
  }
  cold_[layer - 1][v] = 0;
}

void UpdateGradient(GradientMA& ma, const ParamSet& stochastic_grad,
                    double beta) {
  if (!(beta > 0.0 && beta <= 1.0)) {
    throw ConfigError("beta must be in (0, 1], got " + std::to_string(beta));
  }
  if (ma.value.num_tensors() == 2 && ma.value.layers.empty() &&
      ma.value.task_head.size() == 0) {
    ma.value = ParamSet::ZerosLike(stochastic_grad);
  }
  if (ma.value.num_tensors() != stochastic_grad.num_tensors()) {
    throw ConfigError("gradient has " + std::to_string(stochastic_grad.num_tensors()) +
                      " tensors, moving average has " +
                      std::to_string(ma.value.num_tensors()));
  }
  for (std::size_t i = 0; i < ma.value.num_tensors(); ++i) {
    const Matrix& g = stochastic_grad.tensor(i);
    Matrix& m = ma.value.tensor(i);
    if (g.rows() != m.rows() || g.cols() != m.cols()) {
      throw ConfigError("gradient tensor " + ma.value.tensor_name(i) + " is " +
                        std::to_string(g.rows()) + "x" + std::to_string(g.cols()) +
                        ", expected " + std::to_string(m.rows()) + "x" +
                        std::to_string(m.cols()));
    }
  }
  ma.value.Scale(1.0 - beta);
  ma.value.Axpy(beta, stochastic_grad);
  ++ma.last_step;
}

std::vector<double> TrackingErrorProbe(const EmbeddingState& state,
                                       const ModelParams& params,
                                       const GraphView& view) {
  const int L = params.config.num_layers();
  if (state.num_layers() != L) {
    throw ConfigError("embedding state depth does not match model");
  }
  const auto& nodes = view.local_nodes();
  ForwardOptions options;
  const ForwardTrace exact =
      ForwardExact(params, view, {}, {}, options, nodes);
  std::vector<double> out(L, 0.0);
  for (int l = 1; l <= L; ++l) {
    const LayerTrace& lt = exact.layers[l - 1];
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t r = 0; r < lt.nodes.size(); ++r) {
      const NodeId v = lt.nodes[r];
      if (!view.is_local(v) || state.is_cold(v, l)) continue;
      sum += (state.act(v, l) - lt.act.row(static_cast<Eigen::Index>(r)))
                 .squaredNorm();
      ++count;
    }
    out[l - 1] = count > 0 ? sum / static_cast<double>(count) : 0.0;
  }
  return out;
}

}  // namespace fedgnn
