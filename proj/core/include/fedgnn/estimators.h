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

#ifndef FEDGNN_ESTIMATORS_H_
#define FEDGNN_ESTIMATORS_H_

#include <cstdint>
#include <vector>

#include "fedgnn/common.h"
#include "fedgnn/graph.h"
#include "fedgnn/model.h"

namespace fedgnn {

struct StepStamp {
  int round = -1;
  int step = -1;
};

// Per-client moving-average estimates of every node's pre-activation H~ and
// activation H = phi(H~) at each layer. A node's entry changes only when the
// node is sampled at that layer; entries never touched are cold and hold
// H~ = 0.
//
// Owned by exactly one client; not thread-safe.
class EmbeddingState {
 public:
  EmbeddingState() = default;
  // layer_dims = d1, ..., dL.
  EmbeddingState(std::size_t num_nodes, std::vector<int> layer_dims,
                 Activation activation);

  int num_layers() const { return static_cast<int>(pre_.size()); }
  std::size_t num_nodes() const { return num_nodes_; }
  Activation activation() const { return activation_; }

  // Layers are 1-based to match message-passing depth.
  bool is_cold(NodeId v, int layer) const { return cold_[layer - 1][v] != 0; }
  StepStamp stamp(NodeId v, int layer) const { return stamp_[layer - 1][v]; }
  auto pre(NodeId v, int layer) const { return pre_[layer - 1].row(v); }
  auto act(NodeId v, int layer) const { return act_[layer - 1].row(v); }
  const Matrix& pre_matrix(int layer) const { return pre_[layer - 1]; }
  const Matrix& act_matrix(int layer) const { return act_[layer - 1]; }
  // Raw message m from the most recent touch, before any averaging.
  auto message(NodeId v, int layer) const { return message_[layer - 1].row(v); }

  // H~ <- (1 - gamma) H~ + gamma * message and H <- phi(H~). A cold entry is
  // overwritten (gamma treated as 1) so the zero initialization leaves no
  // bias. Throws ConfigError unless gamma is in (0, 1].
  void Update(NodeId v, int layer, const Eigen::Ref<const Vector>& message,
              double gamma, StepStamp stamp);

  // Installs an arbitrary warm estimate and clears the cold flag.
  void Seed(NodeId v, int layer, const Eigen::Ref<const Vector>& pre);

 private:
  std::size_t num_nodes_ = 0;
  Activation activation_ = Activation::kTanh;
  std::vector<Matrix> pre_;
  std::vector<Matrix> act_;
  std::vector<Matrix> message_;
  std::vector<std::vector<std::uint8_t>> cold_;
  std::vector<std::vector<StepStamp>> stamp_;
};

inline void UpdateEmbedding(EmbeddingState& state, NodeId v, int layer,
                            const Eigen::Ref<const Vector>& message,
                            double gamma, StepStamp stamp = {}) {
  state.Update(v, layer, message, gamma, stamp);
}

// G <- (1 - beta) G + beta * g_hat.
struct GradientMA {
  ParamSet value;
  int last_step = -1;
};

// Throws ConfigError naming the first mismatched tensor, or if beta is not in
// (0, 1].
void UpdateGradient(GradientMA& ma, const ParamSet& stochastic_grad,
                    double beta);

// Mean over the view's local nodes of ||H^(l)(v) - h^(l)(v)||^2 for each
// layer, where h is the exact full-neighborhood forward pass under `params`.
// Index 0 is layer 1. Cross-client neighbors are excluded from the exact
// pass, matching the estimator's own aggregation.
std::vector<double> TrackingErrorProbe(const EmbeddingState& state,
                                       const ModelParams& params,
                                       const GraphView& view);

}  // namespace fedgnn

#endif  // FEDGNN_ESTIMATORS_H_
