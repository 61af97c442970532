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

#ifndef FEDGNN_ATTACK_H_
#define FEDGNN_ATTACK_H_

#include "fedgnn/common.h"
#include "fedgnn/forward.h"
#include "fedgnn/graph.h"
#include "fedgnn/model.h"
#include "fedgnn/sampling.h"

namespace fedgnn {

struct AttackConfig {
  int iterations = 500;
  double step = 0.1;
  // Stop once the objective or the gradient norm falls below this.
  double tolerance = 1e-20;
};

struct AttackResult {
  Vector reconstructed;  // best iterate
  double objective = 0.0;
  double mse = 0.0;  // against the true features, for evaluation only
  int best_iteration = 0;
  int iterations_run = 0;
  bool converged = false;
};

// Final-layer embedding of `target` computed over `plan`.
Vector ObserveEmbedding(const ModelParams& params, const GraphView& view,
                        const ComputationPlan& plan, NodeId target);

// Attribute inference: the attacker knows the parameters, the sampled
// neighborhood `plan` (background features come from the graph) and the
// target's observed embedding, and runs gradient descent on the target's
// features x' to minimize ||h^(L)(x') - observed||^2 starting from `init`.
AttackResult AiaAttack(const ModelParams& params, const GraphView& view,
                       const ComputationPlan& plan, NodeId target,
                       const Vector& observed, const Vector& init,
                       const AttackConfig& config = {});

}  // namespace fedgnn

#endif  // FEDGNN_ATTACK_H_
