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

#include "fedgnn/attack.h"

#include <algorithm>
#include <limits>

namespace fedgnn {

Vector ObserveEmbedding(const ModelParams& params, const GraphView& view,
                        const ComputationPlan& plan, NodeId target) {
  return ForwardPlan(params, view, plan, {}, {}).FinalEmbedding(target);
}

AttackResult AiaAttack(const ModelParams& params, const GraphView& view,
                       const ComputationPlan& plan, NodeId target,
                       const Vector& observed, const Vector& init,
                       const AttackConfig& config) {
  if (config.iterations < 0) throw ConfigError("attack iterations must be >= 0");
  if (!(config.step > 0.0)) throw ConfigError("attack step must be > 0");
  if (plan.sets.empty() ||
      !std::binary_search(plan.sets.back().begin(), plan.sets.back().end(), target)) {
    throw ConfigError("attack target is not a root of the plan");
  }
  if (observed.size() != params.config.embedding_dim()) {
    throw ConfigError("observed embedding width does not match model");
  }
  StopGradientMap override_map;
  override_map[target] = init;
  ForwardOptions options;
  options.input_override = &override_map;

  AttackResult result;
  result.reconstructed = init;
  result.objective = std::numeric_limits<double>::infinity();
  for (int it = 0; it <= config.iterations; ++it) {
    const ForwardTrace trace = ForwardPlan(params, view, plan, {}, {}, options);
    const int row = trace.FinalRow(target);
    const Vector residual =
        trace.layers.back().act.row(row).transpose() - observed;
    const double objective = residual.squaredNorm();
    Vector& x = override_map[target];
    if (objective < result.objective) {
      result.objective = objective;
      result.reconstructed = x;
      result.best_iteration = it;
    }
    result.iterations_run = it;
    if (objective <= config.tolerance) {
      result.converged = true;
      break;
    }
    if (it == config.iterations) break;
    Matrix d_final = Matrix::Zero(trace.layers.back().act.rows(),
                                  trace.layers.back().act.cols());
    d_final.row(row) = 2.0 * residual.transpose();
    const Gradients g = BackwardFromEmbeddings(trace, params, d_final, true);
    const Vector grad = g.InputGradient(trace, target);
    if (grad.squaredNorm() <= config.tolerance) {
      result.converged = true;
      break;
    }
    x -= config.step * grad;
  }
  const Vector truth = view.graph().features().row(target).transpose();
  result.mse = (result.reconstructed - truth).squaredNorm() /
               static_cast<double>(truth.size());
  return result;
}

}  // namespace fedgnn
