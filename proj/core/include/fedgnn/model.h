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

#ifndef FEDGNN_MODEL_H_
#define FEDGNN_MODEL_H_

#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "fedgnn/common.h"

namespace fedgnn {

enum class Architecture { kSageMean, kGcn, kGin };
enum class Activation { kTanh, kLeakyRelu };
enum class TaskKind { kEdge, kNode };

std::string_view ToString(Architecture a);
std::string_view ToString(Activation a);
Architecture ParseArchitecture(std::string_view s);
Activation ParseActivation(std::string_view s);
std::string_view ToString(TaskKind t);
TaskKind ParseTaskKind(std::string_view s);

inline constexpr double kLeakySlope = 0.01;

inline double Activate(Activation act, double x) {
  if (act == Activation::kTanh) return std::tanh(x);
  return x > 0.0 ? x : kLeakySlope * x;
}

// Derivative evaluated at the pre-activation value.
inline double ActivateDerivative(Activation act, double pre) {
  if (act == Activation::kTanh) {
    const double t = std::tanh(pre);
    return 1.0 - t * t;
  }
  return pre > 0.0 ? 1.0 : kLeakySlope;
}

Matrix Activate(Activation act, const Matrix& pre);

struct ModelConfig {
  Architecture architecture = Architecture::kSageMean;
  Activation activation = Activation::kTanh;
  TaskKind task = TaskKind::kEdge;
  double gin_epsilon = 0.0;
  // d0 (input features), d1, ..., dL.
  std::vector<int> dims;
  int num_classes = 2;

  int num_layers() const { return static_cast<int>(dims.size()) - 1; }
  int embedding_dim() const { return dims.back(); }
};

// Throws ConfigError naming the offending layer.
void ValidateConfig(const ModelConfig& config);

// Every trainable tensor of the model, in a fixed order:
//   layer1..layerL  W^(l), d_l x d_{l-1}
//   edge_head       W^e,   d_L x d_L
//   task_head       W^(L+1), C x d_L
//
// Also used for gradients and gradient moving averages, so arithmetic lives
// here.
struct ParamSet {
  std::vector<Matrix> layers;
  Matrix edge_head;
  Matrix task_head;

  std::size_t num_tensors() const { return layers.size() + 2; }
  Matrix& tensor(std::size_t i);
  const Matrix& tensor(std::size_t i) const;
  std::string tensor_name(std::size_t i) const;

  std::size_t num_elements() const;
  bool SameShape(const ParamSet& other) const;
  bool AllFinite() const;
  double SquaredNorm() const;

  void SetZero();
  // this += alpha * x
  void Axpy(double alpha, const ParamSet& x);
  void Scale(double alpha);

  static ParamSet ZerosLike(const ParamSet& shape);
};

struct ModelParams {
  ModelConfig config;
  ParamSet weights;
};

// Uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)] from a seeded stream.
ModelParams InitParams(const ModelConfig& config, std::uint64_t seed);

}  // namespace fedgnn

#endif  // FEDGNN_MODEL_H_
