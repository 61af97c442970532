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

#include "fedgnn/model.h"

#include <cmath>
#include <random>

#include "fedgnn/rng.h"

namespace fedgnn {

std::string_view ToString(Architecture a) {
  switch (a) {
    case Architecture::kSageMean: return "sage";
    case Architecture::kGcn: return "gcn";
    case Architecture::kGin: return "gin";
  }
  return "unknown";
}

std::string_view ToString(Activation a) {
  return a == Activation::kTanh ? "tanh" : "leaky_relu";
}

std::string_view ToString(TaskKind t) {
  return t == TaskKind::kEdge ? "edge" : "node";
}

TaskKind ParseTaskKind(std::string_view s) {
  if (s == "edge") return TaskKind::kEdge;
  if (s == "node") return TaskKind::kNode;
  throw ValidationError("unknown task '" + std::string(s) + "'");
}

Architecture ParseArchitecture(std::string_view s) {
  if (s == "sage" || s == "sage_mean") return Architecture::kSageMean;
  if (s == "gcn") return Architecture::kGcn;
  if (s == "gin") return Architecture::kGin;
  throw ValidationError("unknown architecture '" + std::string(s) + "'");
}

Activation ParseActivation(std::string_view s) {
  if (s == "tanh") return Activation::kTanh;
  if (s == "leaky_relu") return Activation::kLeakyRelu;
  throw ValidationError("unknown activation '" + std::string(s) + "'");
}

Matrix Activate(Activation act, const Matrix& pre) {
  if (act == Activation::kTanh) return pre.array().tanh().matrix();
  return pre.unaryExpr([](double x) { return x > 0.0 ? x : kLeakySlope * x; });
}

void ValidateConfig(const ModelConfig& config) {
  if (config.dims.size() < 2) {
    throw ConfigError("model needs at least one message-passing layer");
  }
  for (std::size_t l = 0; l < config.dims.size(); ++l) {
    if (config.dims[l] <= 0) {
      throw ConfigError("layer " + std::to_string(l) +
                        " has non-positive width " +
                        std::to_string(config.dims[l]));
    }
  }
  if (config.num_classes < 2) {
    throw ConfigError("task_head needs at least two classes");
  }
}

Matrix& ParamSet::tensor(std::size_t i) {
  if (i < layers.size()) return layers[i];
  return i == layers.size() ? edge_head : task_head;
}

const Matrix& ParamSet::tensor(std::size_t i) const {
  if (i < layers.size()) return layers[i];
  return i == layers.size() ? edge_head : task_head;
}

std::string ParamSet::tensor_name(std::size_t i) const {
  if (i < layers.size()) return "layer" + std::to_string(i + 1);
  return i == layers.size() ? "edge_head" : "task_head";
}

std::size_t ParamSet::num_elements() const {
  std::size_t n = 0;
  for (std::size_t i = 0; i < num_tensors(); ++i) n += tensor(i).size();
  return n;
}

bool ParamSet::SameShape(const ParamSet& other) const {
  if (layers.size() != other.layers.size()) return false;
  for (std::size_t i = 0; i < num_tensors(); ++i) {
    if (tensor(i).rows() != other.tensor(i).rows() ||
        tensor(i).cols() != other.tensor(i).cols()) {
      return false;
    }
  }
  return true;
}

bool ParamSet::AllFinite() const {
  for (std::size_t i = 0; i < num_tensors(); ++i) {
    if (!tensor(i).allFinite()) return false;
  }
  return true;
}

double ParamSet::SquaredNorm() const {
  double s = 0.0;
  for (std::size_t i = 0; i < num_tensors(); ++i) s += tensor(i).squaredNorm();
  return s;
}

void ParamSet::SetZero() {
  for (std::size_t i = 0; i < num_tensors(); ++i) tensor(i).setZero();
}

void ParamSet::Axpy(double alpha, const ParamSet& x) {
  for (std::size_t i = 0; i < num_tensors(); ++i) tensor(i) += alpha * x.tensor(i);
}

void ParamSet::Scale(double alpha) {
  for (std::size_t i = 0; i < num_tensors(); ++i) tensor(i) *= alpha;
}

ParamSet ParamSet::ZerosLike(const ParamSet& shape) {
  ParamSet out;
  out.layers.reserve(shape.layers.size());
  for (const Matrix& m : shape.layers) out.layers.push_back(Matrix::Zero(m.rows(), m.cols()));
  out.edge_head = Matrix::Zero(shape.edge_head.rows(), shape.edge_head.cols());
  out.task_head = Matrix::Zero(shape.task_head.rows(), shape.task_head.cols());
  return out;
}

ModelParams InitParams(const ModelConfig& config, std::uint64_t seed) {
  ValidateConfig(config);
  ModelParams p;
  p.config = config;
  Rng rng = MakeStream(seed, StreamPurpose::kInit);
  auto fill = [&rng](int rows, int cols) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(cols));
    std::uniform_real_distribution<double> dist(-bound, bound);
    Matrix m(rows, cols);
    // Column-major fill order is part of the seeded contract.
    for (int c = 0; c < cols; ++c) {
      for (int r = 0; r < rows; ++r) m(r, c) = dist(rng);
    }
    return m;
  };
  const int L = config.num_layers();
  for (int l = 1; l <= L; ++l) {
    p.weights.layers.push_back(fill(config.dims[l], config.dims[l - 1]));
  }
  const int dL = config.embedding_dim();
  p.weights.edge_head = fill(dL, dL);
  p.weights.task_head = fill(config.num_classes, dL);
  return p;
}

}  // namespace fedgnn
