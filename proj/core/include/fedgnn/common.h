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

#ifndef FEDGNN_COMMON_H_
#define FEDGNN_COMMON_H_

#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace fedgnn {

// Dense, zero-based indices assigned at graph construction. External ids read
// from CSV are kept on the graph and only used for I/O.
using NodeId = std::uint32_t;
using EdgeId = std::uint32_t;
using ClientId = std::uint32_t;

// Class label; kNoLabel marks an unlabeled node or edge.
using Label = std::int32_t;
inline constexpr Label kNoLabel = -1;

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Invalid user input: bad config values, malformed files, dangling ids.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Inconsistent model or tensor shapes.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Violation of the round protocol (missing client output and the like).
class ProtocolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Non-finite values produced during training.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace fedgnn

#endif  // FEDGNN_COMMON_H_
