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

// Text checkpoint format.
//
// Line 1 is a JSON object describing the model:
//   {"format":"fedgnn-checkpoint","version":1,"architecture":"sage",
//    "activation":"tanh","task":"edge","gin_epsilon":0,"dims":[...],
//    "num_classes":2,"tensors":N}
// Then, for each of the N tensors, a JSON header line
//   {"name":"layer1","rows":R,"cols":C}
// followed by R lines of C comma-separated values in shortest round-trip
// decimal form. Tensors appear as layer1..layerL, edge_head, task_head.

#ifndef FEDGNN_CHECKPOINT_H_
#define FEDGNN_CHECKPOINT_H_

#include <filesystem>
#include <iosfwd>
#include <string>

#include "fedgnn/common.h"
#include "fedgnn/model.h"

namespace fedgnn {

void WriteMatrix(std::ostream& os, const std::string& name, const Matrix& m);
// Reads one header + rows block; `name` receives the stored name.
Matrix ReadMatrix(std::istream& is, std::string* name);

void WriteCheckpoint(std::ostream& os, const ModelParams& params);
ModelParams ReadCheckpoint(std::istream& is);

void SaveCheckpoint(const std::filesystem::path& path, const ModelParams& params);
ModelParams LoadCheckpoint(const std::filesystem::path& path);

}  // namespace fedgnn

#endif  // FEDGNN_CHECKPOINT_H_
