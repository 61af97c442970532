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

#ifndef FEDGNN_METRICS_H_
#define FEDGNN_METRICS_H_

#include <span>

#include "fedgnn/common.h"

namespace fedgnn {

// Unweighted mean of per-class F1 over the classes present in either
// `truth` or `predicted`. A class with no true positives scores 0. Returns 0
// for empty input.
double MacroF1(std::span<const Label> truth, std::span<const Label> predicted);

}  // namespace fedgnn

#endif  // FEDGNN_METRICS_H_
