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

#include "fedgnn/metrics.h"

#include <map>

namespace fedgnn {

double MacroF1(std::span<const Label> truth, std::span<const Label> predicted) {
  if (truth.size() != predicted.size()) {
    throw ConfigError("truth and prediction lengths differ");
  }
  struct Counts {
    long tp = 0;
    long fp = 0;
    long fn = 0;
  };
  std::map<Label, Counts> per_class;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] == predicted[i]) {
      ++per_class[truth[i]].tp;
    } else {
      ++per_class[truth[i]].fn;
      ++per_class[predicted[i]].fp;
    }
  }
  if (per_class.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& [label, c] : per_class) {
    const long denom = 2 * c.tp + c.fp + c.fn;
    sum += denom > 0 ? 2.0 * static_cast<double>(c.tp) / static_cast<double>(denom) : 0.0;
  }
  return sum / static_cast<double>(per_class.size());
}

}  // namespace fedgnn
