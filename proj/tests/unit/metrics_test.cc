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

#include <vector>

#include "gtest/gtest.h"

namespace fedgnn {
namespace {

TEST(MacroF1Test, Perfect) {
  const std::vector<Label> y = {0, 1, 2, 1};
  EXPECT_DOUBLE_EQ(MacroF1(y, y), 1.0);
}

TEST(MacroF1Test, TwoClassExample) {
  const std::vector<Label> truth = {0, 0, 1, 1};
  const std::vector<Label> pred = {0, 1, 1, 1};
  // Class 0: P = 1, R = 1/2. Class 1: P = 2/3, R = 1.
  EXPECT_DOUBLE_EQ(MacroF1(truth, pred), (2.0 / 3.0 + 0.8) / 2.0);
}

TEST(MacroF1Test, PredictedOnlyClassCountsAsZero) {
  const std::vector<Label> truth = {0, 0};
  const std::vector<Label> pred = {0, 1};
  EXPECT_DOUBLE_EQ(MacroF1(truth, pred), (2.0 / 3.0) / 2.0);
}

TEST(MacroF1Test, ConstantPredictorOnImbalancedData) {
  std::vector<Label> truth(100, 0);
  for (int i = 0; i < 5; ++i) truth[i] = 1;
  const std::vector<Label> pred(100, 0);
  EXPECT_DOUBLE_EQ(MacroF1(truth, pred), (2.0 * 95 / 195) / 2.0);
}

TEST(MacroF1Test, EmptyAndMismatched) {
  EXPECT_EQ(MacroF1({}, {}), 0.0);
  const std::vector<Label> a = {0};
  const std::vector<Label> b = {0, 1};
  EXPECT_THROW(MacroF1(a, b), ConfigError);
}

}  // namespace
}  // namespace fedgnn
