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

#ifndef FEDGNN_RNG_H_
#define FEDGNN_RNG_H_

#include <cstdint>
#include <random>

namespace fedgnn {

// Purposes get disjoint stream families so that, for example, privacy noise
// never shifts the data-sampling sequence.
enum class StreamPurpose : std::uint64_t {
  kSampling = 1,
  kEmbeddingNoise = 2,
  kAggregateNoise = 3,
  kInit = 4,
  kGeneration = 5,
  kSplit = 6,
  kAttack = 7,
};

// Counter-based stream derivation: the engine for (purpose, a, b, c) depends
// only on the master seed and those counters, never on call order.
std::uint64_t MixSeed(std::uint64_t master, StreamPurpose purpose,
                      std::uint64_t a = 0, std::uint64_t b = 0,
                      std::uint64_t c = 0);

using Rng = std::mt19937_64;

inline Rng MakeStream(std::uint64_t master, StreamPurpose purpose,
                      std::uint64_t a = 0, std::uint64_t b = 0,
                      std::uint64_t c = 0) {
  return Rng(MixSeed(master, purpose, a, b, c));
}

}  // namespace fedgnn

#endif  // FEDGNN_RNG_H_
