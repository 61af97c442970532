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

#include "fedgnn/rng.h"

namespace fedgnn {
namespace {

// SplitMix64 finalizer.
std::uint64_t Mix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t MixSeed(std::uint64_t master, StreamPurpose purpose,
                      std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  std::uint64_t h = Mix(master);
  h = Mix(h ^ static_cast<std::uint64_t>(purpose));
  h = Mix(h ^ a);
  h = Mix(h ^ b);
  h = Mix(h ^ c);
  return h;
}

}  // namespace fedgnn
