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

#ifndef FEDGNN_PRIVACY_H_
#define FEDGNN_PRIVACY_H_

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "fedgnn/common.h"
#include "fedgnn/model.h"
#include "fedgnn/rng.h"

namespace fedgnn {

struct NoiseConfig {
  double sigma0 = 0.0;  // released embeddings
  double sigma1 = 0.0;  // aggregated parameters
  double sigma2 = 0.0;  // aggregated gradient moving average
  double clip_embed = 5.0;
  double clip_model = 15.0;
  double delta = 1e-5;
};

// Throws ConfigError naming the offending field.
void ValidateNoise(const NoiseConfig& noise);

// x <- x * min(1, clip / ||x||), then x + N(0, sigma^2 I).
void ClipAndNoise(Vector& x, double clip, double sigma, Rng& rng);

// Same mechanism over the concatenation of all tensors.
void ClipAndNoise(ParamSet& x, double clip, double sigma, Rng& rng);

// Metric-DP epsilon at distance rho after a node's embedding was shared
// rounds_shared times with Gaussian noise sigma0:
//
//   min over alpha > 1 of  R' alpha rho^2 / (2 sigma0^2)
//                          + log((alpha - 1) / alpha)
//                          - log(delta alpha) / (alpha - 1)
//
// clamped at zero. Returns +infinity when sigma0 == 0.
double MdpEpsilon(double rho, double sigma0, double rounds_shared,
                  double delta);

struct RhoResult {
  std::vector<double> rho;      // one per requested percentile
  std::size_t dropped_zero = 0;  // zero rows excluded before normalizing
  std::size_t points = 0;        // rows actually used
};

// Rows of `embeddings` are L2-normalized; for each row the distance to its
// k-th nearest other row is taken, and the nearest-rank percentile of those
// distances is reported for every q in `percentiles` (0 < q <= 100).
// Throws ValidationError with fewer than k + 1 usable rows.
RhoResult RhoPercentiles(const Matrix& embeddings, int k,
                         std::span<const double> percentiles);

inline constexpr double kDefaultPercentiles[] = {50, 90, 95, 99, 100};
inline constexpr double kHeadlinePercentile = 90;
inline constexpr int kDefaultNeighbors = 50;

struct PrivacyRow {
  double percentile = 0.0;
  double rho = 0.0;
  double epsilon = 0.0;
};

struct PrivacyReport {
  int k = 0;  // neighbor rank actually used
  double delta = 0.0;
  double sigma0 = 0.0;
  int rounds_shared = 0;  // R' = max over released nodes
  std::size_t released_nodes = 0;
  std::size_t dropped_zero = 0;
  std::vector<PrivacyRow> rows;
};

// `released` holds the final released embedding of each node (one row per
// node) and `release_counts` its R'(v). k is lowered to n - 1 when fewer
// than k + 1 embeddings were released. Empty when nothing was released.
std::optional<PrivacyReport> MakePrivacyReport(
    const Matrix& released, std::span<const int> release_counts,
    const NoiseConfig& noise, int k = kDefaultNeighbors,
    std::span<const double> percentiles = kDefaultPercentiles);

// Per-node epsilon at one rho, using each node's own release count.
std::vector<double> PerNodeEpsilon(double rho, double sigma0,
                                   std::span<const int> release_counts,
                                   double delta);

}  // namespace fedgnn

#endif  // FEDGNN_PRIVACY_H_
