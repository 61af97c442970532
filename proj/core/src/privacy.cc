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

#include "fedgnn/privacy.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>
#include <utility>

namespace fedgnn {
namespace {

constexpr int kAlphaGrid = 2000;
constexpr double kAlphaMinOffset = 1e-6;
constexpr double kAlphaMaxOffset = 1e6;

// Objective as a function of t = log(alpha - 1).
double Objective(double t, double a, double log_delta) {
  const double am1 = std::exp(t);
  const double alpha = 1.0 + am1;
  return a * alpha + std::log(am1 / alpha) -
         (log_delta + std::log(alpha)) / am1;
}

}  // namespace

void ValidateNoise(const NoiseConfig& noise) {
  auto bad = [](const char* name, double v) {
    throw ConfigError(std::string(name) + " out of range: " + std::to_string(v));
  };
  if (!(noise.sigma0 >= 0.0)) bad("sigma0", noise.sigma0);
  if (!(noise.sigma1 >= 0.0)) bad("sigma1", noise.sigma1);
  if (!(noise.sigma2 >= 0.0)) bad("sigma2", noise.sigma2);
  if (!(noise.clip_embed > 0.0)) bad("clip_embed", noise.clip_embed);
  if (!(noise.clip_model > 0.0)) bad("clip_model", noise.clip_model);
  if (!(noise.delta > 0.0 && noise.delta < 1.0)) bad("delta", noise.delta);
}

void ClipAndNoise(Vector& x, double clip, double sigma, Rng& rng) {
  const double norm = x.norm();
  if (norm > clip) x *= clip / norm;
  if (sigma > 0.0) {
    std::normal_distribution<double> normal(0.0, sigma);
    for (Eigen::Index i = 0; i < x.size(); ++i) x(i) += normal(rng);
  }
}

void ClipAndNoise(ParamSet& x, double clip, double sigma, Rng& rng) {
  const double norm = std::sqrt(x.SquaredNorm());
  if (norm > clip) x.Scale(clip / norm);
  if (sigma > 0.0) {
    std::normal_distribution<double> normal(0.0, sigma);
    for (std::size_t t = 0; t < x.num_tensors(); ++t) {
      Matrix& m = x.tensor(t);
      for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] += normal(rng);
    }
  }
}

double MdpEpsilon(double rho, double sigma0, double rounds_shared,
                  double delta) {
  if (!(rho >= 0.0) || !std::isfinite(rho)) {
    throw ConfigError("rho must be finite and >= 0");
  }
  if (!(sigma0 >= 0.0)) throw ConfigError("sigma0 must be >= 0");
  if (!(rounds_shared >= 1.0)) throw ConfigError("rounds_shared must be >= 1");
  if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("delta must be in (0, 1)");
  if (sigma0 == 0.0) return std::numeric_limits<double>::infinity();

  const double a = rounds_shared * rho * rho / (2.0 * sigma0 * sigma0);
  const double log_delta = std::log(delta);
  const double t0 = std::log(kAlphaMinOffset);
  const double t1 = std::log(kAlphaMaxOffset);
  const double dt = (t1 - t0) / (kAlphaGrid - 1);

  int best = 0;
  double best_value = std::numeric_limits<double>::infinity();
  for (int i = 0; i < kAlphaGrid; ++i) {
    const double v = Objective(t0 + dt * i, a, log_delta);
    if (v < best_value) {
      best_value = v;
      best = i;
    }
  }
  // Golden-section search on the bracket around the best grid point.
  double lo = t0 + dt * std::max(best - 1, 0);
  double hi = t0 + dt * std::min(best + 1, kAlphaGrid - 1);
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi - inv_phi * (hi - lo);
  double d = lo + inv_phi * (hi - lo);
  double fc = Objective(c, a, log_delta);
  double fd = Objective(d, a, log_delta);
  for (int it = 0; it < 100 && hi - lo > 1e-12; ++it) {
    if (fc < fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - inv_phi * (hi - lo);
      fc = Objective(c, a, log_delta);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + inv_phi * (hi - lo);
      fd = Objective(d, a, log_delta);
    }
  }
  best_value = std::min({best_value, fc, fd});
  return std::max(best_value, 0.0);
}

RhoResult RhoPercentiles(const Matrix& embeddings, int k,
                         std::span<const double> percentiles) {
  if (k < 1) throw ConfigError("k must be >= 1");
  for (double q : percentiles) {
    if (!(q > 0.0 && q <= 100.0)) {
      throw ConfigError("percentile must be in (0, 100], got " + std::to_string(q));
    }
  }
  RhoResult out;
  std::vector<Vector> points;
  for (Eigen::Index i = 0; i < embeddings.rows(); ++i) {
    // Sequential sums keep the result independent of vectorization.
    double sq = 0.0;
    for (Eigen::Index c = 0; c < embeddings.cols(); ++c) {
      sq += embeddings(i, c) * embeddings(i, c);
    }
    if (sq == 0.0) {
      ++out.dropped_zero;
      continue;
    }
    const double norm = std::sqrt(sq);
    Vector p(embeddings.cols());
    for (Eigen::Index c = 0; c < embeddings.cols(); ++c) {
      p(c) = embeddings(i, c) / norm;
    }
    points.push_back(std::move(p));
  }
  const std::size_t n = points.size();
  out.points = n;
  if (n < static_cast<std::size_t>(k) + 1) {
    throw ValidationError("need at least " + std::to_string(k + 1) +
                          " nonzero embeddings, got " + std::to_string(n));
  }
  std::vector<double> kth(n);
  std::vector<double> dist;
  dist.reserve(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    dist.clear();
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      double s = 0.0;
      for (Eigen::Index c = 0; c < points[i].size(); ++c) {
        const double diff = points[i](c) - points[j](c);
        s += diff * diff;
      }
      dist.push_back(std::sqrt(s));
    }
    std::nth_element(dist.begin(), dist.begin() + (k - 1), dist.end());
    kth[i] = dist[k - 1];
  }
  std::sort(kth.begin(), kth.end());
  for (double q : percentiles) {
    auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(n) / 100.0));
    rank = std::clamp<std::size_t>(rank, 1, n);
    out.rho.push_back(kth[rank - 1]);
  }
  return out;
}

std::optional<PrivacyReport> MakePrivacyReport(
    const Matrix& released, std::span<const int> release_counts,
    const NoiseConfig& noise, int k, std::span<const double> percentiles) {
  if (released.rows() != static_cast<Eigen::Index>(release_counts.size())) {
    throw ConfigError("release counts do not match released embeddings");
  }
  std::size_t nonzero = 0;
  for (Eigen::Index i = 0; i < released.rows(); ++i) {
    if (released.row(i).norm() > 0.0) ++nonzero;
  }
  if (nonzero < 2) return std::nullopt;
  PrivacyReport report;
  report.k = std::min<int>(k, static_cast<int>(nonzero) - 1);
  report.delta = noise.delta;
  report.sigma0 = noise.sigma0;
  report.released_nodes = static_cast<std::size_t>(released.rows());
  report.rounds_shared =
      *std::max_element(release_counts.begin(), release_counts.end());
  const RhoResult rho = RhoPercentiles(released, report.k, percentiles);
  report.dropped_zero = rho.dropped_zero;
  for (std::size_t i = 0; i < percentiles.size(); ++i) {
    report.rows.push_back(
        {percentiles[i], rho.rho[i],
         MdpEpsilon(rho.rho[i], noise.sigma0, std::max(report.rounds_shared, 1),
                    noise.delta)});
  }
  return report;
}

std::vector<double> PerNodeEpsilon(double rho, double sigma0,
                                   std::span<const int> release_counts,
                                   double delta) {
  std::vector<double> out;
  out.reserve(release_counts.size());
  for (int r : release_counts) {
    out.push_back(MdpEpsilon(rho, sigma0, std::max(r, 1), delta));
  }
  return out;
}

}  // namespace fedgnn
