// Copyright 2026 The uqfd Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Reference implementations used only to check the library against.

#ifndef UQFD_TESTS__ORACLES_HPP_
#define UQFD_TESTS__ORACLES_HPP_

#include "uqfd/core.hpp"
#include "uqfd/eval.hpp"
#include "uqfd/random.hpp"

#include <cmath>
#include <numbers>
#include <span>
#include <vector>

namespace uqfd::oracle
{

inline double shannon(std::span<const double> p)
{
  double h = 0.0;
  for (double v : p) {
    if (v > 0.0) {
      h -= v * std::log(v);
    }
  }
  return h;
}

/// Failure-vs-success pair counting: P(score_fail > score_ok) + 0.5 P(tie).
inline double pairwise_auroc(std::span<const LabeledScore> items)
{
  double wins = 0.0;
  double pairs = 0.0;
  for (const auto & f : items) {
    if (!(f.target < 0.5)) {
      continue;
    }
    for (const auto & s : items) {
      if (s.target < 0.5) {
        continue;
      }
      pairs += 1.0;
      if (f.score > s.score) {
        wins += 1.0;
      } else if (f.score == s.score) {
        wins += 0.5;
      }
    }
  }
  return wins / pairs;
}

/// Midpoint-rule integral of the piecewise-linear curve through the points.
inline double dense_integral(const std::vector<CurvePoint> & pts, std::size_t cells)
{
  double sum = 0.0;
  std::size_t seg = 0;
  for (std::size_t i = 0; i < cells; ++i) {
    const double q = (static_cast<double>(i) + 0.5) / static_cast<double>(cells);
    while (seg + 2 < pts.size() && pts[seg + 1].q < q) {
      ++seg;
    }
    const auto & a = pts[seg];
    const auto & b = pts[seg + 1];
    const double t = (q - a.q) / (b.q - a.q);
    sum += a.v + t * (b.v - a.v);
  }
  return sum / static_cast<double>(cells);
}

/// Position after time t on a circle entered at `start` with signed yaw rate w.
inline Point2 arc_position(const AgentState & start, double w, double t)
{
  const double r = start.speed / w;
  // center sits a radius to the left (w > 0) or right (w < 0) of the heading
  const double cx = start.x - r * std::sin(start.heading);
  const double cy = start.y + r * std::cos(start.heading);
  const double phi = start.heading + w * t;
  return {cx + r * std::sin(phi), cy - r * std::cos(phi)};
}

/// Entropy of a 2-D Gaussian from the eigenvalues of its covariance.
inline double gaussian_entropy_from_eigen(double xx, double xy, double yy)
{
  const double tr = xx + yy;
  const double disc = std::sqrt((xx - yy) * (xx - yy) + 4.0 * xy * xy);
  const double l1 = 0.5 * (tr + disc);
  const double l2 = 0.5 * (tr - disc);
  return 1.0 + std::log(2.0 * std::numbers::pi) + 0.5 * (std::log(l1) + std::log(l2));
}

/// Random probability vector of length z with some exact zeros.
inline std::vector<double> random_probs(Rng & rng, std::size_t z)
{
  std::vector<double> p(z);
  double sum = 0.0;
  for (auto & v : p) {
    v = rng.uniform() < 0.1 ? 0.0 : -std::log(1.0 - rng.uniform());
    sum += v;
  }
  if (sum == 0.0) {
    p[rng.below(z)] = 1.0;
    return p;
  }
  for (auto & v : p) {
    v /= sum;
  }
  return p;
}

}  // namespace uqfd::oracle

#endif  // UQFD_TESTS__ORACLES_HPP_
