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

#ifndef UQFD__UQ_CLASS_HPP_
#define UQFD__UQ_CLASS_HPP_

#include "uqfd/core.hpp"

#include <optional>
#include <span>
#include <vector>

namespace uqfd
{

/**
 * @brief Maneuver distributions of K ensemble members over the same Z maneuvers.
 *
 * K = 1 is a single model; every score below then reduces to its single-model form
 * (TE = DE, MI = 0).
 */
class ProbMatrix
{
public:
  explicit ProbMatrix(std::vector<ProbVector> rows);

  std::size_t num_members() const noexcept { return rows_.size(); }
  std::size_t num_modes() const noexcept { return rows_.front().size(); }
  const ProbVector & row(std::size_t k) const { return rows_[k]; }
  const std::vector<ProbVector> & rows() const noexcept { return rows_; }

private:
  std::vector<ProbVector> rows_;
};

/// All entropies are in nats; 0 ln 0 := 0.
double entropy(const ProbVector & p);

ProbVector mean_probs(const ProbMatrix & probs);
double total_entropy(const ProbMatrix & probs);
double data_entropy(const ProbMatrix & probs);
/// TE - DE. Not clamped: may be slightly negative from rounding.
double mutual_information(const ProbMatrix & probs);
/// Negative maximum of the member-averaged probabilities.
double nmap(const ProbMatrix & probs);

struct ClassScores
{
  double te = 0.0;
  double de = 0.0;
  double mi = 0.0;
  double nmap = 0.0;
  std::optional<double> u;  // evidential scores only
};

ClassScores ensemble_class_scores(const ProbMatrix & probs);

/// Nonnegative finite per-maneuver evidence from an evidential head.
class EvidenceVector
{
public:
  static EvidenceVector validate(std::span<const double> e);

  std::size_t size() const noexcept { return e_.size(); }
  const std::vector<double> & values() const noexcept { return e_; }

private:
  explicit EvidenceVector(std::vector<double> e) : e_(std::move(e)) {}
  std::vector<double> e_;
};

/// Dirichlet concentration alpha_z = e_z + 1.
std::vector<double> edl_alpha(const EvidenceVector & evidence);

/// Uncertainty mass Z / sum(alpha). Requires every alpha_z >= 1.
double edl_u(std::span<const double> alpha);

/**
 * @brief TE, DE, MI, NMaP and u under a Dirichlet(alpha) maneuver prior.
 *
 * TE is the entropy of the expected distribution alpha / S. DE is the expected categorical
 * entropy under the Dirichlet, sum_z (alpha_z / S) (psi(S + 1) - psi(alpha_z + 1)).
 */
ClassScores edl_scores(std::span<const double> alpha);

/// Digamma for x > 0: upward recurrence to x >= 10, then the asymptotic series.
double digamma(double x);

}  // namespace uqfd

#endif  // UQFD__UQ_CLASS_HPP_
