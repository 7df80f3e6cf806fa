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

#include "uqfd/uq_class.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace uqfd
{
namespace
{

double entropy_of(std::span<const double> p)
{
  double h = 0.0;
  for (double pz : p) {
    if (pz > 0.0) {
      h -= pz * std::log(pz);
    }
  }
  return h;
}

void check_alpha(std::span<const double> alpha)
{
  if (alpha.size() < 2) {
    throw Error(ErrorKind::InvalidArgument, "alpha needs Z >= 2 entries");
  }
  for (double a : alpha) {
    if (!std::isfinite(a)) {
      throw Error(ErrorKind::NonFinite, "alpha is not finite");
    }
    if (a < 1.0) {
      throw Error(ErrorKind::InvalidArgument, "alpha entries must be >= 1");
    }
  }
}

}  // namespace

ProbMatrix::ProbMatrix(std::vector<ProbVector> rows) : rows_(std::move(rows))
{
  if (rows_.empty()) {
    throw Error(ErrorKind::EmptySet, "probability matrix needs K >= 1 rows");
  }
  for (const auto & row : rows_) {
    if (row.size() != rows_.front().size()) {
      throw Error(ErrorKind::ShapeMismatch, "probability rows differ in length");
    }
  }
}

double entropy(const ProbVector & p)
{
  return entropy_of(p.values());
}

ProbVector mean_probs(const ProbMatrix & probs)
{
  const std::size_t num_modes = probs.num_modes();
  const double k = static_cast<double>(probs.num_members());
  std::vector<double> mean(num_modes, 0.0);
  for (const auto & row : probs.rows()) {
    for (std::size_t z = 0; z < num_modes; ++z) {
      mean[z] += row[z];
    }
  }
  for (auto & m : mean) {
    m /= k;
  }
  return ProbVector::validate(mean);
}

double total_entropy(const ProbMatrix & probs)
{
  return entropy(mean_probs(probs));
}

double data_entropy(const ProbMatrix & probs)
{
  double sum = 0.0;
  for (const auto & row : probs.rows()) {
    sum += entropy(row);
  }
  return sum / static_cast<double>(probs.num_members());
}

double mutual_information(const ProbMatrix & probs)
{
  return total_entropy(probs) - data_entropy(probs);
}

double nmap(const ProbMatrix & probs)
{
  const auto mean = mean_probs(probs);
  return -mean[mean.argmax()];
}

ClassScores ensemble_class_scores(const ProbMatrix & probs)
{
  ClassScores scores;
  const auto mean = mean_probs(probs);
  scores.te = entropy(mean);
  scores.de = data_entropy(probs);
  scores.mi = scores.te - scores.de;
  scores.nmap = -mean[mean.argmax()];
  return scores;
}

EvidenceVector EvidenceVector::validate(std::span<const double> e)
{
  if (e.size() < 2) {
    throw Error(ErrorKind::InvalidArgument, "evidence needs Z >= 2 entries");
  }
  for (double v : e) {
    if (!std::isfinite(v)) {
      throw Error(ErrorKind::NonFinite, "evidence is not finite");
    }
    if (v < 0.0) {
      throw Error(ErrorKind::InvalidArgument, "evidence must be nonnegative");
    }
  }
  return EvidenceVector(std::vector<double>(e.begin(), e.end()));
}

std::vector<double> edl_alpha(const EvidenceVector & evidence)
{
  std::vector<double> alpha(evidence.values());
  for (auto & a : alpha) {
    a += 1.0;
  }
  for (double a : alpha) {
    if (!std::isfinite(a)) {
      throw Error(ErrorKind::NonFinite, "alpha overflowed");
    }
  }
  return alpha;
}

double edl_u(std::span<const double> alpha)
{
  check_alpha(alpha);
  const double strength = std::accumulate(alpha.begin(), alpha.end(), 0.0);
  if (!std::isfinite(strength)) {
    throw Error(ErrorKind::NonFinite, "Dirichlet strength is not finite");
  }
  return static_cast<double>(alpha.size()) / strength;
}

ClassScores edl_scores(std::span<const double> alpha)
{
  const double u = edl_u(alpha);
  const double strength = std::accumulate(alpha.begin(), alpha.end(), 0.0);

  std::vector<double> expected(alpha.size());
  for (std::size_t z = 0; z < alpha.size(); ++z) {
    expected[z] = alpha[z] / strength;
  }

  const double psi_total = digamma(strength + 1.0);
  double de = 0.0;
  for (std::size_t z = 0; z < alpha.size(); ++z) {
    de += expected[z] * (psi_total - digamma(alpha[z] + 1.0));
  }

  ClassScores scores;
  scores.te = entropy_of(expected);
  scores.de = de;
  scores.mi = scores.te - scores.de;
  scores.nmap = -*std::max_element(expected.begin(), expected.end());
  scores.u = u;
  return scores;
}

double digamma(double x)
{
  if (!std::isfinite(x)) {
    throw Error(ErrorKind::NonFinite, "digamma argument is not finite");
  }
  if (x <= 0.0) {
    throw Error(ErrorKind::InvalidArgument, "digamma is only defined here for x > 0");
  }
  double shift = 0.0;
  while (x < 10.0) {
    shift -= 1.0 / x;
    x += 1.0;
  }
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  // Bernoulli-number series: 1/12, 1/120, 1/252, 1/240, 1/132, 691/32760, 1/12
  const double series =
    inv2 *
    (1.0 / 12.0 -
     inv2 *
       (1.0 / 120.0 -
        inv2 *
          (1.0 / 252.0 -
           inv2 * (1.0 / 240.0 - inv2 * (1.0 / 132.0 - inv2 * (691.0 / 32760.0 - inv2 / 12.0))))));
  return shift + std::log(x) - 0.5 * inv - series;
}

}  // namespace uqfd
