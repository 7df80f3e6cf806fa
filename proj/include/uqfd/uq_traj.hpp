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

#ifndef UQFD__UQ_TRAJ_HPP_
#define UQFD__UQ_TRAJ_HPP_

#include "uqfd/core.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace uqfd
{

inline constexpr double default_cov_eps = 1e-6;  // m^2

enum class GroupProvenance {
  PerModelTrueManeuver,
  CrossModelAveragedPerManeuver,
  PerModelAllModes,
  PooledAll,
  MaxpPerModel,
};

/// n >= 1 equal-length trajectories whose per-step spread is scored.
struct TrajGroup
{
  std::vector<Trajectory> trajs;
  GroupProvenance provenance = GroupProvenance::PooledAll;
};

struct Cov2
{
  double xx = 0.0;
  double xy = 0.0;
  double yy = 0.0;

  double det() const noexcept { return xx * yy - xy * xy; }
};

struct GaussianStep
{
  Point2 mean;
  Cov2 cov;
};

/**
 * @brief Per-step bivariate Gaussian fit over the group's positions.
 *
 * Sample mean and unbiased covariance (n - 1 divisor; zero when n = 1), plus eps on the
 * diagonal so the fit stays positive definite for coincident trajectories.
 */
std::vector<GaussianStep> fit_step_gaussians(const TrajGroup & group, double eps = default_cov_eps);

/// Differential entropy (ln 2 pi + 1) + 0.5 ln det(cov), nats. Throws SingularCovariance.
double gaussian_step_entropy(const GaussianStep & step);

/// Average predictive entropy over all steps.
double ape(const TrajGroup & group, double eps = default_cov_eps);
/// Predictive entropy at the final step.
double fpe(const TrajGroup & group, double eps = default_cov_eps);

/**
 * @brief Trajectory-stage scores of one ensemble output.
 *
 * Fields that need cross-model spread (ape_z, fpe_z, ape_avg, fpe_avg, ape_maxp) are empty
 * for K = 1.
 */
struct TrajScores
{
  std::optional<double> ape_z;
  std::optional<double> fpe_z;
  std::optional<double> ape_avg;
  std::optional<double> fpe_avg;
  double mean_ape = 0.0;
  double mean_fpe = 0.0;
  double ape_all = 0.0;
  std::optional<double> ape_maxp;
};

TrajScores trajectory_score_suite(
  const EnsembleOutput & ensemble, std::size_t true_maneuver, double eps = default_cov_eps);

/// The K trajectories the members predict for one maneuver.
TrajGroup true_maneuver_group(const EnsembleOutput & ensemble, std::size_t maneuver);
/// Z trajectories, each the member average for one maneuver.
TrajGroup averaged_per_maneuver_group(const EnsembleOutput & ensemble);
/// All K * Z trajectories.
TrajGroup pooled_group(const EnsembleOutput & ensemble);
/// Each member's highest-probability trajectory.
TrajGroup maxp_group(const EnsembleOutput & ensemble);

struct ClusterResult
{
  std::vector<Trajectory> centers;        // sorted by cluster size, descending
  std::vector<std::size_t> assignments;   // input index -> center index
  std::vector<double> cost_history;       // objective after each assignment step
  std::size_t iterations = 0;
};

/// Sum over trajectories of the squared flattened distance to the assigned center.
double clustering_cost(
  std::span<const Trajectory> trajs, std::span<const Trajectory> centers,
  std::span<const std::size_t> assignments);

/**
 * @brief Lloyd k-means over pooled trajectories viewed as flattened 2 t_f vectors.
 *
 * Deterministic farthest-point seeding: the first center is the trajectory with the largest
 * norm, each further center the trajectory farthest from the chosen ones (lowest index on
 * ties). Runs until assignments stop changing or 100 iterations. The seed only drives the
 * choice of donor point when a cluster empties.
 */
ClusterResult unified_cluster(
  std::span<const Trajectory> trajs, std::size_t num_clusters, std::uint64_t seed);

}  // namespace uqfd

#endif  // UQFD__UQ_TRAJ_HPP_
