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

#include "uqfd/uq_traj.hpp"

#include "uqfd/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

namespace uqfd
{
namespace
{

const double gaussian_entropy_offset = std::log(2.0 * std::numbers::pi) + 1.0;

void check_group(const TrajGroup & group)
{
  if (group.trajs.empty()) {
    throw Error(ErrorKind::EmptySet, "trajectory group is empty");
  }
  const std::size_t horizon = group.trajs.front().size();
  for (const auto & traj : group.trajs) {
    if (traj.size() != horizon) {
      throw Error(ErrorKind::ShapeMismatch, "trajectory group mixes horizons");
    }
  }
}

void check_ensemble(const EnsembleOutput & ensemble)
{
  validate_ensemble_output(ensemble);
}

double squared_distance(const Trajectory & a, const Trajectory & b)
{
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double dx = a[i].x - b[i].x;
    const double dy = a[i].y - b[i].y;
    d += dx * dx + dy * dy;
  }
  return d;
}

double squared_norm(const Trajectory & a)
{
  double d = 0.0;
  for (const auto & pt : a.points()) {
    d += pt.x * pt.x + pt.y * pt.y;
  }
  return d;
}

}  // namespace

std::vector<GaussianStep> fit_step_gaussians(const TrajGroup & group, double eps)
{
  if (!(eps > 0.0) || !std::isfinite(eps)) {
    throw Error(ErrorKind::InvalidArgument, "covariance regularizer eps must be > 0");
  }
  check_group(group);
  const std::size_t n = group.trajs.size();
  const std::size_t horizon = group.trajs.front().size();
  const double count = static_cast<double>(n);

  std::vector<GaussianStep> steps(horizon);
  for (std::size_t i = 0; i < horizon; ++i) {
    double mx = 0.0;
    double my = 0.0;
    for (const auto & traj : group.trajs) {
      mx += traj[i].x;
      my += traj[i].y;
    }
    mx /= count;
    my /= count;

    Cov2 cov;
    if (n >= 2) {
      for (const auto & traj : group.trajs) {
        const double dx = traj[i].x - mx;
        const double dy = traj[i].y - my;
        cov.xx += dx * dx;
        cov.xy += dx * dy;
        cov.yy += dy * dy;
      }
      const double denom = count - 1.0;
      cov.xx /= denom;
      cov.xy /= denom;
      cov.yy /= denom;
    }
    cov.xx += eps;
    cov.yy += eps;
    steps[i] = {{mx, my}, cov};
  }
  return steps;
}

double gaussian_step_entropy(const GaussianStep & step)
{
  const double det = step.cov.det();
  if (!(det > 0.0) || !(step.cov.xx > 0.0)) {
    throw Error(ErrorKind::SingularCovariance, "step covariance is not positive definite");
  }
  return gaussian_entropy_offset + 0.5 * std::log(det);
}

double ape(const TrajGroup & group, double eps)
{
  const auto steps = fit_step_gaussians(group, eps);
  double sum = 0.0;
  for (const auto & step : steps) {
    sum += gaussian_step_entropy(step);
  }
  return sum / static_cast<double>(steps.size());
}

double fpe(const TrajGroup & group, double eps)
{
  const auto steps = fit_step_gaussians(group, eps);
  return gaussian_step_entropy(steps.back());
}

TrajGroup true_maneuver_group(const EnsembleOutput & ensemble, std::size_t maneuver)
{
  check_ensemble(ensemble);
  if (maneuver >= ensemble.num_modes()) {
    throw Error(
      ErrorKind::MissingManeuver, "maneuver " + std::to_string(maneuver) + " is not predicted");
  }
  TrajGroup group{{}, GroupProvenance::PerModelTrueManeuver};
  for (const auto & member : ensemble.members) {
    group.trajs.push_back(member.mode_trajectories[maneuver]);
  }
  return group;
}

TrajGroup averaged_per_maneuver_group(const EnsembleOutput & ensemble)
{
  check_ensemble(ensemble);
  TrajGroup group{{}, GroupProvenance::CrossModelAveragedPerManeuver};
  for (std::size_t z = 0; z < ensemble.num_modes(); ++z) {
    std::vector<Trajectory> per_model;
    for (const auto & member : ensemble.members) {
      per_model.push_back(member.mode_trajectories[z]);
    }
    group.trajs.push_back(average_trajectory(per_model));
  }
  return group;
}

TrajGroup pooled_group(const EnsembleOutput & ensemble)
{
  check_ensemble(ensemble);
  TrajGroup group{{}, GroupProvenance::PooledAll};
  for (const auto & member : ensemble.members) {
    group.trajs.insert(
      group.trajs.end(), member.mode_trajectories.begin(), member.mode_trajectories.end());
  }
  return group;
}

TrajGroup maxp_group(const EnsembleOutput & ensemble)
{
  check_ensemble(ensemble);
  TrajGroup group{{}, GroupProvenance::MaxpPerModel};
  for (const auto & member : ensemble.members) {
    group.trajs.push_back(member.mode_trajectories[member.mode_probs.argmax()]);
  }
  return group;
}

TrajScores trajectory_score_suite(
  const EnsembleOutput & ensemble, std::size_t true_maneuver, double eps)
{
  check_ensemble(ensemble);
  if (true_maneuver >= ensemble.num_modes()) {
    throw Error(
      ErrorKind::MissingManeuver,
      "maneuver " + std::to_string(true_maneuver) + " is not predicted");
  }

  TrajScores scores;
  double ape_sum = 0.0;
  double fpe_sum = 0.0;
  for (const auto & member : ensemble.members) {
    const TrajGroup own{member.mode_trajectories, GroupProvenance::PerModelAllModes};
    const auto steps = fit_step_gaussians(own, eps);
    double step_sum = 0.0;
    for (const auto & step : steps) {
      step_sum += gaussian_step_entropy(step);
    }
    ape_sum += step_sum / static_cast<double>(steps.size());
    fpe_sum += gaussian_step_entropy(steps.back());
  }
  const double k = static_cast<double>(ensemble.num_members());
  scores.mean_ape = ape_sum / k;
  scores.mean_fpe = fpe_sum / k;
  scores.ape_all = ape(pooled_group(ensemble), eps);

  if (ensemble.num_members() >= 2) {
    const auto z_group = true_maneuver_group(ensemble, true_maneuver);
    scores.ape_z = ape(z_group, eps);
    scores.fpe_z = fpe(z_group, eps);
    const auto avg_group = averaged_per_maneuver_group(ensemble);
    scores.ape_avg = ape(avg_group, eps);
    scores.fpe_avg = fpe(avg_group, eps);
    scores.ape_maxp = ape(maxp_group(ensemble), eps);
  }
  return scores;
}

double clustering_cost(
  std::span<const Trajectory> trajs, std::span<const Trajectory> centers,
  std::span<const std::size_t> assignments)
{
  double cost = 0.0;
  for (std::size_t j = 0; j < trajs.size(); ++j) {
    cost += squared_distance(trajs[j], centers[assignments[j]]);
  }
  return cost;
}

ClusterResult unified_cluster(
  std::span<const Trajectory> trajs, std::size_t num_clusters, std::uint64_t seed)
{
  constexpr std::size_t max_iterations = 100;
  const std::size_t n = trajs.size();
  if (num_clusters == 0) {
    throw Error(ErrorKind::InvalidArgument, "need at least one cluster");
  }
  if (n < num_clusters) {
    throw Error(
      ErrorKind::TooFewTrajectories, std::to_string(n) + " trajectories for " +
                                       std::to_string(num_clusters) + " clusters");
  }
  const std::size_t horizon = trajs.front().size();
  for (const auto & traj : trajs) {
    if (traj.size() != horizon) {
      throw Error(ErrorKind::ShapeMismatch, "pooled trajectories mix horizons");
    }
  }

  // farthest-point seeding
  std::vector<std::size_t> seeds;
  std::vector<bool> chosen(n, false);
  {
    std::size_t first = 0;
    double best = -1.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double norm = squared_norm(trajs[j]);
      if (norm > best) {
        best = norm;
        first = j;
      }
    }
    seeds.push_back(first);
    chosen[first] = true;
  }
  std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
  while (seeds.size() < num_clusters) {
    const auto & last = trajs[seeds.back()];
    std::size_t next = n;
    double best = -1.0;
    for (std::size_t j = 0; j < n; ++j) {
      nearest[j] = std::min(nearest[j], squared_distance(trajs[j], last));
      if (!chosen[j] && nearest[j] > best) {
        best = nearest[j];
        next = j;
      }
    }
    seeds.push_back(next);
    chosen[next] = true;
  }

  std::vector<Trajectory> centers;
  for (std::size_t s : seeds) {
    centers.push_back(trajs[s]);
  }

  Rng rng(mix64(seed, 0));
  auto assign = [&](std::vector<std::size_t> & labels) {
    for (std::size_t j = 0; j < n; ++j) {
      std::size_t best_c = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < num_clusters; ++c) {
        const double d = squared_distance(trajs[j], centers[c]);
        if (d < best_d) {
          best_d = d;
          best_c = c;
        }
      }
      labels[j] = best_c;
    }
    // re-seed empty clusters from a random member of a cluster that can spare one
    for (std::size_t c = 0; c < num_clusters; ++c) {
      std::vector<std::size_t> sizes(num_clusters, 0);
      for (std::size_t label : labels) {
        ++sizes[label];
      }
      if (sizes[c] != 0) {
        continue;
      }
      std::vector<std::size_t> donors;
      for (std::size_t j = 0; j < n; ++j) {
        if (sizes[labels[j]] >= 2) {
          donors.push_back(j);
        }
      }
      const std::size_t pick = donors[rng.below(donors.size())];
      labels[pick] = c;
      centers[c] = trajs[pick];
    }
  };

  auto recompute_centers = [&](const std::vector<std::size_t> & labels) {
    for (std::size_t c = 0; c < num_clusters; ++c) {
      std::vector<Trajectory> members;
      for (std::size_t j = 0; j < n; ++j) {
        if (labels[j] == c) {
          members.push_back(trajs[j]);
        }
      }
      centers[c] = average_trajectory(members);
    }
  };

  ClusterResult result;
  std::vector<std::size_t> labels(n, 0);
  assign(labels);
  result.cost_history.push_back(clustering_cost(trajs, centers, labels));
  for (std::size_t it = 1; it <= max_iterations; ++it) {
    recompute_centers(labels);
    std::vector<std::size_t> next(n, 0);
    assign(next);
    result.cost_history.push_back(clustering_cost(trajs, centers, next));
    result.iterations = it;
    const bool stable = next == labels;
    labels = std::move(next);
    if (stable) {
      break;
    }
  }
  recompute_centers(labels);

  // order clusters by size (descending), then by their first member's index
  std::vector<std::size_t> sizes(num_clusters, 0);
  std::vector<std::size_t> first_member(num_clusters, n);
  for (std::size_t j = 0; j < n; ++j) {
    ++sizes[labels[j]];
    first_member[labels[j]] = std::min(first_member[labels[j]], j);
  }
  std::vector<std::size_t> order(num_clusters);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (sizes[a] != sizes[b]) {
      return sizes[a] > sizes[b];
    }
    return first_member[a] < first_member[b];
  });
  std::vector<std::size_t> rank(num_clusters);
  for (std::size_t r = 0; r < num_clusters; ++r) {
    rank[order[r]] = r;
    result.centers.push_back(centers[order[r]]);
  }
  result.assignments.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    result.assignments[j] = rank[labels[j]];
  }
  return result;
}

}  // namespace uqfd
