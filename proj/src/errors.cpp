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

#include "uqfd/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace uqfd
{
namespace
{

void check_same_length(const Trajectory & pred, const Trajectory & gt)
{
  if (pred.size() != gt.size()) {
    throw Error(
      ErrorKind::ShapeMismatch, "prediction has " + std::to_string(pred.size()) +
                                  " steps, ground truth " + std::to_string(gt.size()));
  }
}

double distance(const Point2 & a, const Point2 & b)
{
  return std::hypot(a.x - b.x, a.y - b.y);
}

double displacement_error(const Trajectory & pred, const Trajectory & gt, Displacement d)
{
  return d == Displacement::Ade ? ade(pred, gt) : fde(pred, gt);
}

}  // namespace

double ade(const Trajectory & pred, const Trajectory & gt)
{
  check_same_length(pred, gt);
  double sum = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    sum += distance(pred[i], gt[i]);
  }
  return sum / static_cast<double>(pred.size());
}

double fde(const Trajectory & pred, const Trajectory & gt)
{
  check_same_length(pred, gt);
  return distance(pred.back(), gt.back());
}

ErrorBundle set_errors(std::span<const Trajectory> trajs, const Trajectory & gt)
{
  if (trajs.empty()) {
    throw Error(ErrorKind::EmptySet, "no trajectories to score");
  }
  ErrorBundle bundle;
  bundle.min_ade = std::numeric_limits<double>::infinity();
  bundle.min_fde = std::numeric_limits<double>::infinity();
  for (const auto & traj : trajs) {
    const double a = ade(traj, gt);
    const double f = fde(traj, gt);
    bundle.min_ade = std::min(bundle.min_ade, a);
    bundle.min_fde = std::min(bundle.min_fde, f);
    bundle.mean_ade += a;
    bundle.mean_fde += f;
  }
  const double n = static_cast<double>(trajs.size());
  bundle.mean_ade /= n;
  bundle.mean_fde /= n;
  const auto avg = average_trajectory(trajs);
  bundle.ade_avg = ade(avg, gt);
  bundle.fde_avg = fde(avg, gt);
  return bundle;
}

TwoLevelError two_level_error(
  const EnsembleOutput & ensemble, const Trajectory & gt, ModelReduce model_reduce,
  ModeReduce mode_reduce, Displacement displacement)
{
  validate_ensemble_output(ensemble);
  double across_models =
    model_reduce == ModelReduce::Min ? std::numeric_limits<double>::infinity() : 0.0;
  for (const auto & member : ensemble.members) {
    double per_member = 0.0;
    switch (mode_reduce) {
      case ModeReduce::Min:
        per_member = std::numeric_limits<double>::infinity();
        for (const auto & traj : member.mode_trajectories) {
          per_member = std::min(per_member, displacement_error(traj, gt, displacement));
        }
        break;
      case ModeReduce::Mean:
        for (const auto & traj : member.mode_trajectories) {
          per_member += displacement_error(traj, gt, displacement);
        }
        per_member /= static_cast<double>(member.mode_trajectories.size());
        break;
      case ModeReduce::Maxp:
        per_member =
          displacement_error(member.mode_trajectories[member.mode_probs.argmax()], gt, displacement);
        break;
    }
    if (model_reduce == ModelReduce::Min) {
      across_models = std::min(across_models, per_member);
    } else {
      across_models += per_member;
    }
  }
  if (model_reduce == ModelReduce::Mean) {
    across_models /= static_cast<double>(ensemble.num_members());
  }
  return {model_reduce, mode_reduce, displacement, across_models};
}

std::string two_level_name(ModelReduce model_reduce, ModeReduce mode_reduce, Displacement d)
{
  std::string name = model_reduce == ModelReduce::Mean ? "mean" : "min";
  switch (mode_reduce) {
    case ModeReduce::Min:
      name += "min";
      break;
    case ModeReduce::Mean:
      name += "mean";
      break;
    case ModeReduce::Maxp:
      name += "maxp";
      break;
  }
  name += d == Displacement::Ade ? "_ade" : "_fde";
  return name;
}

std::optional<TwoLevelError> parse_two_level_name(std::string_view name)
{
  for (auto model : {ModelReduce::Mean, ModelReduce::Min}) {
    for (auto mode : {ModeReduce::Min, ModeReduce::Mean, ModeReduce::Maxp}) {
      for (auto d : {Displacement::Ade, Displacement::Fde}) {
        if (two_level_name(model, mode, d) == name) {
          return TwoLevelError{model, mode, d, 0.0};
        }
      }
    }
  }
  return std::nullopt;
}

}  // namespace uqfd
