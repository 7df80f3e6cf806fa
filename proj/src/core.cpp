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

#include "uqfd/core.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

namespace uqfd
{

std::string_view to_string(ErrorKind kind)
{
  switch (kind) {
    case ErrorKind::NonFinite:
      return "NonFinite";
    case ErrorKind::NegativeProbability:
      return "NegativeProbability";
    case ErrorKind::SumNotOne:
      return "SumNotOne";
    case ErrorKind::EmptySet:
      return "EmptySet";
    case ErrorKind::ShapeMismatch:
      return "ShapeMismatch";
    case ErrorKind::InvalidArgument:
      return "InvalidArgument";
    case ErrorKind::SingularCovariance:
      return "SingularCovariance";
    case ErrorKind::MissingManeuver:
      return "MissingManeuver";
    case ErrorKind::TooFewTrajectories:
      return "TooFewTrajectories";
    case ErrorKind::DegenerateLabels:
      return "DegenerateLabels";
    case ErrorKind::EmptyInput:
      return "EmptyInput";
    case ErrorKind::DegenerateBaselines:
      return "DegenerateBaselines";
    case ErrorKind::EmptySplit:
      return "EmptySplit";
    case ErrorKind::InvalidManeuver:
      return "InvalidManeuver";
    case ErrorKind::ConfigInvalid:
      return "ConfigInvalid";
    case ErrorKind::Parse:
      return "Parse";
    case ErrorKind::SchemaViolation:
      return "SchemaViolation";
    case ErrorKind::Io:
      return "Io";
    case ErrorKind::UnknownName:
      return "UnknownName";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string & message)
: std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind)
{
}

ManeuverSet::ManeuverSet(std::vector<std::string> labels) : labels_(std::move(labels))
{
  if (labels_.size() < 2) {
    throw Error(ErrorKind::InvalidArgument, "a maneuver set needs at least 2 labels");
  }
  const std::set<std::string> unique(labels_.begin(), labels_.end());
  if (unique.size() != labels_.size()) {
    throw Error(ErrorKind::InvalidArgument, "maneuver labels must be unique");
  }
}

const ManeuverSet & ManeuverSet::standard()
{
  static const ManeuverSet set({"straight", "left", "right", "stop"});
  return set;
}

std::optional<std::size_t> ManeuverSet::index_of(std::string_view label) const
{
  const auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) {
    return std::nullopt;
  }
  return static_cast<std::size_t>(it - labels_.begin());
}

ProbVector ProbVector::validate(std::span<const double> p)
{
  if (p.size() < 2) {
    throw Error(ErrorKind::InvalidArgument, "probability vector needs Z >= 2 entries");
  }
  double sum = 0.0;
  for (std::size_t z = 0; z < p.size(); ++z) {
    if (!std::isfinite(p[z])) {
      throw Error(ErrorKind::NonFinite, "probability " + std::to_string(z) + " is not finite");
    }
    if (p[z] < 0.0) {
      throw Error(
        ErrorKind::NegativeProbability, "probability " + std::to_string(z) + " is negative");
    }
    if (p[z] > 1.0) {
      throw Error(ErrorKind::SumNotOne, "probability " + std::to_string(z) + " exceeds 1");
    }
    sum += p[z];
  }
  if (std::abs(sum - 1.0) > prob_sum_tolerance) {
    throw Error(ErrorKind::SumNotOne, "probabilities sum to " + std::to_string(sum));
  }
  return ProbVector(std::vector<double>(p.begin(), p.end()));
}

std::size_t ProbVector::argmax() const
{
  // max_element returns the first maximum, so ties resolve to the lower index
  return static_cast<std::size_t>(std::max_element(p_.begin(), p_.end()) - p_.begin());
}

Trajectory::Trajectory(std::vector<Point2> points) : points_(std::move(points))
{
  if (points_.empty()) {
    throw Error(ErrorKind::InvalidArgument, "trajectory needs at least one point");
  }
  for (const auto & pt : points_) {
    if (!std::isfinite(pt.x) || !std::isfinite(pt.y)) {
      throw Error(ErrorKind::NonFinite, "trajectory coordinate is not finite");
    }
  }
}

Trajectory average_trajectory(std::span<const Trajectory> trajs)
{
  if (trajs.empty()) {
    throw Error(ErrorKind::EmptySet, "cannot average an empty trajectory set");
  }
  const std::size_t horizon = trajs.front().size();
  for (const auto & traj : trajs) {
    if (traj.size() != horizon) {
      throw Error(ErrorKind::ShapeMismatch, "trajectories differ in length");
    }
  }
  if (trajs.size() == 1) {
    return trajs.front();
  }
  const double n = static_cast<double>(trajs.size());
  std::vector<Point2> mean(horizon);
  for (std::size_t i = 0; i < horizon; ++i) {
    double sx = 0.0;
    double sy = 0.0;
    for (const auto & traj : trajs) {
      sx += traj[i].x;
      sy += traj[i].y;
    }
    mean[i] = {sx / n, sy / n};
  }
  return Trajectory(std::move(mean));
}

void validate_sample(const Sample & sample, std::size_t num_maneuvers)
{
  if (sample.history.size() < 2) {
    throw Error(ErrorKind::SchemaViolation, "sample " + sample.id + ": history needs >= 2 rows");
  }
  for (const auto & s : sample.history) {
    if (
      !std::isfinite(s.x) || !std::isfinite(s.y) || !std::isfinite(s.heading) ||
      !std::isfinite(s.speed)) {
      throw Error(ErrorKind::NonFinite, "sample " + sample.id + ": history is not finite");
    }
    if (s.speed < 0.0) {
      throw Error(ErrorKind::SchemaViolation, "sample " + sample.id + ": negative speed");
    }
  }
  if (sample.gt_maneuver >= num_maneuvers) {
    throw Error(ErrorKind::SchemaViolation, "sample " + sample.id + ": gt_maneuver out of range");
  }
}

void validate_model_output(const ModelOutput & output)
{
  const std::size_t num_modes = output.mode_probs.size();
  if (output.mode_trajectories.size() != num_modes) {
    throw Error(
      ErrorKind::ShapeMismatch, "model output for " + output.sample_id +
                                  " has a trajectory count different from Z");
  }
  const std::size_t horizon = output.mode_trajectories.front().size();
  for (const auto & traj : output.mode_trajectories) {
    if (traj.size() != horizon) {
      throw Error(
        ErrorKind::ShapeMismatch, "model output for " + output.sample_id + " mixes horizons");
    }
  }
  if (output.evidence) {
    if (output.evidence->size() != num_modes) {
      throw Error(ErrorKind::ShapeMismatch, "evidence length differs from Z");
    }
    for (double e : *output.evidence) {
      if (!std::isfinite(e)) {
        throw Error(ErrorKind::NonFinite, "evidence is not finite");
      }
      if (e < 0.0) {
        throw Error(ErrorKind::InvalidArgument, "evidence must be nonnegative");
      }
    }
  }
}

void validate_ensemble_output(const EnsembleOutput & output)
{
  if (output.members.empty()) {
    throw Error(ErrorKind::EmptySet, "ensemble output for " + output.sample_id + " has no members");
  }
  for (const auto & member : output.members) {
    validate_model_output(member);
    if (member.sample_id != output.sample_id) {
      throw Error(ErrorKind::ShapeMismatch, "ensemble members disagree on sample_id");
    }
    if (
      member.num_modes() != output.members.front().num_modes() ||
      member.horizon() != output.members.front().horizon()) {
      throw Error(ErrorKind::ShapeMismatch, "ensemble members disagree on Z or t_f");
    }
  }
}

double wrap_angle(double angle)
{
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double wrapped = std::remainder(angle, two_pi);
  if (wrapped <= -std::numbers::pi) {
    wrapped += two_pi;
  }
  return wrapped;
}

}  // namespace uqfd
