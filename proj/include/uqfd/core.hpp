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

#ifndef UQFD__CORE_HPP_
#define UQFD__CORE_HPP_

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace uqfd
{

enum class ErrorKind {
  NonFinite,
  NegativeProbability,
  SumNotOne,
  EmptySet,
  ShapeMismatch,
  InvalidArgument,
  SingularCovariance,
  MissingManeuver,
  TooFewTrajectories,
  DegenerateLabels,
  EmptyInput,
  DegenerateBaselines,
  EmptySplit,
  InvalidManeuver,
  ConfigInvalid,
  Parse,
  SchemaViolation,
  Io,
  UnknownName,
};

std::string_view to_string(ErrorKind kind);

/**
 * @brief Every module reports failures through this exception; kind() identifies the error class.
 */
class Error : public std::runtime_error
{
public:
  Error(ErrorKind kind, const std::string & message);

  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

/// Ordered list of maneuver names; indices into it are maneuver ids.
class ManeuverSet
{
public:
  explicit ManeuverSet(std::vector<std::string> labels);

  /// straight, left, right, stop
  static const ManeuverSet & standard();

  std::size_t size() const noexcept { return labels_.size(); }
  const std::string & label(std::size_t index) const { return labels_.at(index); }
  const std::vector<std::string> & labels() const noexcept { return labels_; }
  std::optional<std::size_t> index_of(std::string_view label) const;

private:
  std::vector<std::string> labels_;
};

namespace maneuver
{
constexpr std::size_t straight = 0;
constexpr std::size_t left = 1;
constexpr std::size_t right = 2;
constexpr std::size_t stop = 3;
constexpr std::size_t count = 4;
}  // namespace maneuver

inline constexpr double prob_sum_tolerance = 1e-9;

/// Probability vector over Z >= 2 maneuvers. Only obtainable through validation.
class ProbVector
{
public:
  /// Throws NonFinite / NegativeProbability / SumNotOne / InvalidArgument (Z < 2).
  static ProbVector validate(std::span<const double> p);

  std::size_t size() const noexcept { return p_.size(); }
  double operator[](std::size_t z) const { return p_[z]; }
  const std::vector<double> & values() const noexcept { return p_; }

  /// Index of the largest probability; ties go to the lower index.
  std::size_t argmax() const;

  bool operator==(const ProbVector &) const = default;

private:
  explicit ProbVector(std::vector<double> p) : p_(std::move(p)) {}
  std::vector<double> p_;
};

inline ProbVector validate_prob_vector(std::span<const double> p)
{
  return ProbVector::validate(p);
}

struct Point2
{
  double x = 0.0;
  double y = 0.0;

  bool operator==(const Point2 &) const = default;
};

/// Planar positions at t_f >= 1 future steps, metres.
class Trajectory
{
public:
  explicit Trajectory(std::vector<Point2> points);

  std::size_t size() const noexcept { return points_.size(); }
  const Point2 & operator[](std::size_t i) const { return points_[i]; }
  const Point2 & back() const { return points_.back(); }
  const std::vector<Point2> & points() const noexcept { return points_; }

  bool operator==(const Trajectory &) const = default;

private:
  std::vector<Point2> points_;
};

/// Pointwise mean of n >= 1 equal-length trajectories.
Trajectory average_trajectory(std::span<const Trajectory> trajs);

struct AgentState
{
  double x = 0.0;        // m
  double y = 0.0;        // m
  double heading = 0.0;  // rad, (-pi, pi]
  double speed = 0.0;    // m/s

  bool operator==(const AgentState &) const = default;
};

struct Sample
{
  std::string id;
  std::vector<AgentState> history;  // t_h >= 2 rows, oldest first
  Trajectory gt_future{std::vector<Point2>{Point2{}}};
  std::size_t gt_maneuver = 0;
  std::string split = "id";

  bool operator==(const Sample &) const = default;
};

void validate_sample(const Sample & sample, std::size_t num_maneuvers = maneuver::count);

struct ModelOutput
{
  std::string sample_id;
  ProbVector mode_probs;
  std::vector<Trajectory> mode_trajectories;  // one per maneuver, same t_f
  std::optional<std::vector<double>> evidence;  // Dirichlet evidence, EDL heads only

  std::size_t num_modes() const noexcept { return mode_probs.size(); }
  std::size_t horizon() const { return mode_trajectories.front().size(); }

  bool operator==(const ModelOutput &) const = default;
};

void validate_model_output(const ModelOutput & output);

struct EnsembleOutput
{
  std::string sample_id;
  std::vector<ModelOutput> members;

  std::size_t num_members() const noexcept { return members.size(); }
  std::size_t num_modes() const { return members.front().num_modes(); }
  std::size_t horizon() const { return members.front().horizon(); }

  bool operator==(const EnsembleOutput &) const = default;
};

void validate_ensemble_output(const EnsembleOutput & output);

/// Wraps an angle into (-pi, pi].
double wrap_angle(double angle);

}  // namespace uqfd

#endif  // UQFD__CORE_HPP_
