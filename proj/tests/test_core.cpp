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

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

namespace uqfd
{
namespace
{

ErrorKind kind_of(const auto & fn)
{
  try {
    fn();
  } catch (const Error & e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorKind::Io;
}

TEST(ProbVector, AcceptsValidDistribution)
{
  const std::vector<double> p{0.2, 0.3, 0.5};
  const auto v = ProbVector::validate(p);
  EXPECT_EQ(v.size(), 3u);
  EXPECT_EQ(v.argmax(), 2u);
}

TEST(ProbVector, RejectsBadInput)
{
  EXPECT_EQ(kind_of([] { ProbVector::validate(std::vector<double>{1.0}); }), ErrorKind::InvalidArgument);
  EXPECT_EQ(
    kind_of([] { ProbVector::validate(std::vector<double>{0.5, std::nan("")}); }),
    ErrorKind::NonFinite);
  EXPECT_EQ(
    kind_of([] { ProbVector::validate(std::vector<double>{-0.1, 1.1}); }),
    ErrorKind::NegativeProbability);
  EXPECT_EQ(kind_of([] { ProbVector::validate(std::vector<double>{0.5, 0.6}); }), ErrorKind::SumNotOne);
}

TEST(ProbVector, SumToleranceIsOneInABillion)
{
  EXPECT_NO_THROW(ProbVector::validate(std::vector<double>{0.5, 0.5 + 5e-10}));
  EXPECT_THROW(ProbVector::validate(std::vector<double>{0.5, 0.5 + 5e-9}), Error);
}

TEST(ProbVector, ArgmaxTiesGoToLowerIndex)
{
  EXPECT_EQ(ProbVector::validate(std::vector<double>{0.4, 0.4, 0.2}).argmax(), 0u);
  EXPECT_EQ(ProbVector::validate(std::vector<double>{0.2, 0.4, 0.4}).argmax(), 1u);
}

TEST(ManeuverSet, StandardOrder)
{
  const auto set = ManeuverSet::standard();
  ASSERT_EQ(set.size(), maneuver::count);
  EXPECT_EQ(set.index_of("straight"), maneuver::straight);
  EXPECT_EQ(set.index_of("left"), maneuver::left);
  EXPECT_EQ(set.index_of("right"), maneuver::right);
  EXPECT_EQ(set.index_of("stop"), maneuver::stop);
  EXPECT_FALSE(set.index_of("reverse").has_value());
}

TEST(Trajectory, RejectsEmptyAndNonFinite)
{
  EXPECT_EQ(kind_of([] { Trajectory(std::vector<Point2>{}); }), ErrorKind::InvalidArgument);
  EXPECT_EQ(
    kind_of([] { Trajectory(std::vector<Point2>{{0.0, std::numeric_limits<double>::infinity()}}); }),
    ErrorKind::NonFinite);
}

TEST(Trajectory, AverageIsPointwiseMean)
{
  const std::vector<Trajectory> trajs{
    Trajectory({{0.0, 0.0}, {2.0, 2.0}}), Trajectory({{2.0, -2.0}, {4.0, 0.0}})};
  const auto avg = average_trajectory(trajs);
  EXPECT_DOUBLE_EQ(avg[0].x, 1.0);
  EXPECT_DOUBLE_EQ(avg[0].y, -1.0);
  EXPECT_DOUBLE_EQ(avg[1].x, 3.0);
  EXPECT_DOUBLE_EQ(avg[1].y, 1.0);
  EXPECT_EQ(kind_of([] { average_trajectory(std::vector<Trajectory>{}); }), ErrorKind::EmptySet);
}

TEST(EnsembleOutput, MembersMustAgree)
{
  auto member = [](std::size_t steps) {
    return ModelOutput{
      "s", ProbVector::validate(std::vector<double>{0.5, 0.5}),
      {Trajectory(std::vector<Point2>(steps)), Trajectory(std::vector<Point2>(steps))},
      std::nullopt};
  };
  EnsembleOutput ok{"s", {member(3), member(3)}};
  EXPECT_NO_THROW(validate_ensemble_output(ok));
  EnsembleOutput mixed{"s", {member(3), member(4)}};
  EXPECT_EQ(kind_of([&] { validate_ensemble_output(mixed); }), ErrorKind::ShapeMismatch);
  EnsembleOutput empty{"s", {}};
  EXPECT_EQ(kind_of([&] { validate_ensemble_output(empty); }), ErrorKind::EmptySet);
}

TEST(Sample, ValidationChecksHistoryAndLabel)
{
  Sample s;
  s.id = "a";
  s.history = {{0, 0, 0, 1}, {1, 0, 0, 1}};
  EXPECT_NO_THROW(validate_sample(s));
  s.gt_maneuver = 4;
  EXPECT_EQ(kind_of([&] { validate_sample(s); }), ErrorKind::SchemaViolation);
  s.gt_maneuver = 0;
  s.history.pop_back();
  EXPECT_EQ(kind_of([&] { validate_sample(s); }), ErrorKind::SchemaViolation);
}

TEST(WrapAngle, MapsIntoHalfOpenInterval)
{
  EXPECT_DOUBLE_EQ(wrap_angle(-std::numbers::pi), std::numbers::pi);
  EXPECT_DOUBLE_EQ(wrap_angle(std::numbers::pi), std::numbers::pi);
  EXPECT_NEAR(wrap_angle(3.0 * std::numbers::pi / 2.0), -std::numbers::pi / 2.0, 1e-15);
  EXPECT_NEAR(wrap_angle(0.25), 0.25, 0.0);
}

TEST(Error, MessageNamesKind)
{
  const Error e(ErrorKind::SchemaViolation, "bad");
  EXPECT_EQ(std::string(e.what()), "SchemaViolation: bad");
}

}  // namespace
}  // namespace uqfd
