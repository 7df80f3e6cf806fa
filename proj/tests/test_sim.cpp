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

#include "uqfd/sim.hpp"

#include "oracles.hpp"
#include "uqfd/uq_class.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

namespace uqfd
{
namespace
{

TEST(Rollout, StraightIsConstantVelocity)
{
  const auto t = rollout(maneuver::straight, {0, 0, 0, 5}, 6, 2.0, {});
  for (std::size_t k = 0; k < 6; ++k) {
    EXPECT_NEAR(t[k].x, 2.5 * static_cast<double>(k + 1), 1e-12);
    EXPECT_EQ(t[k].y, 0.0);
  }
}

TEST(Rollout, StopDeceleratesThenHolds)
{
  const auto t = rollout(maneuver::stop, {0, 0, 0, 5}, 8, 2.0, {0.35, 2.5, 1.0});
  EXPECT_NEAR(t[3].x, 5.0, 1e-12);  // t = 2 s
  EXPECT_NEAR(t[7].x, 5.0, 1e-12);
  double prev_step = t[0].x;
  for (std::size_t k = 1; k < t.size(); ++k) {
    const double step = t[k].x - t[k - 1].x;
    EXPECT_LE(step, prev_step + 1e-12);
    prev_step = step;
  }
}

TEST(Rollout, TurnsFollowExactArc)
{
  const AgentState start{3.0, -2.0, 0.7, 5.0};
  const auto left = rollout(maneuver::left, start, 6, 2.0, {0.35, 2.0, 1.0});
  const auto right = rollout(maneuver::right, start, 6, 2.0, {0.35, 2.0, 1.0});
  for (std::size_t k = 0; k < 6; ++k) {
    const double t = 0.5 * static_cast<double>(k + 1);
    const auto l = oracle::arc_position(start, 0.35, t);
    const auto r = oracle::arc_position(start, -0.35, t);
    EXPECT_NEAR(left[k].x, l.x, 1e-9);
    EXPECT_NEAR(left[k].y, l.y, 1e-9);
    EXPECT_NEAR(right[k].x, r.x, 1e-9);
    EXPECT_NEAR(right[k].y, r.y, 1e-9);
    // every point is a radius v / w from the turn center
    const double cx = start.x - (5.0 / 0.35) * std::sin(start.heading);
    const double cy = start.y + (5.0 / 0.35) * std::cos(start.heading);
    EXPECT_NEAR(std::hypot(left[k].x - cx, left[k].y - cy), 5.0 / 0.35, 1e-9);
  }
}

TEST(Rollout, InvalidManeuver)
{
  EXPECT_THROW(rollout(4, {0, 0, 0, 1}, 3, 2.0, {}), Error);
}

TEST(LabelManeuver, RolloutsGetTheirOwnLabels)
{
  const AgentState start{0, 0, 0.3, 6.0};
  for (std::size_t z = 0; z < maneuver::count; ++z) {
    const auto t = rollout(z, start, 6, 2.0, {0.35, 3.0, 1.0});
    EXPECT_EQ(label_maneuver(t, start, 2.0), z);
  }
}

TEST(LabelManeuver, ThresholdYawRateSitsOnTheBoundary)
{
  const double w = threshold_yaw_rate(2.0, 6);
  const AgentState start{0, 0, 0, 6.0};
  EXPECT_EQ(label_maneuver(rollout(maneuver::left, start, 6, 2.0, {1.01 * w, 2, 1}), start, 2.0), maneuver::left);
  EXPECT_EQ(label_maneuver(rollout(maneuver::left, start, 6, 2.0, {0.99 * w, 2, 1}), start, 2.0), maneuver::straight);
}

TEST(GenerateDataset, DeterministicAndLabelledFromCleanFuture)
{
  SimConfig cfg;
  cfg.n_samples = 50;
  const auto a = generate_dataset(cfg);
  const auto b = generate_dataset(cfg);
  EXPECT_EQ(a, b);
  ASSERT_EQ(a.size(), 50u);
  EXPECT_EQ(a[0].id, "id-000000");
  for (const auto & s : a) {
    EXPECT_EQ(s.history.size(), cfg.t_h);
    EXPECT_EQ(s.gt_future.size(), cfg.t_f);
    EXPECT_LT(s.gt_maneuver, maneuver::count);
  }
  cfg.seed = 43;
  EXPECT_NE(generate_dataset(cfg), a);
}

TEST(GenerateDataset, PrefixStable)
{
  SimConfig cfg;
  cfg.n_samples = 20;
  const auto small = generate_dataset(cfg);
  cfg.n_samples = 40;
  const auto large = generate_dataset(cfg);
  for (std::size_t i = 0; i < small.size(); ++i) {
    EXPECT_EQ(small[i], large[i]);
  }
}

TEST(GenerateDataset, CleanRegimeIsPerfectlyClassified)
{
  SimConfig cfg;
  cfg.n_samples = 2000;
  cfg.ambiguity = 0.0;
  cfg.obs_noise_sigma = 0.0;
  const auto model = base_model(cfg);
  std::size_t wrong = 0;
  for (const auto & s : generate_dataset(cfg)) {
    wrong += predict(model, s).mode_probs.argmax() != s.gt_maneuver;
  }
  EXPECT_EQ(wrong, 0u);
}

TEST(GenerateDataset, OodShiftsSpeed)
{
  SimConfig cfg;
  cfg.n_samples = 500;
  cfg.ood = true;
  const auto samples = generate_dataset(cfg);
  double mean = 0.0;
  for (const auto & s : samples) {
    EXPECT_EQ(s.split, "ood");
    mean += history_features(s, cfg.rate_hz).mean_speed;
  }
  mean /= static_cast<double>(samples.size());
  EXPECT_GT(mean, 10.0);
  EXPECT_LT(mean, 20.0);
  EXPECT_EQ(samples[3].id, "ood-000003");
}

TEST(GenerateDataset, MoreNoiseMeansMoreErrorsAndEntropy)
{
  const std::vector<double> sigmas{0.05, 0.3, 0.8};
  std::vector<double> error_rate(sigmas.size(), 0.0);
  std::vector<double> mean_te(sigmas.size(), 0.0);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    for (std::size_t j = 0; j < sigmas.size(); ++j) {
      SimConfig cfg;
      cfg.n_samples = 600;
      cfg.seed = seed;
      cfg.obs_noise_sigma = sigmas[j];
      const auto models = make_ensemble(5, seed, cfg);
      for (const auto & s : generate_dataset(cfg)) {
        const auto e = predict_ensemble(models, s);
        std::vector<ProbVector> rows;
        for (const auto & m : e.members) {
          rows.push_back(m.mode_probs);
        }
        const ProbMatrix pm(rows);
        error_rate[j] += mean_probs(pm).argmax() != s.gt_maneuver;
        mean_te[j] += total_entropy(pm);
      }
    }
  }
  for (std::size_t j = 1; j < sigmas.size(); ++j) {
    EXPECT_GT(error_rate[j], error_rate[j - 1]);
    EXPECT_GT(mean_te[j], mean_te[j - 1]);
  }
}

TEST(GenerateDataset, InvalidConfig)
{
  SimConfig cfg;
  cfg.t_h = 1;
  EXPECT_THROW(generate_dataset(cfg), Error);
  cfg = {};
  cfg.ambiguity = 1.5;
  EXPECT_THROW(generate_dataset(cfg), Error);
  cfg = {};
  cfg.speed_min = 20.0;
  EXPECT_THROW(generate_dataset(cfg), Error);
}

TEST(Predict, CleanStraightSceneIsStraight)
{
  SimConfig cfg;
  Sample s;
  s.id = "x";
  for (int j = 0; j < 6; ++j) {
    s.history.push_back({4.0 * j * 0.5, 0.0, 0.0, 4.0});
  }
  s.gt_future = Trajectory(std::vector<Point2>(6));
  const auto out = predict(base_model(cfg), s);
  EXPECT_EQ(out.mode_probs.argmax(), maneuver::straight);
  EXPECT_EQ(out.mode_trajectories.size(), maneuver::count);
  EXPECT_EQ(out.horizon(), 6u);
}

TEST(Predict, BoundarySceneIsAmbiguous)
{
  SimConfig cfg;
  const double w = threshold_yaw_rate(cfg.rate_hz, cfg.t_f);
  Sample s;
  s.id = "b";
  double heading = 0.0;
  double x = 0.0;
  double y = 0.0;
  for (int j = 0; j < 6; ++j) {
    s.history.push_back({x, y, heading, 6.0});
    x += 3.0 * std::cos(heading + 0.25 * w);
    y += 3.0 * std::sin(heading + 0.25 * w);
    heading += 0.5 * w;
  }
  s.gt_future = Trajectory(std::vector<Point2>(6));
  const auto f = history_features(s, cfg.rate_hz);
  EXPECT_NEAR(f.mean_yaw_rate, w, 1e-9);
  const auto p = predict(base_model(cfg), s).mode_probs;
  EXPECT_LT(p[p.argmax()], 0.7);
  EXPECT_NEAR(p[maneuver::straight], p[maneuver::left], 1e-9);
}

TEST(Ensemble, DeterministicAndDistinct)
{
  const auto a = make_ensemble(5, 42);
  const auto b = make_ensemble(5, 42);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].weights, b[i].weights);
    for (std::size_t j = i + 1; j < a.size(); ++j) {
      EXPECT_NE(a[i].weights, a[j].weights);
    }
  }
  EXPECT_EQ(make_ensemble(1, 42).size(), 1u);
  EXPECT_THROW(make_ensemble(0, 42), Error);
}

TEST(Ensemble, IdenticalModelsGiveIdenticalOutputs)
{
  SimConfig cfg;
  cfg.n_samples = 3;
  const auto samples = generate_dataset(cfg);
  const auto m = make_ensemble(1, 5).front();
  const std::vector<SurrogateModel> twins{m, m};
  const auto e = predict_ensemble(twins, samples[0]);
  EXPECT_EQ(e.members[0], e.members[1]);
}

}  // namespace
}  // namespace uqfd
