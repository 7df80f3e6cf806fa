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

#ifndef UQFD__SIM_HPP_
#define UQFD__SIM_HPP_

#include "uqfd/core.hpp"

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace uqfd
{

/**
 * @brief Scene generator settings.
 *
 * With `ood` set, the speed range becomes (10, 20) m/s and the turn rate 0.6 rad/s, a regime
 * outside the support the surrogate models were built for.
 */
struct SimConfig
{
  std::size_t n_samples = 1000;
  std::uint64_t seed = 42;
  double rate_hz = 2.0;
  std::size_t t_h = 6;
  std::size_t t_f = 6;
  double speed_min = 2.0;        // m/s
  double speed_max = 12.0;       // m/s
  double yaw_rate_turn = 0.35;   // rad/s
  double stop_decel = 2.0;       // m/s^2
  double obs_noise_sigma = 0.15; // m
  double ambiguity = 0.3;        // fraction of scenes near a label boundary
  bool ood = false;
};

/// Throws ConfigInvalid.
void validate_config(const SimConfig & cfg);

/// Speed range and turn rate actually used for generation (ood shift applied).
SimConfig effective_config(const SimConfig & cfg);

// Ground-truth labelling thresholds.
inline constexpr double stop_speed_threshold = 0.5;               // m/s
inline constexpr double turn_heading_threshold = 0.2617993877991494;  // 15 deg in rad

/// Yaw rate at which the labelling rule sees exactly the turn threshold over the horizon.
double threshold_yaw_rate(double rate_hz, std::size_t t_f);

struct KinematicParams
{
  double yaw_rate_turn = 0.35;  // rad/s, magnitude
  double stop_decel = 2.0;      // m/s^2
  double speed_scale = 1.0;
};

/**
 * @brief Closed-form rollout of one maneuver over `steps` future steps.
 *
 * straight: constant velocity. left/right: constant speed on a circular arc at +/- the
 * turn rate. stop: constant deceleration to rest, then hold. Throws InvalidManeuver.
 */
Trajectory rollout(
  std::size_t maneuver, const AgentState & start, std::size_t steps, double rate_hz,
  const KinematicParams & params);

/**
 * @brief Maneuver of a future track: stop if the last segment is slower than 0.5 m/s, else
 * left/right if the last segment heading turned by more than +/-15 deg from the start
 * heading, else straight.
 */
std::size_t label_maneuver(
  const Trajectory & future, const AgentState & history_end, double rate_hz);

std::vector<Sample> generate_dataset(const SimConfig & cfg);

struct HistoryFeatures
{
  double mean_speed = 0.0;     // m/s, from segment lengths
  double mean_yaw_rate = 0.0;  // rad/s, from segment heading differences
  double mean_accel = 0.0;     // m/s^2, from segment speed differences
};

HistoryFeatures history_features(const Sample & sample, double rate_hz);

/**
 * @brief Hand-built softmax maneuver classifier plus per-maneuver kinematic rollouts.
 *
 * logit_z = weights[z] . (1, speed, yaw rate, accel)
 *         + extrapolation[z] . (speed above support, |yaw rate| above support)
 *
 * The extrapolation terms are zero inside the speed/yaw support of the nominal scenes, so
 * members only disagree there through their weight jitter; outside it each member
 * extrapolates with its own random response.
 *
 * Each logit is divided by sqrt(1 + pi/8 var_z), where var_z is the variance that position
 * noise of `obs_noise_sigma` induces in it through the history features.
 */
struct SurrogateModel
{
  std::array<std::array<double, 4>, maneuver::count> weights{};
  std::array<std::array<double, 2>, maneuver::count> extrapolation{};
  double speed_support = 12.0;  // m/s
  double yaw_support = 0.42;    // rad/s
  double obs_noise_sigma = 0.0; // m, position noise the model expects in histories
  KinematicParams kinematics;
};

/**
 * @brief Un-jittered model for the config's timing.
 *
 * straight is the zero-logit reference; left/right = 4 (+-yaw / w_th - 1) with w_th the
 * threshold yaw rate; stop = 4 (0.5 - v_pred) where v_pred extrapolates the mean history
 * speed with the mean acceleration to the final labelling segment.
 */
SurrogateModel base_model(const SimConfig & cfg = {});

/**
 * @brief K models with base weights and kinematics jittered by (1 + sigma N(0, 1)) and
 * independent N(0, s) extrapolation responses, each seeded by mix64(seed, k).
 */
std::vector<SurrogateModel> make_ensemble(
  std::size_t k, std::uint64_t seed, const SimConfig & cfg = {}, double jitter_sigma = 0.05);

ModelOutput predict(const SurrogateModel & model, const Sample & sample, double rate_hz = 2.0);

EnsembleOutput predict_ensemble(
  std::span<const SurrogateModel> models, const Sample & sample, double rate_hz = 2.0);

}  // namespace uqfd

#endif  // UQFD__SIM_HPP_
