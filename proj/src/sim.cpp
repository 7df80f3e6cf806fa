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

#include "uqfd/random.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

namespace uqfd
{
namespace
{

constexpr double pi = std::numbers::pi;

// Logit gains of the base classifier.
constexpr double turn_gain = 4.0;
constexpr double stop_gain = 4.0;

// Spread of the per-member extrapolation responses.
constexpr double speed_extrapolation_sigma = 0.6;  // logit per m/s
constexpr double yaw_extrapolation_sigma = 12.0;   // logit per rad/s

// Integration substeps per sample interval when generating ground truth.
constexpr int substeps = 50;

struct Motion
{
  double yaw_rate = 0.0;  // rad/s
  double accel = 0.0;     // m/s^2, speed clamps at zero
};

/// States at every sample instant, starting from `start`.
std::vector<AgentState> integrate(
  const AgentState & start, const Motion & motion, std::size_t intervals, double rate_hz)
{
  std::vector<AgentState> states;
  states.reserve(intervals + 1);
  states.push_back(start);
  AgentState s = start;
  const double h = 1.0 / (rate_hz * substeps);
  for (std::size_t k = 0; k < intervals; ++k) {
    for (int j = 0; j < substeps; ++j) {
      const double v_next = std::max(0.0, s.speed + motion.accel * h);
      const double v_mid = 0.5 * (s.speed + v_next);
      const double heading_mid = s.heading + 0.5 * motion.yaw_rate * h;
      s.x += v_mid * h * std::cos(heading_mid);
      s.y += v_mid * h * std::sin(heading_mid);
      s.heading += motion.yaw_rate * h;
      s.speed = v_next;
    }
    AgentState out = s;
    out.heading = wrap_angle(out.heading);
    states.push_back(out);
  }
  return states;
}

/// Observed history: noisy positions, heading and speed re-derived from them.
std::vector<AgentState> observe_history(
  const std::vector<AgentState> & truth, double sigma, double rate_hz, Rng & rng)
{
  std::vector<AgentState> obs(truth.size());
  for (std::size_t j = 0; j < truth.size(); ++j) {
    obs[j].x = truth[j].x;
    obs[j].y = truth[j].y;
    if (sigma > 0.0) {
      obs[j].x += rng.normal(0.0, sigma);
      obs[j].y += rng.normal(0.0, sigma);
    }
  }
  // backward differences; the first row takes the first segment
  for (std::size_t j = 1; j < obs.size(); ++j) {
    const double dx = obs[j].x - obs[j - 1].x;
    const double dy = obs[j].y - obs[j - 1].y;
    obs[j].heading = wrap_angle(std::atan2(dy, dx));
    obs[j].speed = std::hypot(dx, dy) * rate_hz;
  }
  obs[0].heading = obs[1].heading;
  obs[0].speed = obs[1].speed;
  return obs;
}

void softmax(std::array<double, maneuver::count> & logits)
{
  const double top = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (auto & l : logits) {
    l = std::exp(l - top);
    sum += l;
  }
  for (auto & l : logits) {
    l /= sum;
  }
}

/// Approximate variances of (mean speed, mean yaw rate, mean accel) under position noise.
std::array<double, 3> feature_noise_variance(
  std::size_t segments, double mean_speed, double rate_hz, double sigma)
{
  if (sigma <= 0.0 || segments < 2) {
    return {0.0, 0.0, 0.0};
  }
  const double dt = 1.0 / rate_hz;
  const double span = static_cast<double>(segments - 1) * dt;
  const double chord = std::max(mean_speed, 1.0) * dt;
  const double segment_speed_var = 2.0 * sigma * sigma / (dt * dt);
  const double chord_heading_var = 2.0 * sigma * sigma / (chord * chord);
  return {
    segment_speed_var / static_cast<double>(segments), 2.0 * chord_heading_var / (span * span),
    2.0 * segment_speed_var / (span * span)};
}

std::string sample_name(const std::string & split, std::size_t index)
{
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%06zu", index);
  return split + "-" + buf;
}

}  // namespace

void validate_config(const SimConfig & cfg)
{
  auto fail = [](const std::string & what) { throw Error(ErrorKind::ConfigInvalid, what); };
  if (!(cfg.rate_hz > 0.0) || !std::isfinite(cfg.rate_hz)) {
    fail("rate_hz must be positive");
  }
  if (cfg.t_h < 2 || cfg.t_f < 2) {
    fail("t_h and t_f must be >= 2");
  }
  if (!(cfg.speed_min > 0.0) || !(cfg.speed_max > cfg.speed_min) || !std::isfinite(cfg.speed_max)) {
    fail("speed range must satisfy 0 < speed_min < speed_max");
  }
  if (!(cfg.yaw_rate_turn > 0.0) || !std::isfinite(cfg.yaw_rate_turn)) {
    fail("yaw_rate_turn must be positive");
  }
  if (!(cfg.stop_decel > 0.0) || !std::isfinite(cfg.stop_decel)) {
    fail("stop_decel must be positive");
  }
  if (!(cfg.obs_noise_sigma >= 0.0) || !std::isfinite(cfg.obs_noise_sigma)) {
    fail("obs_noise_sigma must be nonnegative");
  }
  if (!(cfg.ambiguity >= 0.0 && cfg.ambiguity <= 1.0)) {
    fail("ambiguity must lie in [0, 1]");
  }
}

SimConfig effective_config(const SimConfig & cfg)
{
  SimConfig eff = cfg;
  if (cfg.ood) {
    eff.speed_min = 10.0;
    eff.speed_max = 20.0;
    eff.yaw_rate_turn = 0.6;
  }
  return eff;
}

double threshold_yaw_rate(double rate_hz, std::size_t t_f)
{
  // the last future segment's chord heading is reached (t_f - 1/2) intervals after t = 0
  return turn_heading_threshold * rate_hz / (static_cast<double>(t_f) - 0.5);
}

Trajectory rollout(
  std::size_t maneuver, const AgentState & start, std::size_t steps, double rate_hz,
  const KinematicParams & params)
{
  if (maneuver >= maneuver::count) {
    throw Error(ErrorKind::InvalidManeuver, "unknown maneuver " + std::to_string(maneuver));
  }
  if (!(start.speed >= 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "rollout start speed must be nonnegative");
  }
  if (steps == 0 || !(rate_hz > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "rollout needs steps >= 1 and a positive rate");
  }
  const double v = start.speed * params.speed_scale;
  const double c = std::cos(start.heading);
  const double s = std::sin(start.heading);
  std::vector<Point2> pts;
  pts.reserve(steps);
  for (std::size_t k = 1; k <= steps; ++k) {
    const double t = static_cast<double>(k) / rate_hz;
    switch (maneuver) {
      case maneuver::straight:
        pts.push_back({start.x + v * t * c, start.y + v * t * s});
        break;
      case maneuver::left:
      case maneuver::right: {
        const double omega =
          maneuver == maneuver::left ? params.yaw_rate_turn : -params.yaw_rate_turn;
        if (omega == 0.0) {
          pts.push_back({start.x + v * t * c, start.y + v * t * s});
          break;
        }
        const double heading = start.heading + omega * t;
        const double radius = v / omega;
        pts.push_back(
          {start.x + radius * (std::sin(heading) - s), start.y - radius * (std::cos(heading) - c)});
        break;
      }
      case maneuver::stop: {
        if (!(params.stop_decel > 0.0)) {
          throw Error(ErrorKind::InvalidArgument, "stop deceleration must be positive");
        }
        const double t_stop = v / params.stop_decel;
        const double dist = t < t_stop ? v * t - 0.5 * params.stop_decel * t * t
                                       : 0.5 * v * v / params.stop_decel;
        pts.push_back({start.x + dist * c, start.y + dist * s});
        break;
      }
    }
  }
  return Trajectory(std::move(pts));
}

std::size_t label_maneuver(
  const Trajectory & future, const AgentState & history_end, double rate_hz)
{
  const std::size_t n = future.size();
  // with a single future point the last segment starts at the history end
  const Point2 prev = n >= 2 ? future[n - 2] : Point2{history_end.x, history_end.y};
  const double dx = future.back().x - prev.x;
  const double dy = future.back().y - prev.y;
  const double final_speed = std::hypot(dx, dy) * rate_hz;
  if (final_speed < stop_speed_threshold) {
    return maneuver::stop;
  }
  const double turned = wrap_angle(std::atan2(dy, dx) - history_end.heading);
  if (turned > turn_heading_threshold) {
    return maneuver::left;
  }
  if (turned < -turn_heading_threshold) {
    return maneuver::right;
  }
  return maneuver::straight;
}

std::vector<Sample> generate_dataset(const SimConfig & cfg)
{
  validate_config(cfg);
  const SimConfig eff = effective_config(cfg);
  const double dt = 1.0 / eff.rate_hz;
  const double history_span = static_cast<double>(eff.t_h - 1) * dt;
  const double horizon = static_cast<double>(eff.t_f) * dt;
  const double final_segment_time = (static_cast<double>(eff.t_f) - 0.5) * dt;
  const double yaw_threshold = threshold_yaw_rate(eff.rate_hz, eff.t_f);
  const std::string split = cfg.ood ? "ood" : "id";

  std::vector<Sample> samples;
  samples.reserve(cfg.n_samples);
  for (std::size_t i = 0; i < cfg.n_samples; ++i) {
    Rng rng(mix64(cfg.seed, i));
    const auto intended = static_cast<std::size_t>(rng.below(maneuver::count));
    const double v_start = rng.uniform(eff.speed_min, eff.speed_max);
    AgentState start;
    start.x = rng.uniform(-50.0, 50.0);
    start.y = rng.uniform(-50.0, 50.0);
    start.heading = wrap_angle(rng.uniform(-pi, pi));
    start.speed = v_start;
    const bool ambiguous = rng.uniform() < eff.ambiguity;

    Motion motion;
    if (ambiguous) {
      if (intended == maneuver::stop) {
        // final-segment speed lands around the 0.5 m/s stop threshold
        const double v_final = rng.uniform(0.0, 2.0 * stop_speed_threshold);
        motion.accel = -(v_start - v_final) / (history_span + final_segment_time);
      } else {
        double sign = intended == maneuver::right ? -1.0 : 1.0;
        if (intended == maneuver::straight && rng.uniform() < 0.5) {
          sign = -1.0;
        }
        motion.yaw_rate = sign * yaw_threshold * rng.uniform(0.5, 1.5);
      }
    } else {
      switch (intended) {
        case maneuver::straight:
          motion.yaw_rate = rng.uniform(-0.03, 0.03);
          motion.accel = rng.uniform(-0.1, 0.3);
          break;
        case maneuver::left:
          motion.yaw_rate = eff.yaw_rate_turn * rng.uniform(0.8, 1.2);
          break;
        case maneuver::right:
          motion.yaw_rate = -eff.yaw_rate_turn * rng.uniform(0.8, 1.2);
          break;
        default: {
          // comes to rest between 0.5 s and 80% of the horizon after t = 0
          const double time_to_rest = history_span + rng.uniform(0.5, 0.8 * horizon);
          motion.accel = -v_start / time_to_rest;
          break;
        }
      }
    }

    const auto track = integrate(start, motion, eff.t_h - 1 + eff.t_f, eff.rate_hz);
    const std::vector<AgentState> truth(track.begin(), track.begin() + eff.t_h);
    std::vector<Point2> future;
    future.reserve(eff.t_f);
    for (std::size_t k = eff.t_h; k < track.size(); ++k) {
      future.push_back({track[k].x, track[k].y});
    }

    Sample sample;
    sample.id = sample_name(split, i);
    sample.split = split;
    sample.gt_future = Trajectory(std::move(future));
    sample.gt_maneuver = label_maneuver(sample.gt_future, truth.back(), eff.rate_hz);
    sample.history = observe_history(truth, eff.obs_noise_sigma, eff.rate_hz, rng);
    samples.push_back(std::move(sample));
  }
  return samples;
}

HistoryFeatures history_features(const Sample & sample, double rate_hz)
{
  const auto & h = sample.history;
  if (h.size() < 2) {
    throw Error(ErrorKind::SchemaViolation, "history needs at least 2 rows");
  }
  const std::size_t segments = h.size() - 1;
  std::vector<double> speed(segments);
  std::vector<double> heading(segments);
  for (std::size_t j = 0; j < segments; ++j) {
    const double dx = h[j + 1].x - h[j].x;
    const double dy = h[j + 1].y - h[j].y;
    speed[j] = std::hypot(dx, dy) * rate_hz;
    heading[j] = std::atan2(dy, dx);
  }
  HistoryFeatures f;
  for (double v : speed) {
    f.mean_speed += v;
  }
  f.mean_speed /= static_cast<double>(segments);
  if (segments >= 2) {
    for (std::size_t j = 1; j < segments; ++j) {
      f.mean_yaw_rate += wrap_angle(heading[j] - heading[j - 1]) * rate_hz;
      f.mean_accel += (speed[j] - speed[j - 1]) * rate_hz;
    }
    f.mean_yaw_rate /= static_cast<double>(segments - 1);
    f.mean_accel /= static_cast<double>(segments - 1);
  }
  return f;
}

SurrogateModel base_model(const SimConfig & cfg)
{
  validate_config(cfg);
  const double dt = 1.0 / cfg.rate_hz;
  const double yaw_threshold = threshold_yaw_rate(cfg.rate_hz, cfg.t_f);
  // from the mean history segment time to the final labelling segment
  const double lead =
    0.5 * static_cast<double>(cfg.t_h - 1) * dt + (static_cast<double>(cfg.t_f) - 0.5) * dt;

  SurrogateModel model;
  model.weights[maneuver::straight] = {0.0, 0.0, 0.0, 0.0};
  model.weights[maneuver::left] = {-turn_gain, 0.0, turn_gain / yaw_threshold, 0.0};
  model.weights[maneuver::right] = {-turn_gain, 0.0, -turn_gain / yaw_threshold, 0.0};
  model.weights[maneuver::stop] = {
    stop_gain * stop_speed_threshold, -stop_gain, 0.0, -stop_gain * lead};
  model.speed_support = cfg.speed_max;
  model.yaw_support = 1.2 * cfg.yaw_rate_turn;
  model.obs_noise_sigma = cfg.obs_noise_sigma;
  model.kinematics = {cfg.yaw_rate_turn, cfg.stop_decel, 1.0};
  return model;
}

std::vector<SurrogateModel> make_ensemble(
  std::size_t k, std::uint64_t seed, const SimConfig & cfg, double jitter_sigma)
{
  if (k == 0) {
    throw Error(ErrorKind::InvalidArgument, "ensemble needs K >= 1");
  }
  const SurrogateModel base = base_model(cfg);
  std::vector<SurrogateModel> models;
  models.reserve(k);
  for (std::size_t m = 0; m < k; ++m) {
    Rng rng(mix64(seed, m));
    SurrogateModel model = base;
    for (auto & row : model.weights) {
      for (auto & w : row) {
        w *= 1.0 + jitter_sigma * rng.normal();
      }
    }
    for (auto & row : model.extrapolation) {
      row[0] = rng.normal(0.0, speed_extrapolation_sigma);
      row[1] = rng.normal(0.0, yaw_extrapolation_sigma);
    }
    model.kinematics.yaw_rate_turn *= 1.0 + jitter_sigma * rng.normal();
    model.kinematics.stop_decel *= 1.0 + jitter_sigma * rng.normal();
    model.kinematics.speed_scale *= 1.0 + jitter_sigma * rng.normal();
    models.push_back(model);
  }
  return models;
}

ModelOutput predict(const SurrogateModel & model, const Sample & sample, double rate_hz)
{
  const auto f = history_features(sample, rate_hz);
  const std::array<double, 4> x{1.0, f.mean_speed, f.mean_yaw_rate, f.mean_accel};
  const std::array<double, 2> excess{
    std::max(0.0, f.mean_speed - model.speed_support),
    std::max(0.0, std::abs(f.mean_yaw_rate) - model.yaw_support)};

  const auto var = feature_noise_variance(sample.history.size() - 1, f.mean_speed, rate_hz, model.obs_noise_sigma);
  std::array<double, maneuver::count> logit_var{};
  for (std::size_t z = 0; z < maneuver::count; ++z) {
    const auto & w = model.weights[z];
    logit_var[z] = w[1] * w[1] * var[0] + w[2] * w[2] * var[1] + w[3] * w[3] * var[2];
  }

  std::array<double, maneuver::count> probs{};
  for (std::size_t z = 0; z < maneuver::count; ++z) {
    double logit = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) {
      logit += model.weights[z][j] * x[j];
    }
    logit += model.extrapolation[z][0] * excess[0] + model.extrapolation[z][1] * excess[1];
    probs[z] = logit / std::sqrt(1.0 + pi / 8.0 * logit_var[z]);
  }
  softmax(probs);

  const AgentState & last = sample.history.back();
  std::vector<Trajectory> trajs;
  trajs.reserve(maneuver::count);
  for (std::size_t z = 0; z < maneuver::count; ++z) {
    trajs.push_back(rollout(z, last, sample.gt_future.size(), rate_hz, model.kinematics));
  }
  return ModelOutput{sample.id, ProbVector::validate(probs), std::move(trajs), std::nullopt};
}

EnsembleOutput predict_ensemble(
  std::span<const SurrogateModel> models, const Sample & sample, double rate_hz)
{
  EnsembleOutput out;
  out.sample_id = sample.id;
  out.members.reserve(models.size());
  for (const auto & model : models) {
    out.members.push_back(predict(model, sample, rate_hz));
  }
  return out;
}

}  // namespace uqfd
