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

#ifndef UQFD__ERRORS_HPP_
#define UQFD__ERRORS_HPP_

#include "uqfd/core.hpp"

#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace uqfd
{

/// Mean pointwise Euclidean distance, metres.
double ade(const Trajectory & pred, const Trajectory & gt);
/// Euclidean distance at the last step, metres.
double fde(const Trajectory & pred, const Trajectory & gt);

/// Displacement errors of a trajectory set against one ground truth.
struct ErrorBundle
{
  double min_ade = 0.0;
  double mean_ade = 0.0;
  double ade_avg = 0.0;  // error of the pointwise-average trajectory
  double min_fde = 0.0;
  double mean_fde = 0.0;
  double fde_avg = 0.0;
};

ErrorBundle set_errors(std::span<const Trajectory> trajs, const Trajectory & gt);

enum class ModelReduce { Mean, Min };
enum class ModeReduce { Min, Mean, Maxp };
enum class Displacement { Ade, Fde };

struct TwoLevelError
{
  ModelReduce model_reduce = ModelReduce::Mean;
  ModeReduce mode_reduce = ModeReduce::Min;
  Displacement displacement = Displacement::Ade;
  double value = 0.0;
};

/**
 * @brief Reduce each member's per-mode errors (min, mean, or the max-probability mode), then
 * reduce across members (mean or min).
 *
 * Max-probability ties resolve to the lower mode index.
 */
TwoLevelError two_level_error(
  const EnsembleOutput & ensemble, const Trajectory & gt, ModelReduce model_reduce,
  ModeReduce mode_reduce, Displacement displacement = Displacement::Ade);

/// e.g. "meanmin_ade", "minmin_fde", "meanmaxp_ade"
std::string two_level_name(ModelReduce model_reduce, ModeReduce mode_reduce, Displacement d);
std::optional<TwoLevelError> parse_two_level_name(std::string_view name);

}  // namespace uqfd

#endif  // UQFD__ERRORS_HPP_
