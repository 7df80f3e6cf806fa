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

#ifndef UQFD__PIPELINE_HPP_
#define UQFD__PIPELINE_HPP_

#include "uqfd/core.hpp"
#include "uqfd/eval.hpp"
#include "uqfd/io.hpp"
#include "uqfd/sim.hpp"
#include "uqfd/uq_traj.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace uqfd
{

// Score registry:
//   te, de, mi, nmap                      ensemble classification scores
//   de_m<k>, nmap_m<k>                    single-member scores (k is 0-based)
//   edl_te, edl_de, edl_mi, edl_nmap, edl_u   when every member carries evidence
//   ape_z, fpe_z, ape_avg, fpe_avg, mean_ape, mean_fpe, ape_all, ape_maxp
// Metric registry:
//   correct, correct_m<k>                 1 when the (member) argmax hits gt, else 0
//   min_ade, mean_ade, ade_avg, min_fde, mean_fde, fde_avg   over the K true-maneuver modes
//   <mean|min><min|mean|maxp>_<ade|fde>   two-level errors over all members and modes
//   uc_min_ade, uc_min_fde                best unified-cluster center

bool is_known_score(std::string_view name);
bool is_known_metric(std::string_view name);
/// Correctness metrics are scored with the maneuver task, the rest with the trajectory task.
bool is_correctness_metric(std::string_view name);

/// Every score name produced for an ensemble of K members (EDL names excluded).
std::vector<std::string> default_score_names(std::size_t k);
std::vector<std::string> default_metric_names(std::size_t k);

/// All scores and metrics for one sample. `seed` drives unified clustering only.
ScoreRecord score_sample(
  const Sample & sample, const EnsembleOutput & ensemble, double eps, std::uint64_t seed);

/**
 * @brief Scores every sample, in input order, on `threads` workers (0 = hardware).
 *
 * Predictions are matched to samples by id. With non-empty name lists only those entries are
 * kept and each must be present (UnknownName / SchemaViolation otherwise).
 */
std::vector<ScoreRecord> score_dataset(
  std::span<const Sample> samples, std::span<const EnsembleOutput> preds, double eps,
  std::uint64_t seed, std::span<const std::string> score_names = {},
  std::span<const std::string> metric_names = {}, std::size_t threads = 0);

std::vector<EnsembleOutput> predict_dataset(
  std::span<const SurrogateModel> models, std::span<const Sample> samples, double rate_hz,
  std::size_t threads = 0);

enum class Task { Maneuver, Trajectory };

Task parse_task(std::string_view name);
std::string task_name(Task task);

/**
 * @brief Failure-detection evaluation of one score against one metric.
 *
 * `split` filters records when non-empty. Throws UnknownName for unregistered names or a
 * task/metric mismatch, SchemaViolation when a record lacks the entry, EmptySplit when no
 * record matches the split.
 */
EvaluationResult evaluate_records(
  std::span<const ScoreRecord> records, Task task, const std::string & score_name,
  const std::string & metric_name, const std::string & split = {});

std::vector<LabeledScore> labeled_scores(
  std::span<const ScoreRecord> records, const std::string & score_name,
  const std::string & metric_name, const std::string & split = {});

/// Settings of a full simulate, predict, score run.
struct RunConfig
{
  SimConfig sim;
  std::size_t ood_samples = 0;  // extra samples from the shifted regime, split "ood"
  std::size_t k = 5;
  double eps = default_cov_eps;
  std::vector<std::string> scores;   // empty = all
  std::vector<std::string> metrics;  // empty = all
  std::size_t threads = 0;
  std::filesystem::path samples_out;
  std::filesystem::path preds_out;
  std::filesystem::path scores_out;
};

/**
 * @brief Config from a flat `key = value` file or a JSON object.
 *
 * Keys: n_samples, seed, rate_hz, t_h, t_f, speed_min, speed_max, yaw_rate_turn, stop_decel,
 * obs_noise_sigma, ambiguity, ood, ood_samples, k, eps, scores, metrics, threads,
 * samples_out, preds_out, scores_out. List values are comma separated in the flat form.
 * UQFD_SEED in the environment replaces the seed. Throws ConfigInvalid.
 */
RunConfig parse_run_config(std::string_view text);
RunConfig load_run_config(const std::filesystem::path & path);
/// Applies UQFD_SEED when set.
void apply_env_overrides(RunConfig & cfg);
/// Throws ConfigInvalid or UnknownName.
void validate_run_config(const RunConfig & cfg);

/// Dataset of the config: in-distribution samples followed by the ood samples.
std::vector<Sample> simulate(const RunConfig & cfg);

struct PipelineOutput
{
  std::vector<Sample> samples;
  std::vector<EnsembleOutput> preds;
  std::vector<ScoreRecord> scores;
};

/// simulate, predict with make_ensemble(k, seed), score; writes the configured outputs.
PipelineOutput run_pipeline(const RunConfig & cfg);

}  // namespace uqfd

#endif  // UQFD__PIPELINE_HPP_
