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

#ifndef UQFD__EVAL_HPP_
#define UQFD__EVAL_HPP_

#include "uqfd/core.hpp"

#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace uqfd
{

/**
 * @brief One scored sample. Higher score = less confident.
 *
 * target is a correctness flag (1 correct, 0 failure) for classification curves, or an
 * error in metres for trajectory curves. auroc() reads target < 0.5 as a failure.
 */
struct LabeledScore
{
  std::string sample_id;
  double score = 0.0;
  double target = 0.0;
};

/// accuracy-up: remaining accuracy should rise while filtering; error-down: error should fall.
enum class CurveKind { AccuracyUp, ErrorDown };

struct CurvePoint
{
  double q = 0.0;  // filtered fraction
  double v = 0.0;  // mean target over the remaining items
};

struct CutoffCurve
{
  std::vector<CurvePoint> points;
  double aucoc = 0.0;
  CurveKind kind = CurveKind::ErrorDown;
};

struct DetectionReport
{
  std::optional<double> auroc;
  double aucoc_uncertainty = 0.0;
  double aucoc_optimal = 0.0;
  double aucoc_random = 0.0;
  double ir = 0.0;
  std::size_t n = 0;
};

/**
 * @brief Probability that a failure outscores a success, ties counted as one half.
 *
 * Mid-rank Mann-Whitney form. Throws DegenerateLabels unless both classes are present.
 */
double auroc(std::span<const LabeledScore> items);

/**
 * @brief Remaining-mean curve after filtering the most uncertain items first.
 *
 * Items are ordered by (score desc, sample_id asc). Point m (m = 0..n-1) has q = m/n and the
 * mean target of the n - m items left; a terminal point at q = 1 repeats the last remaining
 * target. AUCOC is the trapezoid integral over [0, 1].
 */
CutoffCurve cutoff_curve(std::span<const LabeledScore> items, CurveKind kind);

struct BaselineCurves
{
  CutoffCurve optimal;
  CutoffCurve random;
};

/// Oracle ordering (worst target first) and the analytic random-order expectation.
BaselineCurves baseline_curves(std::span<const double> targets, CurveKind kind);

/// (random - uncertainty) / (random - optimal). Throws DegenerateBaselines.
double improvement_ratio(double aucoc_uncertainty, double aucoc_optimal, double aucoc_random);

struct EvaluationResult
{
  DetectionReport report;
  CutoffCurve uncertainty;
  BaselineCurves baselines;
};

/// AUROC (accuracy-up kind only), all three curves and IR.
EvaluationResult evaluate_detection(std::span<const LabeledScore> items, CurveKind kind);

struct HistogramBin
{
  double lo = 0.0;
  double hi = 0.0;
  std::size_t correct = 0;
  std::size_t failure = 0;
};

/// Equal-width bins over [min score, max score]; classes split as in auroc().
std::vector<HistogramBin> score_histograms(std::span<const LabeledScore> items, std::size_t bins);

struct SplitScores
{
  std::string split;
  std::map<std::string, double> scores;
};

/// split -> score name -> arithmetic mean over that split's records.
std::map<std::string, std::map<std::string, double>> split_mean_scores(
  std::span<const SplitScores> records, std::span<const std::string> score_names);

/// Running mean; exact for constant input.
double stable_mean(std::span<const double> values);

}  // namespace uqfd

#endif  // UQFD__EVAL_HPP_
