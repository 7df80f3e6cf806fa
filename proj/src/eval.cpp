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

#include "uqfd/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace uqfd
{
namespace
{

bool is_failure(const LabeledScore & item)
{
  return item.target < 0.5;
}

void check_finite_scores(std::span<const LabeledScore> items)
{
  for (const auto & item : items) {
    if (!std::isfinite(item.score) || !std::isfinite(item.target)) {
      throw Error(ErrorKind::NonFinite, "score or target of " + item.sample_id + " is not finite");
    }
  }
}

/// Curve over targets already arranged in filtering order (first filtered first).
CutoffCurve curve_from_order(std::span<const double> ordered, CurveKind kind)
{
  const std::size_t n = ordered.size();
  // remaining[m] = mean of ordered[m..n), accumulated from the least uncertain end
  std::vector<double> remaining(n);
  double mean = 0.0;
  for (std::size_t j = n; j-- > 0;) {
    const double count = static_cast<double>(n - j);
    mean += (ordered[j] - mean) / count;
    remaining[j] = mean;
  }

  CutoffCurve curve;
  curve.kind = kind;
  curve.points.reserve(n + 1);
  const double total = static_cast<double>(n);
  for (std::size_t m = 0; m < n; ++m) {
    curve.points.push_back({static_cast<double>(m) / total, remaining[m]});
  }
  curve.points.push_back({1.0, ordered.back()});

  // uniform grid of width 1/n, so the trapezoid rule is the mean of the segment heights
  std::vector<double> heights(n);
  for (std::size_t m = 0; m < n; ++m) {
    heights[m] = 0.5 * (curve.points[m].v + curve.points[m + 1].v);
  }
  curve.aucoc = stable_mean(heights);
  return curve;
}

}  // namespace

double stable_mean(std::span<const double> values)
{
  double mean = 0.0;
  std::size_t count = 0;
  for (double v : values) {
    ++count;
    mean += (v - mean) / static_cast<double>(count);
  }
  return mean;
}

double auroc(std::span<const LabeledScore> items)
{
  check_finite_scores(items);
  const std::size_t n = items.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return items[a].score < items[b].score;
  });

  // sum of failure mid-ranks; ranks are doubled to stay integral
  double rank_sum_x2 = 0.0;
  std::size_t failures = 0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i + 1;
    while (j < n && items[order[j]].score == items[order[i]].score) {
      ++j;
    }
    const double mid_rank_x2 = static_cast<double>(i + 1 + j);  // 2 * (i + 1 + j) / 2
    for (std::size_t t = i; t < j; ++t) {
      if (is_failure(items[order[t]])) {
        rank_sum_x2 += mid_rank_x2;
        ++failures;
      }
    }
    i = j;
  }
  const std::size_t successes = n - failures;
  if (failures == 0 || successes == 0) {
    throw Error(ErrorKind::DegenerateLabels, "AUROC needs both failures and successes");
  }
  const double nf = static_cast<double>(failures);
  const double u_x2 = rank_sum_x2 - nf * (nf + 1.0);
  return u_x2 / (2.0 * nf * static_cast<double>(successes));
}

CutoffCurve cutoff_curve(std::span<const LabeledScore> items, CurveKind kind)
{
  if (items.size() < 2) {
    throw Error(ErrorKind::EmptyInput, "a cut-off curve needs at least 2 items");
  }
  check_finite_scores(items);
  std::vector<std::size_t> order(items.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (items[a].score != items[b].score) {
      return items[a].score > items[b].score;
    }
    return items[a].sample_id < items[b].sample_id;
  });
  std::vector<double> ordered(items.size());
  for (std::size_t j = 0; j < order.size(); ++j) {
    ordered[j] = items[order[j]].target;
  }
  return curve_from_order(ordered, kind);
}

BaselineCurves baseline_curves(std::span<const double> targets, CurveKind kind)
{
  if (targets.size() < 2) {
    throw Error(ErrorKind::EmptyInput, "baseline curves need at least 2 targets");
  }
  for (double t : targets) {
    if (!std::isfinite(t)) {
      throw Error(ErrorKind::NonFinite, "target is not finite");
    }
  }
  std::vector<std::size_t> order(targets.size());
  std::iota(order.begin(), order.end(), 0);
  // worst first: largest error, or lowest accuracy
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return kind == CurveKind::ErrorDown ? targets[a] > targets[b] : targets[a] < targets[b];
  });
  std::vector<double> ordered(targets.size());
  for (std::size_t j = 0; j < order.size(); ++j) {
    ordered[j] = targets[order[j]];
  }

  BaselineCurves curves;
  curves.optimal = curve_from_order(ordered, kind);

  const double mean = stable_mean(targets);
  const std::vector<double> flat(targets.size(), mean);
  curves.random = curve_from_order(flat, kind);
  return curves;
}

double improvement_ratio(double aucoc_uncertainty, double aucoc_optimal, double aucoc_random)
{
  const double denom = aucoc_random - aucoc_optimal;
  if (!(std::abs(denom) >= 1e-12)) {
    throw Error(
      ErrorKind::DegenerateBaselines, "optimal and random AUCOC coincide; IR is undefined");
  }
  return (aucoc_random - aucoc_uncertainty) / denom + 0.0;
}

EvaluationResult evaluate_detection(std::span<const LabeledScore> items, CurveKind kind)
{
  EvaluationResult result;
  result.uncertainty = cutoff_curve(items, kind);
  std::vector<double> targets;
  targets.reserve(items.size());
  for (const auto & item : items) {
    targets.push_back(item.target);
  }
  result.baselines = baseline_curves(targets, kind);

  auto & report = result.report;
  report.n = items.size();
  if (kind == CurveKind::AccuracyUp) {
    report.auroc = auroc(items);
  }
  report.aucoc_uncertainty = result.uncertainty.aucoc;
  report.aucoc_optimal = result.baselines.optimal.aucoc;
  report.aucoc_random = result.baselines.random.aucoc;
  report.ir =
    improvement_ratio(report.aucoc_uncertainty, report.aucoc_optimal, report.aucoc_random);
  return result;
}

std::vector<HistogramBin> score_histograms(std::span<const LabeledScore> items, std::size_t bins)
{
  if (items.empty()) {
    throw Error(ErrorKind::EmptyInput, "no scores to bin");
  }
  if (bins < 2) {
    throw Error(ErrorKind::InvalidArgument, "need at least 2 bins");
  }
  check_finite_scores(items);
  const auto [min_it, max_it] = std::minmax_element(
    items.begin(), items.end(),
    [](const LabeledScore & a, const LabeledScore & b) { return a.score < b.score; });
  const double lo = min_it->score;
  const double hi = max_it->score;
  const double width = (hi - lo) / static_cast<double>(bins);

  std::vector<HistogramBin> hist(bins);
  for (std::size_t b = 0; b < bins; ++b) {
    hist[b].lo = lo + width * static_cast<double>(b);
    hist[b].hi = b + 1 == bins ? hi : lo + width * static_cast<double>(b + 1);
  }
  for (const auto & item : items) {
    std::size_t b = 0;
    if (width > 0.0) {
      b = static_cast<std::size_t>((item.score - lo) / width);
      b = std::min(b, bins - 1);
    }
    if (is_failure(item)) {
      ++hist[b].failure;
    } else {
      ++hist[b].correct;
    }
  }
  return hist;
}

std::map<std::string, std::map<std::string, double>> split_mean_scores(
  std::span<const SplitScores> records, std::span<const std::string> score_names)
{
  std::map<std::string, std::map<std::string, std::vector<double>>> grouped;
  for (const auto & record : records) {
    auto & by_name = grouped[record.split];
    for (const auto & name : score_names) {
      const auto it = record.scores.find(name);
      if (it == record.scores.end()) {
        throw Error(ErrorKind::UnknownName, "record lacks score '" + name + "'");
      }
      by_name[name].push_back(it->second);
    }
  }
  if (grouped.empty()) {
    throw Error(ErrorKind::EmptySplit, "no records to average");
  }
  std::map<std::string, std::map<std::string, double>> means;
  for (const auto & [split, by_name] : grouped) {
    for (const auto & [name, values] : by_name) {
      means[split][name] = std::accumulate(values.begin(), values.end(), 0.0) /
                           static_cast<double>(values.size());
    }
  }
  return means;
}

}  // namespace uqfd
