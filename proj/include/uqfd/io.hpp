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

#ifndef UQFD__IO_HPP_
#define UQFD__IO_HPP_

#include "uqfd/core.hpp"
#include "uqfd/eval.hpp"

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace uqfd
{

/// First line of every newline-delimited record file.
inline constexpr std::string_view format_header = "#uqfd-v1";

/// Decimal form with 17 significant digits; round-trips every finite double.
std::string format_number(double value);

/// Named uncertainty scores and error metrics for one sample.
struct ScoreRecord
{
  std::string sample_id;
  std::string split;
  std::size_t gt_maneuver = 0;
  std::size_t predicted_maneuver = 0;  // argmax of the member-averaged probabilities
  bool is_misclassified = false;
  std::map<std::string, double> scores;
  std::map<std::string, double> metrics;

  bool operator==(const ScoreRecord &) const = default;
};

// Newline-delimited records:
//   samples:     {"id", "split", "gt_maneuver", "history": [[x, y, heading, speed], ...],
//                 "gt_future": [[x, y], ...]}
//   predictions: {"sample_id", "members": [{"mode_probs": [...],
//                 "mode_trajectories": [[[x, y], ...], ...], "evidence"?: [...]}, ...]}
//   scores:      {"sample_id", "split", "gt_maneuver", "predicted_maneuver",
//                 "is_misclassified", "scores": {...}, "metrics": {...}}
// Parse errors name the 1-based line. Blank lines and repeated header lines are skipped.

void write_samples(std::ostream & out, std::span<const Sample> samples);
std::vector<Sample> read_samples(std::istream & in);
void write_samples(const std::filesystem::path & path, std::span<const Sample> samples);
std::vector<Sample> read_samples(const std::filesystem::path & path);

void write_predictions(std::ostream & out, std::span<const EnsembleOutput> preds);
/// Every line must carry the same K, Z and t_f (SchemaViolation otherwise).
std::vector<EnsembleOutput> read_predictions(std::istream & in);
void write_predictions(const std::filesystem::path & path, std::span<const EnsembleOutput> preds);
std::vector<EnsembleOutput> read_predictions(const std::filesystem::path & path);

void write_scores(std::ostream & out, std::span<const ScoreRecord> records);
std::vector<ScoreRecord> read_scores(std::istream & in);
void write_scores(const std::filesystem::path & path, std::span<const ScoreRecord> records);
std::vector<ScoreRecord> read_scores(const std::filesystem::path & path);

/// A DetectionReport with the names that produced it.
struct ReportFile
{
  std::string task;         // "maneuver" or "trajectory"
  std::string score_name;
  std::string metric_name;
  std::string split;        // empty when all splits were used
  DetectionReport report;
};

void write_report(std::ostream & out, const ReportFile & report);
ReportFile read_report(std::istream & in);
void write_report(const std::filesystem::path & path, const ReportFile & report);
ReportFile read_report(const std::filesystem::path & path);

/// `q,value,curve` with curve in {uncertainty, optimal, random}.
void write_curves_csv(std::ostream & out, const EvaluationResult & result);
/// `bin_lo,bin_hi,count,class` with class in {correct, misclassified}.
void write_histogram_csv(std::ostream & out, std::span<const HistogramBin> bins);
/// Optimal and random rows per (task, metric), then one row per report.
void write_summary_csv(std::ostream & out, std::span<const ReportFile> reports);
/// `split,score,mean`
void write_split_means_csv(
  std::ostream & out, const std::map<std::string, std::map<std::string, double>> & means);

std::string read_text_file(const std::filesystem::path & path);
void write_text_file(const std::filesystem::path & path, std::string_view text);

}  // namespace uqfd

#endif  // UQFD__IO_HPP_
