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

#include "uqfd/cli.hpp"

#include "uqfd/pipeline.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <optional>
#include <ostream>
#include <set>

namespace uqfd
{
namespace
{

struct SimulateArgs
{
  std::string config;
  std::string out;
  std::optional<std::size_t> n;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> ood_samples;
  bool ood = false;
};

struct PredictArgs
{
  std::string config;
  std::string samples;
  std::string out;
  std::size_t k = 5;
  std::uint64_t seed = 42;
  std::size_t threads = 0;
};

struct ScoreArgs
{
  std::string samples;
  std::string preds;
  std::string out;
  double eps = default_cov_eps;
  std::uint64_t seed = 42;
  std::vector<std::string> scores;
  std::vector<std::string> metrics;
  std::size_t threads = 0;
};

struct EvaluateArgs
{
  std::string scores;
  std::string task;
  std::string score_name;
  std::string metric_name;
  std::string out;
  std::string curves_out;
  std::string hist_out;
  std::string split;
  std::size_t bins = 20;
};

struct ReportArgs
{
  std::vector<std::string> reports;
  std::string out;
  std::string scores;
  std::string split_means_out;
};

std::ofstream open_csv(const std::string & path)
{
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(ErrorKind::Io, "cannot open " + path + " for writing");
  }
  return out;
}

void close_csv(std::ofstream & out, const std::string & path)
{
  out.flush();
  if (!out) {
    throw Error(ErrorKind::Io, "write to " + path + " failed");
  }
}

int do_simulate(const SimulateArgs & a, std::ostream & out)
{
  RunConfig cfg;
  if (!a.config.empty()) {
    cfg = load_run_config(a.config);
  } else {
    apply_env_overrides(cfg);
  }
  if (a.n) {
    cfg.sim.n_samples = *a.n;
  }
  if (a.seed) {
    cfg.sim.seed = *a.seed;
  }
  if (a.ood_samples) {
    cfg.ood_samples = *a.ood_samples;
  }
  if (a.ood) {
    cfg.sim.ood = true;
  }
  validate_run_config(cfg);
  const auto samples = simulate(cfg);
  write_samples(std::filesystem::path(a.out), samples);
  out << "wrote " << samples.size() << " samples to " << a.out << '\n';
  return exit_ok;
}

int do_predict(const PredictArgs & a, std::ostream & out)
{
  RunConfig cfg;
  if (!a.config.empty()) {
    cfg = load_run_config(a.config);
  }
  const auto samples = read_samples(std::filesystem::path(a.samples));
  const auto models = make_ensemble(a.k, a.seed, cfg.sim);
  const auto preds = predict_dataset(models, samples, cfg.sim.rate_hz, a.threads);
  write_predictions(std::filesystem::path(a.out), preds);
  out << "wrote " << preds.size() << " predictions (K=" << a.k << ") to " << a.out << '\n';
  return exit_ok;
}

int do_score(const ScoreArgs & a, std::ostream & out)
{
  const auto samples = read_samples(std::filesystem::path(a.samples));
  const auto preds = read_predictions(std::filesystem::path(a.preds));
  if (!(a.eps > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "--eps must be positive");
  }
  const auto records =
    score_dataset(samples, preds, a.eps, a.seed, a.scores, a.metrics, a.threads);
  write_scores(std::filesystem::path(a.out), records);
  out << "wrote " << records.size() << " score records to " << a.out << '\n';
  return exit_ok;
}

int do_evaluate(const EvaluateArgs & a, std::ostream & out)
{
  const Task task = parse_task(a.task);
  if (!is_known_score(a.score_name)) {
    throw Error(ErrorKind::UnknownName, "unknown score '" + a.score_name + "'");
  }
  if (!is_known_metric(a.metric_name)) {
    throw Error(ErrorKind::UnknownName, "unknown metric '" + a.metric_name + "'");
  }
  const auto records = read_scores(std::filesystem::path(a.scores));
  const auto result = evaluate_records(records, task, a.score_name, a.metric_name, a.split);

  ReportFile report{task_name(task), a.score_name, a.metric_name, a.split, result.report};
  write_report(std::filesystem::path(a.out), report);
  if (!a.curves_out.empty()) {
    auto csv = open_csv(a.curves_out);
    write_curves_csv(csv, result);
    close_csv(csv, a.curves_out);
  }
  if (!a.hist_out.empty()) {
    const auto items = labeled_scores(records, a.score_name, a.metric_name, a.split);
    auto csv = open_csv(a.hist_out);
    write_histogram_csv(csv, score_histograms(items, a.bins));
    close_csv(csv, a.hist_out);
  }
  out << report.task << ' ' << a.score_name << " vs " << a.metric_name << ": n="
      << result.report.n;
  if (result.report.auroc) {
    out << " auroc=" << format_number(*result.report.auroc);
  }
  out << " aucoc=" << format_number(result.report.aucoc_uncertainty)
      << " ir=" << format_number(result.report.ir) << '\n';
  return exit_ok;
}

int do_report(const ReportArgs & a, std::ostream & out)
{
  std::vector<ReportFile> reports;
  reports.reserve(a.reports.size());
  for (const auto & path : a.reports) {
    reports.push_back(read_report(std::filesystem::path(path)));
  }
  auto csv = open_csv(a.out);
  write_summary_csv(csv, reports);
  close_csv(csv, a.out);

  if (!a.split_means_out.empty()) {
    if (a.scores.empty()) {
      throw Error(ErrorKind::InvalidArgument, "--split-means-out needs --scores");
    }
    const auto records = read_scores(std::filesystem::path(a.scores));
    std::set<std::string> names;
    std::vector<SplitScores> per_record;
    per_record.reserve(records.size());
    for (const auto & r : records) {
      per_record.push_back({r.split, r.scores});
      for (const auto & [name, value] : r.scores) {
        names.insert(name);
      }
    }
    const std::vector<std::string> name_list(names.begin(), names.end());
    auto means_csv = open_csv(a.split_means_out);
    write_split_means_csv(means_csv, split_mean_scores(per_record, name_list));
    close_csv(means_csv, a.split_means_out);
  }
  out << "summarized " << reports.size() << " reports in " << a.out << '\n';
  return exit_ok;
}

bool is_usage_error(ErrorKind kind)
{
  return kind == ErrorKind::UnknownName || kind == ErrorKind::ConfigInvalid ||
         kind == ErrorKind::InvalidArgument;
}

}  // namespace

int run_cli(const std::vector<std::string> & args, std::ostream & out, std::ostream & err)
{
  CLI::App app{"Failure-detection scores for multimodal motion prediction", "uqfd"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto * simulate_cmd = app.add_subcommand("simulate", "Generate a synthetic scene dataset");
  simulate_cmd->add_option("--config", sim.config, "key = value or JSON run config")
    ->check(CLI::ExistingFile);
  simulate_cmd->add_option("--out", sim.out, "samples file")->required();
  simulate_cmd->add_option("--n", sim.n, "number of in-distribution samples");
  simulate_cmd->add_option("--seed", sim.seed, "dataset seed");
  simulate_cmd->add_option("--ood-samples", sim.ood_samples, "extra samples from the shifted regime");
  simulate_cmd->add_flag("--ood", sim.ood, "draw every sample from the shifted regime");

  PredictArgs pred;
  auto * predict_cmd = app.add_subcommand("predict", "Run a surrogate ensemble over samples");
  predict_cmd->add_option("--samples", pred.samples)->required()->check(CLI::ExistingFile);
  predict_cmd->add_option("--out", pred.out)->required();
  predict_cmd->add_option("--k", pred.k, "ensemble size")->check(CLI::PositiveNumber);
  predict_cmd->add_option("--seed", pred.seed, "ensemble seed");
  predict_cmd->add_option("--config", pred.config, "timing and kinematics of the scenes")
    ->check(CLI::ExistingFile);
  predict_cmd->add_option("--threads", pred.threads, "0 = all cores");

  ScoreArgs score;
  auto * score_cmd = app.add_subcommand("score", "Compute uncertainty scores and error metrics");
  score_cmd->add_option("--samples", score.samples)->required()->check(CLI::ExistingFile);
  score_cmd->add_option("--preds", score.preds)->required()->check(CLI::ExistingFile);
  score_cmd->add_option("--out", score.out)->required();
  score_cmd->add_option("--eps", score.eps, "covariance regularizer (m^2)");
  score_cmd->add_option("--seed", score.seed, "unified clustering seed");
  score_cmd->add_option("--scores", score.scores, "score names to keep")->delimiter(',');
  score_cmd->add_option("--metrics", score.metrics, "metric names to keep")->delimiter(',');
  score_cmd->add_option("--threads", score.threads, "0 = all cores");

  EvaluateArgs eval;
  auto * evaluate_cmd = app.add_subcommand("evaluate", "AUROC, cut-off curves and IR for one score");
  evaluate_cmd->add_option("--scores", eval.scores)->required()->check(CLI::ExistingFile);
  evaluate_cmd->add_option("--task", eval.task, "maneuver or trajectory")->required();
  evaluate_cmd->add_option("--score-name", eval.score_name)->required();
  evaluate_cmd->add_option("--metric-name", eval.metric_name)->required();
  evaluate_cmd->add_option("--out", eval.out, "report.json")->required();
  evaluate_cmd->add_option("--curves-out", eval.curves_out, "curves.csv");
  evaluate_cmd->add_option("--hist-out", eval.hist_out, "score histogram csv");
  evaluate_cmd->add_option("--bins", eval.bins)->check(CLI::Range(2, 100000));
  evaluate_cmd->add_option("--split", eval.split, "restrict to one split");

  ReportArgs rep;
  auto * report_cmd = app.add_subcommand("report", "Tabulate report files");
  report_cmd->add_option("--reports", rep.reports)->required()->check(CLI::ExistingFile);
  report_cmd->add_option("--out", rep.out, "summary.csv")->required();
  report_cmd->add_option("--scores", rep.scores, "score records for split means")
    ->check(CLI::ExistingFile);
  report_cmd->add_option("--split-means-out", rep.split_means_out, "split,score,mean csv");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError & e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? exit_ok : exit_usage_error;
  }

  try {
    if (*simulate_cmd) {
      return do_simulate(sim, out);
    }
    if (*predict_cmd) {
      return do_predict(pred, out);
    }
    if (*score_cmd) {
      return do_score(score, out);
    }
    if (*evaluate_cmd) {
      return do_evaluate(eval, out);
    }
    return do_report(rep, out);
  } catch (const Error & e) {
    err << "uqfd: " << e.what() << '\n';
    return is_usage_error(e.kind()) ? exit_usage_error : exit_data_error;
  } catch (const std::exception & e) {
    err << "uqfd: " << e.what() << '\n';
    return exit_data_error;
  }
}

}  // namespace uqfd
