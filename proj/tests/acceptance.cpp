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

// One line per acceptance criterion; exit status is the number of failures.

#include "oracles.hpp"
#include "uqfd/eval.hpp"
#include "uqfd/io.hpp"
#include "uqfd/pipeline.hpp"
#include "uqfd/uq_class.hpp"
#include "uqfd/uq_traj.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

namespace
{

using namespace uqfd;

const double ln_2pi_e = 1.0 + std::log(2.0 * std::numbers::pi);

struct Outcome
{
  bool pass = false;
  std::string detail;
};

std::string fmt(double v)
{
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

Outcome entropy_identities()
{
  Rng rng(20240601);
  double worst_identity = 0.0;
  double worst_mi = 0.0;
  double worst_dup = 0.0;
  bool bounds = true;
  for (int trial = 0; trial < 10000; ++trial) {
    const std::size_t k = 1 + rng.below(8);
    const std::size_t z = 2 + rng.below(5);
    std::vector<ProbVector> rows;
    for (std::size_t i = 0; i < k; ++i) {
      rows.push_back(ProbVector::validate(oracle::random_probs(rng, z)));
    }
    const ProbMatrix m(rows);
    const auto s = ensemble_class_scores(m);
    worst_identity = std::max(worst_identity, std::abs(s.te - (s.de + s.mi)));
    worst_mi = std::min(worst_mi, s.mi);
    bounds = bounds && s.de >= 0.0 && s.de <= s.te + 1e-12 &&
             s.te <= std::log(static_cast<double>(z)) + 1e-12;

    const ProbMatrix dup(std::vector<ProbVector>(k, rows.front()));
    worst_dup = std::max(worst_dup, std::abs(mutual_information(dup)));
  }
  return {
    worst_identity <= 1e-12 && worst_mi >= -1e-12 && worst_dup <= 1e-12 && bounds,
    "10000 matrices: max|TE-DE-MI|=" + fmt(worst_identity) + " min MI=" + fmt(worst_mi) +
      " max|MI dup|=" + fmt(worst_dup) + " bounds " + (bounds ? "hold" : "violated")};
}

Outcome edl_checks()
{
  const auto flat = edl_scores(std::vector<double>{1.0, 1.0});
  const double de_err = std::abs(flat.de - 0.5);
  const double mi_err = std::abs(flat.mi - (std::log(2.0) - 0.5));
  const std::vector<double> p{0.7, 0.3};
  std::vector<double> alpha;
  for (double v : p) {
    alpha.push_back(1e6 * v);
  }
  const auto strong = edl_scores(alpha);
  const double te_gap = std::abs(strong.te - oracle::shannon(p));
  const double u_one = edl_u(std::vector<double>{1.0, 1.0, 1.0, 1.0});
  return {
    de_err <= 1e-9 && mi_err <= 1e-9 && te_gap < 1e-3 && *strong.u < 3e-6 && u_one == 1.0,
    "alpha=[1,1]: |DE-0.5|=" + fmt(de_err) + " |MI-(ln2-0.5)|=" + fmt(mi_err) +
      "; alpha=1e6 p: |TE-H(p)|=" + fmt(te_gap) + " u=" + fmt(*strong.u) + "; u(1)=" + fmt(u_one)};
}

Outcome gaussian_entropy_checks()
{
  const double unit_err = std::abs(gaussian_step_entropy({{0, 0}, {1, 0, 1}}) - ln_2pi_e);

  Rng rng(3);
  TrajGroup mc;
  mc.trajs.reserve(100000);
  for (int i = 0; i < 100000; ++i) {
    mc.trajs.push_back(Trajectory({{2.0 * rng.normal(), rng.normal()}}));
  }
  const double closed = ln_2pi_e + 0.5 * std::log(4.0);
  const double rel = std::abs(ape(mc) - closed) / closed;

  // dyadic coordinates and a power-of-two group size keep every operation exact
  TrajGroup g;
  TrajGroup shifted;
  TrajGroup scaled;
  const double c = 3.0;
  for (int j = 0; j < 8; ++j) {
    std::vector<Point2> a;
    std::vector<Point2> b;
    std::vector<Point2> s;
    for (int i = 0; i < 5; ++i) {
      const double x = std::round(rng.normal(0.0, 4.0) * 1024.0) / 1024.0;
      const double y = std::round(rng.normal(0.0, 4.0) * 1024.0) / 1024.0;
      a.push_back({x, y});
      b.push_back({x + 4096.0, y - 2048.0});
      s.push_back({c * x, c * y});
    }
    g.trajs.emplace_back(std::move(a));
    shifted.trajs.emplace_back(std::move(b));
    scaled.trajs.emplace_back(std::move(s));
  }
  const bool translation_exact = ape(shifted) == ape(g) && fpe(shifted) == fpe(g);
  const double scale_err = std::abs(ape(scaled, 1e-15) - (ape(g, 1e-15) + 2.0 * std::log(c)));
  return {
    unit_err <= 1e-12 && rel <= 0.02 && translation_exact && scale_err <= 1e-9,
    "|H(I)-(1+ln2pi)|=" + fmt(unit_err) + " MC rel err=" + fmt(rel) + " translation " +
      (translation_exact ? "exact" : "NOT exact") + " |scale err|=" + fmt(scale_err)};
}

Outcome auroc_oracle()
{
  Rng rng(77);
  double worst = 0.0;
  int bit_equal = 0;
  for (int inst = 0; inst < 100; ++inst) {
    const std::size_t n = 2 + rng.below(199);
    const double levels = static_cast<double>(1 + rng.below(20));
    std::vector<LabeledScore> items(n);
    for (std::size_t i = 0; i < n; ++i) {
      items[i] = {"s" + std::to_string(i), std::floor(rng.uniform() * levels) / levels,
                  rng.uniform() < 0.35 ? 0.0 : 1.0};
    }
    items[0].target = 0.0;
    items[1].target = 1.0;
    const double a = auroc(items);
    const double b = oracle::pairwise_auroc(items);
    worst = std::max(worst, std::abs(a - b));
    bit_equal += a == b;
  }
  return {
    worst <= 1e-12,
    "100 tied instances: max|diff|=" + fmt(worst) + " bit-equal " + std::to_string(bit_equal) + "/100"};
}

Outcome aucoc_checks()
{
  const std::vector<LabeledScore> hand{{"a", 0.1, 1.0}, {"b", 0.2, 1.0}, {"c", 0.9, 0.0}};
  const double hand_err = std::abs(cutoff_curve(hand, CurveKind::AccuracyUp).aucoc - 17.0 / 18.0);

  Rng rng(50);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 2 + rng.below(100);
    std::vector<LabeledScore> items(n);
    for (std::size_t i = 0; i < n; ++i) {
      items[i] = {"s" + std::to_string(i), rng.uniform(), rng.uniform(0.0, 10.0)};
    }
    const auto curve = cutoff_curve(items, CurveKind::ErrorDown);
    worst = std::max(worst, std::abs(curve.aucoc - oracle::dense_integral(curve.points, 1000 * n)));
  }

  bool flat_exact = true;
  for (double v : {0.3, 1.0 / 7.0, 0.119, 42.5}) {
    std::vector<LabeledScore> items(61);
    for (std::size_t i = 0; i < items.size(); ++i) {
      items[i] = {"s" + std::to_string(i), static_cast<double>(i % 4), v};
    }
    flat_exact = flat_exact && cutoff_curve(items, CurveKind::ErrorDown).aucoc == v;
  }
  return {
    hand_err <= 1e-12 && worst <= 1e-9 && flat_exact,
    "|AUCOC-17/18|=" + fmt(hand_err) + " max|trapezoid-dense| over 50 curves=" + fmt(worst) +
      " flat curves " + (flat_exact ? "exact" : "NOT exact")};
}

Outcome ir_check()
{
  const double ir = improvement_ratio(0.119, 0.066, 0.259);
  const double opt = improvement_ratio(0.066, 0.066, 0.259);
  const double rnd = improvement_ratio(0.259, 0.066, 0.259);
  return {
    std::abs(ir - 0.725) <= 0.005 && opt == 1.0 && rnd == 0.0,
    "IR(0.119, 0.066, 0.259)=" + fmt(ir) + " IR(opt)=" + fmt(opt) + " IR(rand)=" + fmt(rnd)};
}

double mean_auroc(const std::vector<ScoreRecord> & recs, const std::string & score, const std::string & metric)
{
  return *evaluate_records(recs, Task::Maneuver, score, metric, "id").report.auroc;
}

Outcome detection_power()
{
  RunConfig cfg;  // n = 5000, seed 42, K = 5
  const auto main_run = run_pipeline(cfg);
  const double te_auroc = mean_auroc(main_run.scores, "te", "correct");
  const double ir_ape = evaluate_records(main_run.scores, Task::Trajectory, "ape_z", "min_ade").report.ir;
  const double ir_te = evaluate_records(main_run.scores, Task::Trajectory, "te", "min_ade").report.ir;

  double ensemble_sum = 0.0;
  double single_sum = 0.0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    RunConfig c;
    c.sim.seed = seed;
    const auto run = run_pipeline(c);
    ensemble_sum += mean_auroc(run.scores, "te", "correct");
    double members = 0.0;
    for (std::size_t k = 0; k < c.k; ++k) {
      const auto idx = std::to_string(k);
      members += mean_auroc(run.scores, "de_m" + idx, "correct_m" + idx);
    }
    single_sum += members / static_cast<double>(c.k);
  }
  const double ensemble_mean = ensemble_sum / 5.0;
  const double single_mean = single_sum / 5.0;
  return {
    te_auroc > 0.70 && ensemble_mean >= single_mean && ir_ape > ir_te,
    "seed 42: AUROC(TE)=" + fmt(te_auroc) + "; 5 seeds: ensemble TE " + fmt(ensemble_mean) +
      " vs single-model DE " + fmt(single_mean) + "; IR minADE_z: APE_z " + fmt(ir_ape) +
      " vs TE " + fmt(ir_te)};
}

Outcome ood_shift()
{
  int wins = 0;
  std::string detail;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    RunConfig cfg;
    cfg.sim.seed = seed;
    cfg.sim.n_samples = 2000;
    cfg.ood_samples = 2000;
    cfg.scores = {"mi"};
    cfg.metrics = {"correct"};
    const auto run = run_pipeline(cfg);
    std::vector<SplitScores> per;
    for (const auto & r : run.scores) {
      per.push_back({r.split, r.scores});
    }
    const std::vector<std::string> names{"mi"};
    const auto means = split_mean_scores(per, names);
    const double id = means.at("id").at("mi");
    const double ood = means.at("ood").at("mi");
    wins += ood > id;
    detail += " s" + std::to_string(seed) + ":" + fmt(id) + "<" + fmt(ood);
  }
  return {wins >= 4, "mean MI id<ood on " + std::to_string(wins) + "/5 seeds;" + detail};
}

Outcome clustering_checks()
{
  std::vector<Trajectory> separated;
  for (int j = 0; j < 12; ++j) {
    std::vector<Point2> a;
    std::vector<Point2> b;
    for (int i = 1; i <= 6; ++i) {
      a.push_back({2.0 * i + 0.05 * j, 0.1 * j});
      b.push_back({-30.0, 40.0 + 2.0 * i - 0.05 * j});
    }
    separated.emplace_back(std::move(a));
    separated.emplace_back(std::move(b));
  }
  const auto two = unified_cluster(separated, 2, 11);
  bool recovered = two.assignments[0] != two.assignments[1];
  for (std::size_t j = 0; j < separated.size(); ++j) {
    recovered = recovered && two.assignments[j] == two.assignments[j % 2];
  }

  bool monotone = true;
  bool deterministic = true;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(mix64(seed, 99));
    std::vector<Trajectory> protos;
    for (int z = 0; z < 4; ++z) {
      const AgentState start{0.0, 0.0, rng.uniform(-3.0, 3.0), rng.uniform(2.0, 12.0)};
      protos.push_back(rollout(static_cast<std::size_t>(z), start, 6, 2.0, {0.35, 2.0, 1.0}));
    }
    std::vector<Trajectory> pooled;
    for (int j = 0; j < 50; ++j) {
      const auto & p = protos[rng.below(4)];
      std::vector<Point2> pts;
      for (const auto & pt : p.points()) {
        pts.push_back({pt.x + rng.normal(0.0, 1.5), pt.y + rng.normal(0.0, 1.5)});
      }
      pooled.emplace_back(std::move(pts));
    }
    const auto a = unified_cluster(pooled, 4, seed);
    const auto b = unified_cluster(pooled, 4, seed);
    deterministic = deterministic && a.assignments == b.assignments && a.centers == b.centers &&
                    a.cost_history == b.cost_history;
    for (std::size_t i = 1; i < a.cost_history.size(); ++i) {
      monotone = monotone && a.cost_history[i] <= a.cost_history[i - 1];
    }
  }
  return {
    recovered && monotone && deterministic,
    std::string("two groups ") + (recovered ? "recovered" : "NOT recovered") + "; objective " +
      (monotone ? "non-increasing" : "increased") + " on 20 sets; " +
      (deterministic ? "deterministic" : "NOT deterministic")};
}

std::string write_all(const PipelineOutput & out, const std::filesystem::path & dir)
{
  std::filesystem::create_directories(dir);
  write_samples(dir / "samples.jsonl", out.samples);
  write_predictions(dir / "preds.jsonl", out.preds);
  write_scores(dir / "scores.jsonl", out.scores);
  const auto eval = evaluate_records(out.scores, Task::Maneuver, "te", "correct");
  write_report(dir / "report.json", ReportFile{"maneuver", "te", "correct", "", eval.report});
  std::ofstream curves(dir / "curves.csv", std::ios::binary);
  write_curves_csv(curves, eval);
  curves.close();
  std::string all;
  for (const char * f : {"samples.jsonl", "preds.jsonl", "scores.jsonl", "report.json", "curves.csv"}) {
    all += read_text_file(dir / f);
  }
  return all;
}

Outcome determinism_and_round_trip()
{
  RunConfig cfg;
  cfg.sim.n_samples = 400;
  cfg.sim.seed = 2024;
  cfg.ood_samples = 100;
  const auto root = std::filesystem::temp_directory_path() / "uqfd_acceptance";
  std::filesystem::remove_all(root);
  cfg.threads = 1;
  const auto first = write_all(run_pipeline(cfg), root / "a");
  cfg.threads = 0;
  const auto out = run_pipeline(cfg);
  const auto second = write_all(out, root / "b");
  const bool identical = first == second;

  const bool samples_rt = read_samples(root / "b" / "samples.jsonl") == out.samples;
  const bool preds_rt = read_predictions(root / "b" / "preds.jsonl") == out.preds;
  const bool scores_rt = read_scores(root / "b" / "scores.jsonl") == out.scores;
  const auto eval = evaluate_records(out.scores, Task::Maneuver, "te", "correct");
  const auto rep = read_report(root / "b" / "report.json");
  const bool report_rt = rep.report.auroc == eval.report.auroc &&
                         rep.report.aucoc_uncertainty == eval.report.aucoc_uncertainty &&
                         rep.report.aucoc_optimal == eval.report.aucoc_optimal &&
                         rep.report.aucoc_random == eval.report.aucoc_random &&
                         rep.report.ir == eval.report.ir && rep.report.n == eval.report.n;
  std::filesystem::remove_all(root);
  const bool rt = samples_rt && preds_rt && scores_rt && report_rt;
  return {
    identical && rt,
    std::string("rerun files ") + (identical ? "byte-identical" : "DIFFER") + " (" +
      std::to_string(first.size()) + " bytes); round-trip samples/preds/scores/report " +
      (rt ? "lossless" : "LOSSY")};
}

}  // namespace

int main()
{
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
    {"entropy identities", entropy_identities},
    {"evidential scores", edl_checks},
    {"gaussian entropy", gaussian_entropy_checks},
    {"auroc oracle", auroc_oracle},
    {"cut-off curve / aucoc", aucoc_checks},
    {"improvement ratio", ir_check},
    {"end-to-end detection power", detection_power},
    {"ood shift", ood_shift},
    {"unified clustering", clustering_checks},
    {"determinism and round-trip", determinism_and_round_trip},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception & e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    failures += !o.pass;
    std::printf(
      "AC%zu %s  %s: %s\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first.c_str(),
      o.detail.c_str());
    std::fflush(stdout);
  }
  return failures;
}
