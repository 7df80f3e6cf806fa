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

#include "uqfd/pipeline.hpp"

#include "uqfd/errors.hpp"
#include "uqfd/random.hpp"
#include "uqfd/uq_class.hpp"

#include "json.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdlib>
#include <exception>
#include <functional>
#include <limits>
#include <mutex>
#include <thread>
#include <unordered_map>

namespace uqfd
{
namespace
{

constexpr std::uint64_t ood_stream = 0x6f6f642d73706c74ULL;

const std::vector<std::string> & ensemble_score_names()
{
  static const std::vector<std::string> names{"te", "de", "mi", "nmap"};
  return names;
}

const std::vector<std::string> & edl_score_names()
{
  static const std::vector<std::string> names{"edl_te", "edl_de", "edl_mi", "edl_nmap", "edl_u"};
  return names;
}

const std::vector<std::string> & cross_model_score_names()
{
  static const std::vector<std::string> names{"ape_z", "fpe_z", "ape_avg", "fpe_avg", "ape_maxp"};
  return names;
}

const std::vector<std::string> & per_model_score_names()
{
  static const std::vector<std::string> names{"mean_ape", "mean_fpe", "ape_all"};
  return names;
}

const std::vector<std::string> & error_metric_names()
{
  static const std::vector<std::string> names{
    "min_ade", "mean_ade", "ade_avg", "min_fde", "mean_fde", "fde_avg", "uc_min_ade", "uc_min_fde"};
  return names;
}

bool contains(const std::vector<std::string> & names, std::string_view name)
{
  return std::find(names.begin(), names.end(), name) != names.end();
}

/// "<prefix><digits>" with no leading zeros beyond "0".
bool is_member_name(std::string_view name, std::string_view prefix)
{
  if (name.substr(0, prefix.size()) != prefix || name.size() == prefix.size()) {
    return false;
  }
  const auto digits = name.substr(prefix.size());
  if (digits.size() > 1 && digits.front() == '0') {
    return false;
  }
  return std::all_of(digits.begin(), digits.end(), [](char c) { return c >= '0' && c <= '9'; });
}

std::string member_name(std::string_view prefix, std::size_t k)
{
  return std::string(prefix) + std::to_string(k);
}

std::uint64_t fnv1a(std::string_view s)
{
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)> & fn)
{
  if (threads == 0) {
    threads = std::max(1u, std::thread::hardware_concurrency());
  }
  threads = std::min(threads, n);
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) {
      fn(i);
    }
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::size_t first_error_index = std::numeric_limits<std::size_t>::max();
  std::mutex error_mutex;
  std::vector<std::thread> workers;
  workers.reserve(threads);
  for (std::size_t t = 0; t < threads; ++t) {
    workers.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (i < first_error_index) {
            first_error_index = i;
            first_error = std::current_exception();
          }
        }
      }
    });
  }
  for (auto & w : workers) {
    w.join();
  }
  if (first_error) {
    std::rethrow_exception(first_error);
  }
}

std::map<std::string, double> select(
  const std::map<std::string, double> & all, std::span<const std::string> names,
  const std::string & sample_id)
{
  std::map<std::string, double> out;
  for (const auto & name : names) {
    const auto it = all.find(name);
    if (it == all.end()) {
      throw Error(ErrorKind::SchemaViolation, "sample " + sample_id + " has no value for " + name);
    }
    out.emplace(name, it->second);
  }
  return out;
}

// ---------------------------------------------------------------------------- config values

std::string trim(std::string_view s)
{
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) {
    return {};
  }
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

[[noreturn]] void bad_value(const std::string & key, const std::string & value)
{
  throw Error(ErrorKind::ConfigInvalid, "bad value for " + key + ": '" + value + "'");
}

double to_double(const std::string & key, const std::string & value)
{
  double out = 0.0;
  const auto res = std::from_chars(value.data(), value.data() + value.size(), out);
  if (res.ec != std::errc{} || res.ptr != value.data() + value.size()) {
    bad_value(key, value);
  }
  return out;
}

std::uint64_t to_unsigned(const std::string & key, const std::string & value)
{
  std::uint64_t out = 0;
  const auto res = std::from_chars(value.data(), value.data() + value.size(), out);
  if (res.ec != std::errc{} || res.ptr != value.data() + value.size()) {
    bad_value(key, value);
  }
  return out;
}

bool to_bool(const std::string & key, const std::string & value)
{
  if (value == "true" || value == "1") {
    return true;
  }
  if (value == "false" || value == "0") {
    return false;
  }
  bad_value(key, value);
}

std::vector<std::string> to_list(const std::string & value)
{
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= value.size()) {
    const auto end = value.find(',', start);
    auto item = trim(value.substr(start, end == std::string::npos ? std::string::npos : end - start));
    if (!item.empty()) {
      out.push_back(std::move(item));
    }
    if (end == std::string::npos) {
      break;
    }
    start = end + 1;
  }
  return out;
}

void set_key(RunConfig & cfg, const std::string & key, const std::string & value)
{
  auto & s = cfg.sim;
  if (key == "n_samples") {
    s.n_samples = to_unsigned(key, value);
  } else if (key == "seed") {
    s.seed = to_unsigned(key, value);
  } else if (key == "rate_hz") {
    s.rate_hz = to_double(key, value);
  } else if (key == "t_h") {
    s.t_h = to_unsigned(key, value);
  } else if (key == "t_f") {
    s.t_f = to_unsigned(key, value);
  } else if (key == "speed_min") {
    s.speed_min = to_double(key, value);
  } else if (key == "speed_max") {
    s.speed_max = to_double(key, value);
  } else if (key == "yaw_rate_turn") {
    s.yaw_rate_turn = to_double(key, value);
  } else if (key == "stop_decel") {
    s.stop_decel = to_double(key, value);
  } else if (key == "obs_noise_sigma") {
    s.obs_noise_sigma = to_double(key, value);
  } else if (key == "ambiguity") {
    s.ambiguity = to_double(key, value);
  } else if (key == "ood") {
    s.ood = to_bool(key, value);
  } else if (key == "ood_samples") {
    cfg.ood_samples = to_unsigned(key, value);
  } else if (key == "k") {
    cfg.k = to_unsigned(key, value);
  } else if (key == "eps") {
    cfg.eps = to_double(key, value);
  } else if (key == "scores") {
    cfg.scores = to_list(value);
  } else if (key == "metrics") {
    cfg.metrics = to_list(value);
  } else if (key == "threads") {
    cfg.threads = to_unsigned(key, value);
  } else if (key == "samples_out") {
    cfg.samples_out = value;
  } else if (key == "preds_out") {
    cfg.preds_out = value;
  } else if (key == "scores_out") {
    cfg.scores_out = value;
  } else {
    throw Error(ErrorKind::ConfigInvalid, "unknown config key '" + key + "'");
  }
}

std::string json_value_text(const std::string & key, const nlohmann::json & v)
{
  if (v.is_string()) {
    return v.get<std::string>();
  }
  if (v.is_boolean()) {
    return v.get<bool>() ? "true" : "false";
  }
  if (v.is_number()) {
    return v.dump();
  }
  if (v.is_array()) {
    std::string out;
    for (const auto & item : v) {
      if (!item.is_string()) {
        throw Error(ErrorKind::ConfigInvalid, key + " must list names");
      }
      if (!out.empty()) {
        out += ',';
      }
      out += item.get<std::string>();
    }
    return out;
  }
  throw Error(ErrorKind::ConfigInvalid, "unsupported value for " + key);
}

}  // namespace

// ---------------------------------------------------------------------------- registry

bool is_known_score(std::string_view name)
{
  return contains(ensemble_score_names(), name) || contains(edl_score_names(), name) ||
         contains(cross_model_score_names(), name) || contains(per_model_score_names(), name) ||
         is_member_name(name, "de_m") || is_member_name(name, "nmap_m");
}

bool is_known_metric(std::string_view name)
{
  return is_correctness_metric(name) || contains(error_metric_names(), name) ||
         parse_two_level_name(name).has_value();
}

bool is_correctness_metric(std::string_view name)
{
  return name == "correct" || is_member_name(name, "correct_m");
}

std::vector<std::string> default_score_names(std::size_t k)
{
  std::vector<std::string> names = ensemble_score_names();
  for (std::size_t m = 0; m < k; ++m) {
    names.push_back(member_name("de_m", m));
    names.push_back(member_name("nmap_m", m));
  }
  if (k >= 2) {
    names.insert(names.end(), cross_model_score_names().begin(), cross_model_score_names().end());
  }
  names.insert(names.end(), per_model_score_names().begin(), per_model_score_names().end());
  return names;
}

std::vector<std::string> default_metric_names(std::size_t k)
{
  std::vector<std::string> names{"correct"};
  for (std::size_t m = 0; m < k; ++m) {
    names.push_back(member_name("correct_m", m));
  }
  names.insert(names.end(), error_metric_names().begin(), error_metric_names().end());
  for (auto model : {ModelReduce::Mean, ModelReduce::Min}) {
    for (auto mode : {ModeReduce::Min, ModeReduce::Mean, ModeReduce::Maxp}) {
      for (auto d : {Displacement::Ade, Displacement::Fde}) {
        names.push_back(two_level_name(model, mode, d));
      }
    }
  }
  return names;
}

// ---------------------------------------------------------------------------- scoring

ScoreRecord score_sample(
  const Sample & sample, const EnsembleOutput & ensemble, double eps, std::uint64_t seed)
{
  validate_sample(sample);
  validate_ensemble_output(ensemble);
  if (ensemble.sample_id != sample.id) {
    throw Error(
      ErrorKind::ShapeMismatch,
      "prediction " + ensemble.sample_id + " does not belong to sample " + sample.id);
  }

  ScoreRecord rec;
  rec.sample_id = sample.id;
  rec.split = sample.split;
  rec.gt_maneuver = sample.gt_maneuver;

  std::vector<ProbVector> rows;
  rows.reserve(ensemble.num_members());
  for (const auto & m : ensemble.members) {
    rows.push_back(m.mode_probs);
  }
  const ProbMatrix probs(std::move(rows));
  const auto cls = ensemble_class_scores(probs);
  rec.predicted_maneuver = mean_probs(probs).argmax();
  rec.is_misclassified = rec.predicted_maneuver != sample.gt_maneuver;
  rec.scores["te"] = cls.te;
  rec.scores["de"] = cls.de;
  rec.scores["mi"] = cls.mi;
  rec.scores["nmap"] = cls.nmap;
  rec.metrics["correct"] = rec.is_misclassified ? 0.0 : 1.0;

  for (std::size_t k = 0; k < ensemble.num_members(); ++k) {
    const auto & p = ensemble.members[k].mode_probs;
    rec.scores[member_name("de_m", k)] = entropy(p);
    rec.scores[member_name("nmap_m", k)] = -p[p.argmax()];
    rec.metrics[member_name("correct_m", k)] = p.argmax() == sample.gt_maneuver ? 1.0 : 0.0;
  }

  const bool all_evidential = std::all_of(
    ensemble.members.begin(), ensemble.members.end(),
    [](const ModelOutput & m) { return m.evidence.has_value(); });
  if (all_evidential) {
    const auto edl = edl_scores(edl_alpha(EvidenceVector::validate(*ensemble.members[0].evidence)));
    rec.scores["edl_te"] = edl.te;
    rec.scores["edl_de"] = edl.de;
    rec.scores["edl_mi"] = edl.mi;
    rec.scores["edl_nmap"] = edl.nmap;
    rec.scores["edl_u"] = *edl.u;
  }

  const auto traj = trajectory_score_suite(ensemble, sample.gt_maneuver, eps);
  auto put = [&](const char * name, const std::optional<double> & v) {
    if (v) {
      rec.scores[name] = *v;
    }
  };
  put("ape_z", traj.ape_z);
  put("fpe_z", traj.fpe_z);
  put("ape_avg", traj.ape_avg);
  put("fpe_avg", traj.fpe_avg);
  put("ape_maxp", traj.ape_maxp);
  rec.scores["mean_ape"] = traj.mean_ape;
  rec.scores["mean_fpe"] = traj.mean_fpe;
  rec.scores["ape_all"] = traj.ape_all;

  const auto bundle = set_errors(true_maneuver_group(ensemble, sample.gt_maneuver).trajs, sample.gt_future);
  rec.metrics["min_ade"] = bundle.min_ade;
  rec.metrics["mean_ade"] = bundle.mean_ade;
  rec.metrics["ade_avg"] = bundle.ade_avg;
  rec.metrics["min_fde"] = bundle.min_fde;
  rec.metrics["mean_fde"] = bundle.mean_fde;
  rec.metrics["fde_avg"] = bundle.fde_avg;

  for (auto model : {ModelReduce::Mean, ModelReduce::Min}) {
    for (auto mode : {ModeReduce::Min, ModeReduce::Mean, ModeReduce::Maxp}) {
      for (auto d : {Displacement::Ade, Displacement::Fde}) {
        rec.metrics[two_level_name(model, mode, d)] =
          two_level_error(ensemble, sample.gt_future, model, mode, d).value;
      }
    }
  }

  const auto pooled = pooled_group(ensemble).trajs;
  const auto clusters = unified_cluster(pooled, ensemble.num_modes(), mix64(seed, fnv1a(sample.id)));
  const auto uc = set_errors(clusters.centers, sample.gt_future);
  rec.metrics["uc_min_ade"] = uc.min_ade;
  rec.metrics["uc_min_fde"] = uc.min_fde;
  return rec;
}

std::vector<ScoreRecord> score_dataset(
  std::span<const Sample> samples, std::span<const EnsembleOutput> preds, double eps,
  std::uint64_t seed, std::span<const std::string> score_names,
  std::span<const std::string> metric_names, std::size_t threads)
{
  for (const auto & name : score_names) {
    if (!is_known_score(name)) {
      throw Error(ErrorKind::UnknownName, "unknown score '" + name + "'");
    }
  }
  for (const auto & name : metric_names) {
    if (!is_known_metric(name)) {
      throw Error(ErrorKind::UnknownName, "unknown metric '" + name + "'");
    }
  }
  std::unordered_map<std::string, std::size_t> by_id;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    if (!by_id.emplace(preds[i].sample_id, i).second) {
      throw Error(ErrorKind::SchemaViolation, "duplicate prediction for " + preds[i].sample_id);
    }
  }
  std::vector<std::size_t> pred_index(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto it = by_id.find(samples[i].id);
    if (it == by_id.end()) {
      throw Error(ErrorKind::SchemaViolation, "no prediction for sample " + samples[i].id);
    }
    pred_index[i] = it->second;
  }

  std::vector<ScoreRecord> records(samples.size());
  parallel_for(samples.size(), threads, [&](std::size_t i) {
    auto rec = score_sample(samples[i], preds[pred_index[i]], eps, seed);
    if (!score_names.empty()) {
      rec.scores = select(rec.scores, score_names, rec.sample_id);
    }
    if (!metric_names.empty()) {
      rec.metrics = select(rec.metrics, metric_names, rec.sample_id);
    }
    records[i] = std::move(rec);
  });
  return records;
}

std::vector<EnsembleOutput> predict_dataset(
  std::span<const SurrogateModel> models, std::span<const Sample> samples, double rate_hz,
  std::size_t threads)
{
  std::vector<EnsembleOutput> out(samples.size());
  parallel_for(samples.size(), threads, [&](std::size_t i) {
    out[i] = predict_ensemble(models, samples[i], rate_hz);
  });
  return out;
}

// ---------------------------------------------------------------------------- evaluation

Task parse_task(std::string_view name)
{
  if (name == "maneuver") {
    return Task::Maneuver;
  }
  if (name == "trajectory") {
    return Task::Trajectory;
  }
  throw Error(ErrorKind::UnknownName, "unknown task '" + std::string(name) + "'");
}

std::string task_name(Task task)
{
  return task == Task::Maneuver ? "maneuver" : "trajectory";
}

std::vector<LabeledScore> labeled_scores(
  std::span<const ScoreRecord> records, const std::string & score_name,
  const std::string & metric_name, const std::string & split)
{
  std::vector<LabeledScore> items;
  items.reserve(records.size());
  for (const auto & r : records) {
    if (!split.empty() && r.split != split) {
      continue;
    }
    const auto s = r.scores.find(score_name);
    if (s == r.scores.end()) {
      throw Error(ErrorKind::SchemaViolation, "record " + r.sample_id + " has no score " + score_name);
    }
    const auto m = r.metrics.find(metric_name);
    if (m == r.metrics.end()) {
      throw Error(
        ErrorKind::SchemaViolation, "record " + r.sample_id + " has no metric " + metric_name);
    }
    items.push_back({r.sample_id, s->second, m->second});
  }
  if (items.empty() && !split.empty()) {
    throw Error(ErrorKind::EmptySplit, "no records in split '" + split + "'");
  }
  return items;
}

EvaluationResult evaluate_records(
  std::span<const ScoreRecord> records, Task task, const std::string & score_name,
  const std::string & metric_name, const std::string & split)
{
  if (!is_known_score(score_name)) {
    throw Error(ErrorKind::UnknownName, "unknown score '" + score_name + "'");
  }
  if (!is_known_metric(metric_name)) {
    throw Error(ErrorKind::UnknownName, "unknown metric '" + metric_name + "'");
  }
  if (is_correctness_metric(metric_name) != (task == Task::Maneuver)) {
    throw Error(
      ErrorKind::UnknownName,
      "metric '" + metric_name + "' does not belong to the " + task_name(task) + " task");
  }
  const auto items = labeled_scores(records, score_name, metric_name, split);
  return evaluate_detection(
    items, task == Task::Maneuver ? CurveKind::AccuracyUp : CurveKind::ErrorDown);
}

// ---------------------------------------------------------------------------- config

RunConfig parse_run_config(std::string_view text)
{
  RunConfig cfg;
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string_view::npos && text[first] == '{') {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error & e) {
      throw Error(ErrorKind::ConfigInvalid, e.what());
    }
    for (const auto & [key, value] : j.items()) {
      set_key(cfg, key, json_value_text(key, value));
    }
  } else {
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start < text.size()) {
      auto end = text.find('\n', start);
      if (end == std::string_view::npos) {
        end = text.size();
      }
      ++line_no;
      const auto line = trim(text.substr(start, end - start));
      start = end + 1;
      if (line.empty() || line.front() == '#') {
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string::npos) {
        throw Error(
          ErrorKind::ConfigInvalid, "line " + std::to_string(line_no) + ": expected key = value");
      }
      set_key(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
  }
  apply_env_overrides(cfg);
  validate_run_config(cfg);
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path & path)
{
  return parse_run_config(read_text_file(path));
}

void apply_env_overrides(RunConfig & cfg)
{
  if (const char * env = std::getenv("UQFD_SEED"); env != nullptr && *env != '\0') {
    cfg.sim.seed = to_unsigned("UQFD_SEED", env);
  }
}

void validate_run_config(const RunConfig & cfg)
{
  validate_config(cfg.sim);
  if (cfg.k == 0) {
    throw Error(ErrorKind::ConfigInvalid, "k must be at least 1");
  }
  if (!(cfg.eps > 0.0) || !std::isfinite(cfg.eps)) {
    throw Error(ErrorKind::ConfigInvalid, "eps must be positive");
  }
  for (const auto & name : cfg.scores) {
    if (!is_known_score(name)) {
      throw Error(ErrorKind::UnknownName, "unknown score '" + name + "'");
    }
  }
  for (const auto & name : cfg.metrics) {
    if (!is_known_metric(name)) {
      throw Error(ErrorKind::UnknownName, "unknown metric '" + name + "'");
    }
  }
}

std::vector<Sample> simulate(const RunConfig & cfg)
{
  auto samples = generate_dataset(cfg.sim);
  if (cfg.ood_samples > 0) {
    SimConfig shifted = cfg.sim;
    shifted.ood = true;
    shifted.n_samples = cfg.ood_samples;
    shifted.seed = mix64(cfg.sim.seed, ood_stream);
    auto extra = generate_dataset(shifted);
    samples.insert(samples.end(), extra.begin(), extra.end());
  }
  return samples;
}

PipelineOutput run_pipeline(const RunConfig & cfg)
{
  validate_run_config(cfg);
  PipelineOutput out;
  out.samples = simulate(cfg);
  const auto models = make_ensemble(cfg.k, cfg.sim.seed, cfg.sim);
  out.preds = predict_dataset(models, out.samples, cfg.sim.rate_hz, cfg.threads);
  out.scores =
    score_dataset(out.samples, out.preds, cfg.eps, cfg.sim.seed, cfg.scores, cfg.metrics, cfg.threads);
  if (!cfg.samples_out.empty()) {
    write_samples(cfg.samples_out, out.samples);
  }
  if (!cfg.preds_out.empty()) {
    write_predictions(cfg.preds_out, out.preds);
  }
  if (!cfg.scores_out.empty()) {
    write_scores(cfg.scores_out, out.scores);
  }
  return out;
}

}  // namespace uqfd
