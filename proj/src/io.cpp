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

#include "uqfd/io.hpp"

#include "json.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <tuple>

namespace uqfd
{
namespace
{

using nlohmann::json;

std::string quote(std::string_view s)
{
  return json(std::string(s)).dump();
}

void append_number(std::string & out, double value)
{
  if (!std::isfinite(value)) {
    throw Error(ErrorKind::NonFinite, "cannot serialize a non-finite number");
  }
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::general, 17);
  out.append(buf, res.ptr);
}

void append_numbers(std::string & out, std::span<const double> values)
{
  out += '[';
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) {
      out += ',';
    }
    append_number(out, values[i]);
  }
  out += ']';
}

void append_trajectory(std::string & out, const Trajectory & traj)
{
  out += '[';
  for (std::size_t i = 0; i < traj.size(); ++i) {
    if (i) {
      out += ',';
    }
    out += '[';
    append_number(out, traj[i].x);
    out += ',';
    append_number(out, traj[i].y);
    out += ']';
  }
  out += ']';
}

void append_named_numbers(std::string & out, const std::map<std::string, double> & values)
{
  out += '{';
  bool first = true;
  for (const auto & [name, value] : values) {
    if (!first) {
      out += ',';
    }
    first = false;
    out += quote(name);
    out += ':';
    append_number(out, value);
  }
  out += '}';
}

std::string line_prefix(std::size_t line)
{
  return "line " + std::to_string(line) + ": ";
}

/// Calls parse(record_json, line_number) for every record line.
template <typename Fn>
void for_each_record(std::istream & in, Fn && parse)
{
  std::string line;
  std::size_t line_no = 0;
  bool seen_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (line.find_first_not_of(" \t") == std::string::npos) {
      continue;
    }
    if (line == format_header) {
      seen_header = true;
      continue;
    }
    if (line.front() == '#') {
      throw Error(ErrorKind::SchemaViolation, line_prefix(line_no) + "unsupported header " + line);
    }
    if (!seen_header) {
      throw Error(
        ErrorKind::SchemaViolation,
        line_prefix(line_no) + "missing " + std::string(format_header) + " header");
    }
    json record;
    try {
      record = json::parse(line);
    } catch (const json::parse_error & e) {
      throw Error(ErrorKind::Parse, line_prefix(line_no) + e.what());
    }
    try {
      if (!record.is_object()) {
        throw Error(ErrorKind::SchemaViolation, "record is not an object");
      }
      parse(record, line_no);
    } catch (const json::exception & e) {
      throw Error(ErrorKind::SchemaViolation, line_prefix(line_no) + e.what());
    } catch (const Error & e) {
      if (std::string_view(e.what()).find("line ") != std::string_view::npos) {
        throw;
      }
      throw Error(e.kind(), line_prefix(line_no) + e.what());
    }
  }
  if (in.bad()) {
    throw Error(ErrorKind::Io, "read failure");
  }
}

std::size_t get_index(const json & j, const char * key)
{
  const auto & v = j.at(key);
  if (!v.is_number_unsigned()) {
    throw Error(ErrorKind::SchemaViolation, std::string(key) + " must be a nonnegative integer");
  }
  return v.get<std::size_t>();
}

double get_number(const json & v)
{
  if (!v.is_number()) {
    throw Error(ErrorKind::SchemaViolation, "expected a number");
  }
  return v.get<double>();
}

std::vector<double> get_numbers(const json & v)
{
  if (!v.is_array()) {
    throw Error(ErrorKind::SchemaViolation, "expected an array of numbers");
  }
  std::vector<double> out;
  out.reserve(v.size());
  for (const auto & e : v) {
    out.push_back(get_number(e));
  }
  return out;
}

Trajectory get_trajectory(const json & v)
{
  if (!v.is_array() || v.empty()) {
    throw Error(ErrorKind::SchemaViolation, "trajectory must be a nonempty array");
  }
  std::vector<Point2> pts;
  pts.reserve(v.size());
  for (const auto & row : v) {
    const auto xy = get_numbers(row);
    if (xy.size() != 2) {
      throw Error(ErrorKind::SchemaViolation, "trajectory points need [x, y]");
    }
    pts.push_back({xy[0], xy[1]});
  }
  return Trajectory(std::move(pts));
}

std::map<std::string, double> get_named_numbers(const json & v)
{
  if (!v.is_object()) {
    throw Error(ErrorKind::SchemaViolation, "expected an object of numbers");
  }
  std::map<std::string, double> out;
  for (const auto & [name, value] : v.items()) {
    out[name] = get_number(value);
  }
  return out;
}

std::ofstream open_out(const std::filesystem::path & path)
{
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(ErrorKind::Io, "cannot open " + path.string() + " for writing");
  }
  return out;
}

std::ifstream open_in(const std::filesystem::path & path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorKind::Io, "cannot open " + path.string());
  }
  return in;
}

void finish(std::ostream & out, const std::filesystem::path & path)
{
  out.flush();
  if (!out) {
    throw Error(ErrorKind::Io, "write to " + path.string() + " failed");
  }
}

std::string csv_number(const std::optional<double> & v)
{
  std::string s;
  if (v) {
    append_number(s, *v);
  }
  return s;
}

}  // namespace

std::string format_number(double value)
{
  std::string s;
  append_number(s, value);
  return s;
}

// ---------------------------------------------------------------------------- samples

void write_samples(std::ostream & out, std::span<const Sample> samples)
{
  out << format_header << '\n';
  std::string line;
  for (const auto & s : samples) {
    line.clear();
    line += "{\"id\":" + quote(s.id);
    line += ",\"split\":" + quote(s.split);
    line += ",\"gt_maneuver\":" + std::to_string(s.gt_maneuver);
    line += ",\"history\":[";
    for (std::size_t j = 0; j < s.history.size(); ++j) {
      if (j) {
        line += ',';
      }
      const auto & h = s.history[j];
      const double row[4] = {h.x, h.y, h.heading, h.speed};
      append_numbers(line, row);
    }
    line += "],\"gt_future\":";
    append_trajectory(line, s.gt_future);
    line += "}\n";
    out << line;
  }
}

std::vector<Sample> read_samples(std::istream & in)
{
  std::vector<Sample> samples;
  for_each_record(in, [&](const json & j, std::size_t) {
    Sample s;
    s.id = j.at("id").get<std::string>();
    s.split = j.at("split").get<std::string>();
    s.gt_maneuver = get_index(j, "gt_maneuver");
    const auto & hist = j.at("history");
    if (!hist.is_array()) {
      throw Error(ErrorKind::SchemaViolation, "history must be an array");
    }
    for (const auto & row : hist) {
      const auto v = get_numbers(row);
      if (v.size() != 4) {
        throw Error(ErrorKind::SchemaViolation, "history rows need [x, y, heading, speed]");
      }
      s.history.push_back({v[0], v[1], v[2], v[3]});
    }
    s.gt_future = get_trajectory(j.at("gt_future"));
    validate_sample(s);
    samples.push_back(std::move(s));
  });
  return samples;
}

void write_samples(const std::filesystem::path & path, std::span<const Sample> samples)
{
  auto out = open_out(path);
  write_samples(out, samples);
  finish(out, path);
}

std::vector<Sample> read_samples(const std::filesystem::path & path)
{
  auto in = open_in(path);
  return read_samples(in);
}

// ---------------------------------------------------------------------------- predictions

void write_predictions(std::ostream & out, std::span<const EnsembleOutput> preds)
{
  out << format_header << '\n';
  std::string line;
  for (const auto & e : preds) {
    line.clear();
    line += "{\"sample_id\":" + quote(e.sample_id) + ",\"members\":[";
    for (std::size_t k = 0; k < e.members.size(); ++k) {
      const auto & m = e.members[k];
      if (k) {
        line += ',';
      }
      line += "{\"mode_probs\":";
      append_numbers(line, m.mode_probs.values());
      line += ",\"mode_trajectories\":[";
      for (std::size_t z = 0; z < m.mode_trajectories.size(); ++z) {
        if (z) {
          line += ',';
        }
        append_trajectory(line, m.mode_trajectories[z]);
      }
      line += ']';
      if (m.evidence) {
        line += ",\"evidence\":";
        append_numbers(line, *m.evidence);
      }
      line += '}';
    }
    line += "]}\n";
    out << line;
  }
}

std::vector<EnsembleOutput> read_predictions(std::istream & in)
{
  std::vector<EnsembleOutput> preds;
  std::optional<std::tuple<std::size_t, std::size_t, std::size_t>> shape;
  for_each_record(in, [&](const json & j, std::size_t) {
    EnsembleOutput e;
    e.sample_id = j.at("sample_id").get<std::string>();
    const auto & members = j.at("members");
    if (!members.is_array() || members.empty()) {
      throw Error(ErrorKind::SchemaViolation, "members must be a nonempty array");
    }
    for (const auto & mj : members) {
      const auto probs = get_numbers(mj.at("mode_probs"));
      const auto & tj = mj.at("mode_trajectories");
      if (!tj.is_array() || tj.empty()) {
        throw Error(ErrorKind::SchemaViolation, "mode_trajectories must be a nonempty array");
      }
      std::vector<Trajectory> trajs;
      for (const auto & t : tj) {
        trajs.push_back(get_trajectory(t));
      }
      std::optional<std::vector<double>> evidence;
      if (mj.contains("evidence")) {
        evidence = get_numbers(mj.at("evidence"));
      }
      e.members.push_back(
        ModelOutput{e.sample_id, ProbVector::validate(probs), std::move(trajs), evidence});
    }
    try {
      validate_ensemble_output(e);
    } catch (const Error & err) {
      throw Error(ErrorKind::SchemaViolation, err.what());
    }
    const auto this_shape = std::make_tuple(e.num_members(), e.num_modes(), e.horizon());
    if (shape && *shape != this_shape) {
      throw Error(
        ErrorKind::SchemaViolation, "K/Z/t_f differ from earlier lines (K=" +
                                      std::to_string(e.num_members()) + ")");
    }
    shape = this_shape;
    preds.push_back(std::move(e));
  });
  return preds;
}

void write_predictions(const std::filesystem::path & path, std::span<const EnsembleOutput> preds)
{
  auto out = open_out(path);
  write_predictions(out, preds);
  finish(out, path);
}

std::vector<EnsembleOutput> read_predictions(const std::filesystem::path & path)
{
  auto in = open_in(path);
  return read_predictions(in);
}

// ---------------------------------------------------------------------------- scores

void write_scores(std::ostream & out, std::span<const ScoreRecord> records)
{
  out << format_header << '\n';
  std::string line;
  for (const auto & r : records) {
    line.clear();
    line += "{\"sample_id\":" + quote(r.sample_id);
    line += ",\"split\":" + quote(r.split);
    line += ",\"gt_maneuver\":" + std::to_string(r.gt_maneuver);
    line += ",\"predicted_maneuver\":" + std::to_string(r.predicted_maneuver);
    line += ",\"is_misclassified\":";
    line += r.is_misclassified ? "true" : "false";
    line += ",\"scores\":";
    append_named_numbers(line, r.scores);
    line += ",\"metrics\":";
    append_named_numbers(line, r.metrics);
    line += "}\n";
    out << line;
  }
}

std::vector<ScoreRecord> read_scores(std::istream & in)
{
  std::vector<ScoreRecord> records;
  for_each_record(in, [&](const json & j, std::size_t) {
    ScoreRecord r;
    r.sample_id = j.at("sample_id").get<std::string>();
    r.split = j.at("split").get<std::string>();
    r.gt_maneuver = get_index(j, "gt_maneuver");
    r.predicted_maneuver = get_index(j, "predicted_maneuver");
    r.is_misclassified = j.at("is_misclassified").get<bool>();
    r.scores = get_named_numbers(j.at("scores"));
    r.metrics = get_named_numbers(j.at("metrics"));
    records.push_back(std::move(r));
  });
  return records;
}

void write_scores(const std::filesystem::path & path, std::span<const ScoreRecord> records)
{
  auto out = open_out(path);
  write_scores(out, records);
  finish(out, path);
}

std::vector<ScoreRecord> read_scores(const std::filesystem::path & path)
{
  auto in = open_in(path);
  return read_scores(in);
}

// ---------------------------------------------------------------------------- reports

void write_report(std::ostream & out, const ReportFile & r)
{
  const auto & d = r.report;
  std::string s = "{\n";
  s += "  \"task\": " + quote(r.task) + ",\n";
  s += "  \"score_name\": " + quote(r.score_name) + ",\n";
  s += "  \"metric_name\": " + quote(r.metric_name) + ",\n";
  s += "  \"split\": " + quote(r.split) + ",\n";
  s += "  \"n\": " + std::to_string(d.n) + ",\n";
  s += "  \"auroc\": " + (d.auroc ? format_number(*d.auroc) : std::string("null")) + ",\n";
  s += "  \"aucoc_uncertainty\": " + format_number(d.aucoc_uncertainty) + ",\n";
  s += "  \"aucoc_optimal\": " + format_number(d.aucoc_optimal) + ",\n";
  s += "  \"aucoc_random\": " + format_number(d.aucoc_random) + ",\n";
  s += "  \"ir\": " + format_number(d.ir) + "\n";
  s += "}\n";
  out << s;
}

ReportFile read_report(std::istream & in)
{
  std::stringstream buf;
  buf << in.rdbuf();
  json j;
  try {
    j = json::parse(buf.str());
  } catch (const json::parse_error & e) {
    throw Error(ErrorKind::Parse, e.what());
  }
  try {
    ReportFile r;
    r.task = j.at("task").get<std::string>();
    r.score_name = j.at("score_name").get<std::string>();
    r.metric_name = j.at("metric_name").get<std::string>();
    r.split = j.value("split", std::string{});
    r.report.n = get_index(j, "n");
    if (!j.at("auroc").is_null()) {
      r.report.auroc = get_number(j.at("auroc"));
    }
    r.report.aucoc_uncertainty = get_number(j.at("aucoc_uncertainty"));
    r.report.aucoc_optimal = get_number(j.at("aucoc_optimal"));
    r.report.aucoc_random = get_number(j.at("aucoc_random"));
    r.report.ir = get_number(j.at("ir"));
    return r;
  } catch (const json::exception & e) {
    throw Error(ErrorKind::SchemaViolation, e.what());
  }
}

void write_report(const std::filesystem::path & path, const ReportFile & report)
{
  auto out = open_out(path);
  write_report(out, report);
  finish(out, path);
}

ReportFile read_report(const std::filesystem::path & path)
{
  auto in = open_in(path);
  try {
    return read_report(in);
  } catch (const Error & e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------- csv

void write_curves_csv(std::ostream & out, const EvaluationResult & result)
{
  std::string s = "q,value,curve\n";
  auto emit = [&](const CutoffCurve & curve, const char * label) {
    for (const auto & p : curve.points) {
      append_number(s, p.q);
      s += ',';
      append_number(s, p.v);
      s += ',';
      s += label;
      s += '\n';
    }
  };
  emit(result.uncertainty, "uncertainty");
  emit(result.baselines.optimal, "optimal");
  emit(result.baselines.random, "random");
  out << s;
}

void write_histogram_csv(std::ostream & out, std::span<const HistogramBin> bins)
{
  std::string s = "bin_lo,bin_hi,count,class\n";
  for (const char * label : {"correct", "misclassified"}) {
    const bool correct = std::string_view(label) == "correct";
    for (const auto & b : bins) {
      append_number(s, b.lo);
      s += ',';
      append_number(s, b.hi);
      s += ',';
      s += std::to_string(correct ? b.correct : b.failure);
      s += ',';
      s += label;
      s += '\n';
    }
  }
  out << s;
}

void write_summary_csv(std::ostream & out, std::span<const ReportFile> reports)
{
  using Key = std::tuple<std::string, std::string, std::string>;
  std::vector<Key> keys;
  for (const auto & r : reports) {
    const Key key{r.task, r.metric_name, r.split};
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      keys.push_back(key);
    }
  }

  std::string s = "task,metric,split,row,n,auroc,aucoc,ir\n";
  auto row = [&](
               const ReportFile & r, const std::string & name, std::optional<double> auroc,
               double aucoc, double ir) {
    s += r.task + ',' + r.metric_name + ',' + r.split + ',' + name + ',' +
         std::to_string(r.report.n) + ',' + csv_number(auroc) + ',';
    append_number(s, aucoc);
    s += ',';
    append_number(s, ir);
    s += '\n';
  };
  for (const auto & key : keys) {
    const ReportFile * first = nullptr;
    for (const auto & r : reports) {
      if (Key{r.task, r.metric_name, r.split} == key) {
        first = &r;
        break;
      }
    }
    const auto & d = first->report;
    row(
      *first, "optimal", std::nullopt, d.aucoc_optimal,
      improvement_ratio(d.aucoc_optimal, d.aucoc_optimal, d.aucoc_random));
    row(
      *first, "random", std::nullopt, d.aucoc_random,
      improvement_ratio(d.aucoc_random, d.aucoc_optimal, d.aucoc_random));
    for (const auto & r : reports) {
      if (Key{r.task, r.metric_name, r.split} == key) {
        row(r, r.score_name, r.report.auroc, r.report.aucoc_uncertainty, r.report.ir);
      }
    }
  }
  out << s;
}

void write_split_means_csv(
  std::ostream & out, const std::map<std::string, std::map<std::string, double>> & means)
{
  std::string s = "split,score,mean\n";
  for (const auto & [split, by_name] : means) {
    for (const auto & [name, value] : by_name) {
      s += split + ',' + name + ',';
      append_number(s, value);
      s += '\n';
    }
  }
  out << s;
}

std::string read_text_file(const std::filesystem::path & path)
{
  auto in = open_in(path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::filesystem::path & path, std::string_view text)
{
  auto out = open_out(path);
  out << text;
  finish(out, path);
}

}  // namespace uqfd
