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
#include "uqfd/eval.hpp"
#include "uqfd/io.hpp"
#include "uqfd/pipeline.hpp"
#include "uqfd/uq_class.hpp"
#include "uqfd/uq_traj.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;

namespace
{

using namespace uqfd;

ProbMatrix to_matrix(const std::vector<std::vector<double>> & rows)
{
  std::vector<ProbVector> out;
  out.reserve(rows.size());
  for (const auto & r : rows) {
    out.push_back(ProbVector::validate(r));
  }
  return ProbMatrix(std::move(out));
}

py::dict to_dict(const ClassScores & s)
{
  py::dict d;
  d["te"] = s.te;
  d["de"] = s.de;
  d["mi"] = s.mi;
  d["nmap"] = s.nmap;
  if (s.u) {
    d["u"] = *s.u;
  }
  return d;
}

TrajGroup to_group(const std::vector<std::vector<std::pair<double, double>>> & trajs)
{
  TrajGroup g;
  for (const auto & t : trajs) {
    std::vector<Point2> pts;
    for (const auto & [x, y] : t) {
      pts.push_back({x, y});
    }
    g.trajs.emplace_back(std::move(pts));
  }
  return g;
}

std::vector<LabeledScore> to_items(
  const std::vector<double> & scores, const std::vector<double> & targets,
  const std::optional<std::vector<std::string>> & ids)
{
  if (scores.size() != targets.size() || (ids && ids->size() != scores.size())) {
    throw Error(ErrorKind::ShapeMismatch, "scores, targets and ids differ in length");
  }
  std::vector<LabeledScore> items(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%012zu", i);
    items[i] = {ids ? (*ids)[i] : std::string(buf), scores[i], targets[i]};
  }
  return items;
}

CurveKind to_kind(const std::string & name)
{
  if (name == "accuracy_up") {
    return CurveKind::AccuracyUp;
  }
  if (name == "error_down") {
    return CurveKind::ErrorDown;
  }
  throw Error(ErrorKind::UnknownName, "curve kind must be accuracy_up or error_down");
}

py::dict report_dict(const DetectionReport & r)
{
  py::dict d;
  d["auroc"] = r.auroc ? py::object(py::float_(*r.auroc)) : py::object(py::none());
  d["aucoc_uncertainty"] = r.aucoc_uncertainty;
  d["aucoc_optimal"] = r.aucoc_optimal;
  d["aucoc_random"] = r.aucoc_random;
  d["ir"] = r.ir;
  d["n"] = r.n;
  return d;
}

py::dict record_dict(const ScoreRecord & r)
{
  py::dict d;
  d["sample_id"] = r.sample_id;
  d["split"] = r.split;
  d["gt_maneuver"] = r.gt_maneuver;
  d["predicted_maneuver"] = r.predicted_maneuver;
  d["is_misclassified"] = r.is_misclassified;
  d["scores"] = r.scores;
  d["metrics"] = r.metrics;
  return d;
}

}  // namespace

PYBIND11_MODULE(uqfd, m)
{
  m.doc() = "Uncertainty scores and failure-detection evaluation for multimodal motion prediction";

  static py::exception<Error> error(m, "UqfdError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) {
        std::rethrow_exception(p);
      }
    } catch (const Error & e) {
      py::set_error(error, e.what());
    }
  });

  m.def("entropy", [](const std::vector<double> & p) { return entropy(ProbVector::validate(p)); },
        py::arg("probs"));
  m.def(
    "class_scores",
    [](const std::vector<std::vector<double>> & rows) {
      return to_dict(ensemble_class_scores(to_matrix(rows)));
    },
    py::arg("probs"), "TE, DE, MI and NMaP of a K x Z member probability matrix.");
  m.def(
    "edl_scores",
    [](const std::vector<double> & evidence) {
      return to_dict(edl_scores(edl_alpha(EvidenceVector::validate(evidence))));
    },
    py::arg("evidence"));
  m.def("digamma", &digamma, py::arg("x"));

  m.def(
    "ape",
    [](const std::vector<std::vector<std::pair<double, double>>> & trajs, double eps) {
      return ape(to_group(trajs), eps);
    },
    py::arg("trajectories"), py::arg("eps") = default_cov_eps);
  m.def(
    "fpe",
    [](const std::vector<std::vector<std::pair<double, double>>> & trajs, double eps) {
      return fpe(to_group(trajs), eps);
    },
    py::arg("trajectories"), py::arg("eps") = default_cov_eps);
  m.def(
    "unified_cluster",
    [](const std::vector<std::vector<std::pair<double, double>>> & trajs, std::size_t k,
       std::uint64_t seed) {
      const auto r = unified_cluster(to_group(trajs).trajs, k, seed);
      py::dict d;
      d["assignments"] = r.assignments;
      d["cost_history"] = r.cost_history;
      d["iterations"] = r.iterations;
      return d;
    },
    py::arg("trajectories"), py::arg("num_clusters"), py::arg("seed") = 0);

  m.def(
    "auroc",
    [](const std::vector<double> & scores, const std::vector<double> & targets) {
      return auroc(to_items(scores, targets, std::nullopt));
    },
    py::arg("scores"), py::arg("targets"),
    "Failure detection AUROC; a target below 0.5 marks a failure.");
  m.def(
    "cutoff_curve",
    [](const std::vector<double> & scores, const std::vector<double> & targets,
       const std::string & kind, const std::optional<std::vector<std::string>> & ids) {
      const auto c = cutoff_curve(to_items(scores, targets, ids), to_kind(kind));
      std::vector<double> q;
      std::vector<double> v;
      for (const auto & p : c.points) {
        q.push_back(p.q);
        v.push_back(p.v);
      }
      py::dict d;
      d["q"] = q;
      d["value"] = v;
      d["aucoc"] = c.aucoc;
      return d;
    },
    py::arg("scores"), py::arg("targets"), py::arg("kind") = "error_down",
    py::arg("ids") = py::none());
  m.def("improvement_ratio", &improvement_ratio, py::arg("aucoc_uncertainty"),
        py::arg("aucoc_optimal"), py::arg("aucoc_random"));
  m.def(
    "evaluate",
    [](const std::vector<double> & scores, const std::vector<double> & targets,
       const std::string & kind) {
      return report_dict(evaluate_detection(to_items(scores, targets, std::nullopt), to_kind(kind)).report);
    },
    py::arg("scores"), py::arg("targets"), py::arg("kind"));

  m.def(
    "run_pipeline",
    [](std::size_t n_samples, std::uint64_t seed, std::size_t k, std::size_t ood_samples,
       double obs_noise_sigma) {
      RunConfig cfg;
      cfg.sim.n_samples = n_samples;
      cfg.sim.seed = seed;
      cfg.sim.obs_noise_sigma = obs_noise_sigma;
      cfg.k = k;
      cfg.ood_samples = ood_samples;
      std::vector<ScoreRecord> records;
      {
        py::gil_scoped_release release;
        records = run_pipeline(cfg).scores;
      }
      py::list out;
      for (const auto & r : records) {
        out.append(record_dict(r));
      }
      return out;
    },
    py::arg("n_samples") = 1000, py::arg("seed") = 42, py::arg("k") = 5, py::arg("ood_samples") = 0,
    py::arg("obs_noise_sigma") = 0.15, "Simulate, predict and score; returns one dict per sample.");
  m.def(
    "read_scores",
    [](const std::string & path) {
      py::list out;
      for (const auto & r : read_scores(std::filesystem::path(path))) {
        out.append(record_dict(r));
      }
      return out;
    },
    py::arg("path"));
  m.def(
    "cli",
    [](const std::vector<std::string> & args) {
      std::ostringstream out;
      std::ostringstream err;
      const int code = run_cli(args, out, err);
      return py::make_tuple(code, out.str(), err.str());
    },
    py::arg("args"), "Runs the command line front end; returns (exit code, stdout, stderr).");
}
