# Copyright 2026 The uqfd Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.


import math

import pytest

import uqfd


def test_class_scores_decompose():
    s = uqfd.class_scores([[0.7, 0.2, 0.1], [0.1, 0.8, 0.1]])
    assert s["te"] == pytest.approx(s["de"] + s["mi"], abs=1e-12)
    mean = [0.4, 0.5, 0.1]
    assert s["te"] == pytest.approx(-sum(p * math.log(p) for p in mean), abs=1e-12)
    assert s["nmap"] == pytest.approx(-0.5)


def test_invalid_probabilities_raise():
    with pytest.raises(uqfd.UqfdError):
        uqfd.class_scores([[0.7, 0.7]])


def test_edl_uncertainty():
    s = uqfd.edl_scores([0.0, 0.0, 0.0])
    assert s["u"] == pytest.approx(1.0)
    assert uqfd.digamma(1.0) == pytest.approx(-0.5772156649015329, abs=1e-14)


def test_ape_translation_invariant():
    trajs = [[(0.5 * i * t, 0.25 * t * t) for t in range(1, 5)] for i in range(4)]
    shifted = [[(x + 8.0, y - 4.0) for x, y in t] for t in trajs]
    assert uqfd.ape(trajs) == pytest.approx(uqfd.ape(shifted), abs=1e-12)
    assert math.isfinite(uqfd.fpe(trajs))


def test_auroc_and_cutoff():
    assert uqfd.auroc([0.1, 0.2, 0.8, 0.9], [1, 1, 0, 0]) == pytest.approx(1.0)
    c = uqfd.cutoff_curve([3.0, 2.0, 1.0], [5.0, 1.0, 1.0])
    assert c["q"][-1] == pytest.approx(1.0)
    r = uqfd.evaluate([3.0, 2.0, 1.0], [5.0, 1.0, 1.0], "error_down")
    assert r["ir"] == pytest.approx(1.0)
    assert uqfd.improvement_ratio(0.5, 0.0, 1.0) == pytest.approx(0.5)


def test_pipeline_runs():
    records = uqfd.run_pipeline(n_samples=40, seed=7, k=3, ood_samples=10)
    assert len(records) == 50
    assert {r["split"] for r in records} == {"id", "ood"}
    for r in records:
        assert r["scores"]["te"] >= r["scores"]["de"] - 1e-12


def test_cli_usage_error():
    code, _, err = uqfd.cli(["evaluate", "--bogus"])
    assert code == 2
    assert err
