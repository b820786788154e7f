# Copyright 2026 The Authors.
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

import bmx


def test_small_room_run_returns_home():
    text = bmx.builtin_scene("room", 400.0, 400.0)
    r = bmx.run(text, iterations=200, seed=1)
    s = r.summary
    assert s["status"] == "success"
    assert s["at_home"]
    assert s["E_remaining"] >= 0.0
    assert s["E_used"] + s["E_remaining"] == pytest.approx(400.0)
    rows = r.records()
    assert rows and rows[-1]["E_remaining"] == pytest.approx(s["E_remaining"], abs=1e-5)
    home = [rows[-1][k] for k in ("x", "y", "z")]
    assert bmx.classify_log(r.csv, home) == "success"


def test_runs_are_deterministic():
    text = bmx.builtin_scene("corridor")
    a = bmx.run(text, iterations=200, seed=5)
    b = bmx.run(text, iterations=200, seed=5)
    assert a.csv == b.csv


def test_scene_info_and_errors():
    info = bmx.scene_info(bmx.builtin_scene("office"))
    assert info["dims"] == [48, 20, 4]
    assert info["resolution"] == 0.5
    with pytest.raises(bmx.SceneError):
        bmx.run("not a scene")
    with pytest.raises(ValueError):
        bmx.builtin_scene("castle")


def test_two_group_tour():
    t = bmx.solve_tour([1.0, 3.0], [[math.inf, 1.0], [1.0, math.inf]], [3.0, 1.0], 5.0)
    assert t["order"] == [0, 1]
    assert t["total_time"] == pytest.approx(3.0)
    assert t["exact"]


def test_greedy_cover_prefers_larger_gain():
    picks = bmx.greedy_cover([[0, 1, 2], [0], [3]], [(0, 0, 0), (1, 0, 0), (2, 0, 0)], [0, 1, 2, 3])
    assert picks == [0, 2]


def test_costs():
    assert bmx.time_cost((0, 0, 0, 0), (2, 0, 0, 0), "A") == pytest.approx(2.0)
    assert bmx.energy_cost((0, 0, 0, 0), (2, 0, 0, 0), "A") == pytest.approx(14.0)
    assert bmx.energy_cost((0, 0, 0, 0), (2, 0, 0, 0), "T") == pytest.approx(4.0)
    with pytest.raises(ValueError):
        bmx.time_cost((0, 0, 0, 0), (1, 0, 0, 0), "X")


def test_plan_single_viewpoint():
    problem = {
        "robot": [0, 0, 0.3, 0],
        "home": [0, 0, 0.3],
        "energy": 500.0,
        "time": 500.0,
        "groups": [[2, 0, 1]],
        "candidates": [{"pose": [2, 0, 1, 0], "modality": "A", "strategy": "AS", "group": 0, "ig": 10}],
    }
    r = bmx.plan(problem, iterations=50)
    assert r["kind"] == "goal"
    assert r["goal"] == 0


def test_sweep_writes_aggregate(tmp_path):
    (tmp_path / "scene.txt").write_text(bmx.builtin_scene("room"))
    spec = {
        "scenario": "scene.txt",
        "seeds": [0, 1],
        "budgets": [[200.0, 200.0]],
        "iterations": [100],
        "out": str(tmp_path / "out"),
    }
    assert bmx.run_experiment(spec, str(tmp_path)) == 0
    table = bmx.aggregate_directory(str(tmp_path / "out"))
    assert len(table) == 1 and table[0]["runs"] == 2
