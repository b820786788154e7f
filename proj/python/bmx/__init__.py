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
"""Python access to the bimodal exploration planner."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from typing import Any, Optional, Sequence

from . import _bmx
from ._bmx import SceneError

__all__ = [
    "SceneError",
    "RunResult",
    "builtin_scene",
    "scene_info",
    "run",
    "classify_log",
    "solve_tour",
    "greedy_cover",
    "time_cost",
    "energy_cost",
    "plan",
    "run_experiment",
    "aggregate_directory",
]


@dataclass
class RunResult:
    summary: dict
    csv: str
    trace: list
    timing: dict

    def records(self) -> list[dict]:
        rows = []
        for r in csv.DictReader(io.StringIO(self.csv)):
            rows.append({k: (v if k == "modality" else (int(v) if k == "cycle" else float(v))) for k, v in r.items()})
        return rows


def builtin_scene(name: str, energy: Optional[float] = None, time: Optional[float] = None) -> str:
    """Scene text for "office", "corridor", "two_level" or "room"."""
    return _bmx.builtin_scene(name, energy, time)


def scene_info(text: str) -> dict:
    return json.loads(_bmx.scene_info(text))


def run(
    scene_text: str,
    overrides: Optional[dict] = None,
    energy: Optional[float] = None,
    time: Optional[float] = None,
    iterations: Optional[int] = None,
    seed: int = 0,
) -> RunResult:
    s, log, trace, timing = _bmx.run(
        scene_text, json.dumps(overrides) if overrides else "", energy, time, iterations, seed
    )
    return RunResult(json.loads(s), log, json.loads(trace), json.loads(timing))


def classify_log(csv_text: str, home: Sequence[float]) -> str:
    return _bmx.classify_log(csv_text, tuple(home))


def solve_tour(
    anchor_to_group: Sequence[float],
    group_to_group: Sequence[Sequence[float]],
    group_to_home: Sequence[float],
    anchor_to_home: float,
    exact_limit: int = 12,
    seed: int = 0,
    restarts: int = 6,
) -> dict:
    """Grouped tour from the anchor through every reachable group to home.

    Unreachable legs are ``math.inf``.
    """
    g2g = [[math.inf if v is None else float(v) for v in row] for row in group_to_group]
    order, skipped, total, exact = _bmx.solve_tour(
        list(anchor_to_group), g2g, list(group_to_home), anchor_to_home, exact_limit, seed, restarts
    )
    return {"order": order, "skipped": skipped, "total_time": total, "exact": exact}


def greedy_cover(
    sets: Sequence[Sequence[int]],
    positions: Sequence[Sequence[float]],
    target: Sequence[int],
    centroid: Sequence[float] = (0.0, 0.0, 0.0),
) -> list[int]:
    return list(_bmx.greedy_cover([list(s) for s in sets], [tuple(p) for p in positions], list(target), tuple(centroid)))


def time_cost(start: Sequence[float], goal: Sequence[float], mode: str, costs: Optional[dict] = None) -> float:
    """Straight-line time between (x, y, z, yaw) poses; mode is "T", "A" or "avg"."""
    return _bmx.time_cost(tuple(start), tuple(goal), mode, json.dumps(costs) if costs else "")


def energy_cost(start: Sequence[float], goal: Sequence[float], mode: str, costs: Optional[dict] = None) -> float:
    return _bmx.energy_cost(tuple(start), tuple(goal), mode, json.dumps(costs) if costs else "")


def plan(problem: dict[str, Any], iterations: int = 2000, seed: int = 0, child_distance: float = 3.0) -> dict:
    """One search over explicit candidates; see the README for the problem layout."""
    return json.loads(_bmx.plan(json.dumps(problem), iterations, seed, child_distance))


def run_experiment(spec: dict, base_dir: str = "") -> int:
    return _bmx.run_experiment(json.dumps(spec), base_dir)


def aggregate_directory(directory: str) -> list[dict]:
    return json.loads(_bmx.aggregate_directory(directory))
