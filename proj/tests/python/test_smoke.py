import json
import math
import os
from pathlib import Path

import pytest

import layoutforge as lf

DATA = Path(os.environ.get("LAYOUTFORGE_TEST_DATA", Path(__file__).resolve().parents[1]))


def fixture(name):
    return (DATA / "fixtures" / name).read_text()


def test_normalize_fills_defaults():
    spec = lf.normalize_spec(fixture("minimal.json"))
    assert spec["version"] == 1
    assert spec["solver"]["alpha"] == 0.95
    assert spec["auto_rules"]["collision"] is True


def test_spec_errors_carry_the_field_path():
    bad = json.loads(fixture("minimal.json"))
    bad["terms"] = [{"kind": "distance", "participants": ["table", "ghost"]}]
    with pytest.raises(lf.SpecError, match="/terms/0/participants/1"):
        lf.solve(bad)
    with pytest.raises(ValueError):
        lf.normalize_spec("{")


def test_solve_is_deterministic_and_feasible():
    a = lf.solve(fixture("two_objects.json"), max_evals=3000, restarts=1)
    b = lf.solve(json.loads(fixture("two_objects.json")), max_evals=3000, restarts=1)
    assert a == b
    assert a["feasible"]
    assert {o["id"] for o in a["objects"]} == {"desk", "chair"}


def test_overconstrained_reports_infeasible():
    layout = lf.solve(fixture("overconstrained.json"))
    assert not layout["feasible"]


def test_oracle_matches_snapped_solver():
    spec = fixture("two_objects.json")
    exact = lf.oracle(spec, grid_step=0.25)
    snapped = lf.solve(spec, grid_step=0.25, restarts=5)
    assert exact["levels"][0]["objective"] == pytest.approx(snapped["levels"][0]["objective"], abs=1e-9)


def test_svg_and_trajectory_match_golden_files():
    layout = json.loads((DATA / "golden" / "living_room_layout.json").read_text())
    assert lf.render_svg(layout) == (DATA / "golden" / "living_room.svg").read_text()
    track = lf.trajectory(fixture("orbit_scene.json"), 0)
    assert track == (DATA / "golden" / "orbit_track.txt").read_text()
    with pytest.raises(IndexError):
        lf.trajectory(fixture("orbit_scene.json"), 9)


def test_measures_and_acceptance_rule():
    a = lf.Box(lf.Pose(0, 0, 0.5), lf.Extent(1, 1, 1))
    b = lf.Box(lf.Pose(3, 0, 0.5, yaw=math.pi / 2), lf.Extent(1, 1, 1))
    assert lf.measure_distance(a, b) == pytest.approx(2.0)
    assert lf.measure_collision(a, b) == 0.0
    c = lf.Box(lf.Pose(0.5, 0, 0.5), lf.Extent(1, 1, 1))
    assert lf.measure_collision(a, c) == pytest.approx(0.5)
    assert lf.metropolis_accept(-1.0, 1.0, 0.999)
    assert not lf.metropolis_accept(1.0, 1.0, 0.5)


def test_forge_loop_round_trip():
    task = {
        "version": 1,
        "text": "a five legged table",
        "spec": [{"field": "leg_count", "op": "equals", "value": 5}],
        "generator": {
            "kind": "enumerate",
            "parameter": "leg_count",
            "values": [3, 4, 5],
            "base": {
                "category": "table",
                "params": {"top_dx": 1.2, "top_dy": 0.8, "top_dz": 0.04, "leg_count": 4,
                           "leg_radius": 0.03, "height": 0.75},
            },
        },
    }
    run = lf.forge_run(task, max_iters=4)
    assert run["accepted"] and run["attempts"] == 3
    assert run["program"]["params"]["leg_count"] == 5
    hits = lf.forge_lookup(run["manual"], "five legged table")
    assert hits[0]["task"] == "a five legged table"

    task["spec"] = [{"field": "leg_count", "op": "equals", "value": 9}]
    failed = lf.forge_run(task, run["manual"], max_iters=2)
    assert not failed["accepted"] and failed["attempts"] == 2
    assert failed["manual"] == run["manual"]
