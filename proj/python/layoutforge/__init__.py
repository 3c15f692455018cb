"""Python interface to the layoutforge core.

Specs, layouts and tasks may be passed as JSON text or as already decoded
dicts; layouts come back decoded.
"""

import json

from . import _core
from ._core import (
    Box,
    Extent,
    Pose,
    SpecError,
    measure_collision,
    measure_distance,
    measure_proximity,
    metropolis_accept,
)

__all__ = [
    "Box",
    "Extent",
    "Pose",
    "SpecError",
    "forge_lookup",
    "forge_run",
    "measure_collision",
    "measure_distance",
    "measure_proximity",
    "metropolis_accept",
    "normalize_spec",
    "oracle",
    "render_svg",
    "solve",
    "trajectory",
]


def _text(doc):
    return doc if isinstance(doc, str) else json.dumps(doc)


def normalize_spec(spec):
    """Spec with every default filled in."""
    return json.loads(_core.normalize_spec(_text(spec)))


def solve(spec, seed=None, max_evals=None, restarts=None, full_6dof=False, grid_step=None):
    """Anneal every level of the scene; `grid_step` restricts poses to a grid."""
    return json.loads(_core.solve(_text(spec), seed, max_evals, restarts, full_6dof, grid_step))


def oracle(spec, grid_step=0.25):
    """Exhaustive grid search, only for small instances."""
    return json.loads(_core.oracle(_text(spec), grid_step))


def render_svg(layout):
    return _core.render_svg(_text(layout))


def trajectory(spec, command, layout=None, fps=24.0, seed=None):
    """Keyframe track text for trajectory `command` of the spec."""
    return _core.trajectory(_text(spec), command, None if layout is None else _text(layout), fps, seed)


def forge_run(task, manual="", max_iters=8):
    return _core.forge_run(_text(task), manual, max_iters)


def forge_lookup(manual, query, top_k=3, min_score=0.2):
    return _core.forge_lookup(manual, query, top_k, min_score)
