"""Structures for the trajectory logic described as JSON.

Example::

    {
      "time": {"start": 0, "stop": 6.2832, "step": 0.01},
      "states": {"start": -1, "stop": 1, "step": 0.001},
      "trajectory": {"kind": "sin"},
      "predicates": {"P": {"coord": 0, "op": ">", "value": 0}},
      "match_tol": 0.0005
    }

``time`` and ``states`` are either explicit lists or grid specs. Trajectory
kinds: sin, cos, rotation (theta, start), logistic (x0; integer times),
tabulated (values aligned with the time grid).
"""

from __future__ import annotations

import math
import operator

from . import maps
from .logic.semantics import Structure, grid

_OPS = {">": operator.gt, ">=": operator.ge, "<": operator.lt, "<=": operator.le, "==": operator.eq, "!=": operator.ne}
_KEYS = {"time", "states", "trajectory", "predicates", "match_tol", "label"}


class StructureSpecError(ValueError):
    pass


def _domain(spec, what: str) -> list:
    if isinstance(spec, list):
        return spec
    if isinstance(spec, dict) and set(spec) == {"start", "stop", "step"}:
        if not spec["step"] > 0:
            raise StructureSpecError(f"{what}: step must be positive")
        return [round(v, 12) for v in grid(float(spec["start"]), float(spec["stop"]), float(spec["step"]))]
    raise StructureSpecError(f"{what} must be a list or {{start, stop, step}}")


def _trajectory(spec: dict, times: list[float]):
    kind = spec.get("kind")
    if kind == "sin":
        return math.sin
    if kind == "cos":
        return math.cos
    if kind == "rotation":
        theta, start = float(spec.get("theta", maps.GOLDEN)), float(spec.get("start", 0.0))
        return lambda t: (start + float(maps.frac_product(t, theta))) % 1.0
    if kind == "logistic":
        if any(t != int(t) or t < 0 for t in times):
            raise StructureSpecError("logistic trajectory needs non-negative integer times")
        orbit = maps.logistic_orbit(float(spec.get("x0", 0.3)), int(max(times, default=0)) + 1)
        return lambda t: orbit[int(t)]
    if kind == "tabulated":
        values = spec.get("values")
        if not isinstance(values, list) or len(values) != len(times):
            raise StructureSpecError("tabulated trajectory needs one value per time")
        table = dict(zip(times, values))
        return lambda t: table[t]
    raise StructureSpecError(f"unknown trajectory kind {kind!r}")


def _predicate(name: str, spec: dict):
    try:
        coord, op, value = int(spec.get("coord", 0)), _OPS[spec["op"]], float(spec["value"])
    except KeyError as e:
        raise StructureSpecError(f"predicate {name!r} needs op in {sorted(_OPS)} and a value") from e
    return lambda s: op(s.coords[coord], value)


def structure_from_json(doc: dict) -> Structure:
    if not isinstance(doc, dict):
        raise StructureSpecError("structure description must be a JSON object")
    unknown = set(doc) - _KEYS
    if unknown:
        raise StructureSpecError(f"unknown structure key(s): {', '.join(sorted(unknown))}")
    for key in ("time", "states", "trajectory"):
        if key not in doc:
            raise StructureSpecError(f"missing {key!r}")
    times = [float(t) for t in _domain(doc["time"], "time")]
    states = _domain(doc["states"], "states")
    preds = {n: _predicate(n, s) for n, s in (doc.get("predicates") or {}).items()}
    return Structure(
        times,
        states,
        _trajectory(doc["trajectory"], times),
        preds,
        float(doc.get("match_tol", 0.0)),
        label=doc.get("label", "sampled semantics"),
    )
