"""JSON problem files.

Schema (unknown keys are rejected)::

    {
      "mode": "interval" | "annulus",
      // annulus mode
      "N": 3, "r1": 1.0, "r2": 2.0, "h": "expression in r, u",
      // interval mode
      "q": "expression in t (default \"1\")", "f": "expression in t, u",
      // optional, either mode
      "b": "expression in t (default \"1\")",
      "lambda": 100.0, "c": 2.0, "delta": 0.8, "R": 1.0, "r": 1.0,
      "overrides": {"m": 1.0, "M": "r^2 + 1/2"},
      "solver": {"n": 2049, "damping": 0.5, ...},
      "name": "...", "description": "..."
    }

Override values are numbers or expressions in ``R`` and ``r``.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Optional

from .exprlang import Expr, ExprError, parse
from .reduction import AnnularProblem, ReducedBVP, ReductionError, reduce
from .solver import SolverConfig

__all__ = ["ProblemFile", "ProblemError", "load_problem", "parse_problem", "packaged_problem"]

_COMMON = {"mode", "b", "lambda", "c", "delta", "R", "r", "overrides", "solver",
           "name", "description"}
_MODE_KEYS = {"annulus": {"N", "r1", "r2", "h"}, "interval": {"q", "f"}}
_REQUIRED = {"annulus": {"N", "r1", "r2", "h"}, "interval": {"f"}}


class ProblemError(ValueError):
    pass


@dataclass
class ProblemFile:
    mode: str
    bvp: ReducedBVP
    annulus: Optional[AnnularProblem] = None
    b: Expr = field(default_factory=lambda: parse("1", {"t"}))
    lam: Optional[float] = None
    c: Optional[float] = None
    delta: Optional[float] = None
    R: Optional[float] = None
    r: Optional[float] = None
    overrides: dict = field(default_factory=dict)
    solver: SolverConfig = field(default_factory=SolverConfig)
    name: str = ""
    description: str = ""
    f_expr: Optional[Expr] = None
    raw: dict = field(default_factory=dict, repr=False)

    def override(self, key: str) -> Optional[float]:
        """Numeric value of an m/M override, evaluating expressions in R and r."""
        val = self.overrides.get(key)
        if val is None or isinstance(val, (int, float)):
            return None if val is None else float(val)
        env = {"R": self.R, "r": self.r}
        missing = [v for v in val.variables if env.get(v) is None]
        if missing:
            raise ProblemError(f"override {key} = {val.source!r} needs {', '.join(missing)}")
        return val(**{k: v for k, v in env.items() if k in val.variables})


def _number(data, key, positive=False):
    if key not in data:
        return None
    val = data[key]
    if isinstance(val, bool) or not isinstance(val, (int, float)):
        raise ProblemError(f"{key!r} must be a number")
    if positive and not val > 0:
        raise ProblemError(f"{key!r} must be positive")
    return float(val)


def _expr(data, key, allowed, default=None):
    src = data.get(key, default)
    if src is None:
        return None
    if not isinstance(src, str):
        raise ProblemError(f"{key!r} must be an expression string")
    try:
        return parse(src, allowed)
    except ExprError as exc:
        raise ProblemError(f"{key!r}: {exc}") from None


def parse_problem(data: dict) -> ProblemFile:
    if not isinstance(data, dict):
        raise ProblemError("problem file must hold a JSON object")
    mode = data.get("mode")
    if mode not in _MODE_KEYS:
        raise ProblemError("'mode' must be 'annulus' or 'interval'")
    allowed = _COMMON | _MODE_KEYS[mode]
    unknown = sorted(set(data) - allowed)
    if unknown:
        raise ProblemError(f"unknown keys for mode {mode!r}: {', '.join(unknown)}")
    missing = sorted(_REQUIRED[mode] - set(data))
    if missing:
        raise ProblemError(f"missing keys for mode {mode!r}: {', '.join(missing)}")

    try:
        if mode == "annulus":
            N = data["N"]
            if isinstance(N, bool) or not isinstance(N, int):
                raise ProblemError("'N' must be an integer")
            ann = AnnularProblem(N, _number(data, "r1"), _number(data, "r2"),
                                 _expr(data, "h", {"r", "u"}))
            bvp = reduce(ann)
            f_expr = None
        else:
            ann = None
            f_expr = _expr(data, "f", {"t", "u"})
            bvp = ReducedBVP.from_expressions(f_expr, _expr(data, "q", {"t"}, "1"))
    except ReductionError as exc:
        raise ProblemError(str(exc)) from None

    overrides = data.get("overrides", {})
    if not isinstance(overrides, dict):
        raise ProblemError("'overrides' must be an object")
    bad = sorted(set(overrides) - {"m", "M"})
    if bad:
        raise ProblemError(f"unknown override keys: {', '.join(bad)}")
    parsed_over = {}
    for k, v in overrides.items():
        if isinstance(v, str):
            parsed_over[k] = _expr(overrides, k, {"R", "r"})
        elif isinstance(v, (int, float)) and not isinstance(v, bool):
            parsed_over[k] = float(v)
        else:
            raise ProblemError(f"override {k!r} must be a number or expression")

    solver_kw = data.get("solver", {})
    if not isinstance(solver_kw, dict):
        raise ProblemError("'solver' must be an object")
    names = {f.name for f in dataclasses.fields(SolverConfig)}
    bad = sorted(set(solver_kw) - names)
    if bad:
        raise ProblemError(f"unknown solver keys: {', '.join(bad)}")
    if "slope_range" in solver_kw:
        solver_kw = {**solver_kw, "slope_range": tuple(solver_kw["slope_range"])}

    return ProblemFile(
        mode=mode, bvp=bvp, annulus=ann, b=_expr(data, "b", {"t"}, "1"),
        lam=_number(data, "lambda", positive=True), c=_number(data, "c"),
        delta=_number(data, "delta"), R=_number(data, "R", positive=True),
        r=_number(data, "r", positive=True), overrides=parsed_over,
        solver=SolverConfig(**solver_kw), name=str(data.get("name", "")),
        description=str(data.get("description", "")), f_expr=f_expr, raw=data,
    )


def load_problem(path) -> ProblemFile:
    text = Path(path).read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProblemError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    try:
        return parse_problem(data)
    except ProblemError as exc:
        raise ProblemError(f"{path}: {exc}") from None


def packaged_problem(example_id: str) -> ProblemFile:
    """One of the shipped example problems, e.g. ``"1.1"``."""
    name = "example_" + example_id.replace(".", "_") + ".json"
    res = resources.files("annulus_bvp") / "problems" / name
    if not res.is_file():
        raise ProblemError(f"unknown example id {example_id!r}")
    return parse_problem(json.loads(res.read_text()))
