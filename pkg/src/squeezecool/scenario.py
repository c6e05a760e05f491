"""Scenario files: flat ``key = value`` text describing one reproducible run.

The format is dependency-free and diff-friendly: UTF-8 lines of
``key = value`` with ``#`` comments.  Nested settings use dotted keys
(``sweep.axis``, ``grid.rel_tol``, ``oracle.dim_mech``).  ``validate``
returns problems as data (never raises for content errors) so callers can
report every offending field at once.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

from .lindblad import FockConfig
from .params import SystemParams, critical_squeeze
from .spectrum import GridSpec
from .steady import SWEEP_AXES

PRODUCTS = ("steady", "spectrum", "occupation", "ellipse", "stability",
            "oracle")

_PARAM_KEYS = ("delta", "delta_c", "kappa", "gamma_m", "g", "eta", "r",
               "theta", "n_th_m", "n_th_cav")
_OPTIONAL_PARAM_KEYS = ("omega_m",)
_GRID_KEYS = ("grid.omega_max", "grid.rel_tol", "grid.max_panels",
              "grid.backbone_points", "grid.peak_points", "grid.peak_span")
_ORACLE_KEYS = ("oracle.dim_cav", "oracle.dim_mech", "oracle.tail_tol")
_OTHER_KEYS = ("sweep.axis", "sweep.values", "sweep.baseline_r",
               "branch_index", "outputs")
_ALL_KEYS = (_PARAM_KEYS + _OPTIONAL_PARAM_KEYS + _GRID_KEYS + _ORACLE_KEYS
             + _OTHER_KEYS)


@dataclass(frozen=True)
class Issue:
    """One validation finding; ``severity`` is "error" or "warning"."""

    severity: str
    key: str
    value: str
    constraint: str

    def __str__(self):
        return (f"{self.severity}: {self.key} = {self.value!r}: "
                f"{self.constraint}")


@dataclass(frozen=True)
class Scenario:
    """Validated description of one run: base parameters, optional sweep,
    frequency grid, oracle truncation, and the products to write."""

    params: SystemParams
    outputs: tuple = ("steady",)
    sweep_axis: Optional[str] = None
    sweep_values: tuple = ()
    baseline_r: Optional[float] = None
    branch_index: Optional[int] = None
    grid: GridSpec = field(default_factory=GridSpec)
    oracle: FockConfig = field(default_factory=FockConfig)


def _parse_kv(text: str):
    pairs = {}
    issues = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if not sep or not key:
            issues.append(Issue("error", f"line {lineno}", line,
                                "expected 'key = value'"))
            continue
        if key not in _ALL_KEYS:
            issues.append(Issue("error", key, value, "unknown key"))
            continue
        if key in pairs:
            issues.append(Issue("error", key, value, "duplicate key"))
            continue
        pairs[key] = value
    return pairs, issues


def _take_float(pairs, key, issues, constraint=None, default=None,
                required=False):
    if key not in pairs:
        if required:
            issues.append(Issue("error", key, "<missing>",
                                "required key is missing"))
        return default
    raw = pairs.pop(key)
    try:
        value = float(raw)
    except ValueError:
        issues.append(Issue("error", key, raw, "must be a real number"))
        return default
    if not math.isfinite(value):
        issues.append(Issue("error", key, raw, "must be finite"))
        return default
    if constraint is not None:
        label, ok = constraint
        if not ok(value):
            issues.append(Issue("error", key, raw, label))
            return default
    return value


def _take_int(pairs, key, issues, minimum, default=None):
    if key not in pairs:
        return default
    raw = pairs.pop(key)
    try:
        value = int(raw)
    except ValueError:
        issues.append(Issue("error", key, raw, "must be an integer"))
        return default
    if value < minimum:
        issues.append(Issue("error", key, raw, f"must be >= {minimum}"))
        return default
    return value


_POSITIVE = ("must be > 0", lambda v: v > 0)
_NON_NEGATIVE = ("must be >= 0", lambda v: v >= 0)
_UNIT_OPEN = ("must be in (0, 1)", lambda v: 0 < v < 1)


def validate(text: str):
    """Parse and validate scenario text.

    Returns ``(scenario, issues)``: ``scenario`` is None whenever any issue
    has severity "error"; warnings accompany a usable scenario.
    """
    pairs, issues = _parse_kv(text)

    values = {}
    for key in _PARAM_KEYS:
        constraint = None
        if key in ("kappa", "gamma_m"):
            constraint = _POSITIVE
        elif key in ("g", "eta", "r", "n_th_m", "n_th_cav"):
            constraint = _NON_NEGATIVE
        values[key] = _take_float(pairs, key, issues, constraint,
                                  required=True)
    omega_m = _take_float(pairs, "omega_m", issues, _POSITIVE, default=1.0)

    sweep_axis = None
    sweep_values = ()
    if "sweep.axis" in pairs:
        raw_axis = pairs.pop("sweep.axis")
        if raw_axis not in SWEEP_AXES:
            issues.append(Issue("error", "sweep.axis", raw_axis,
                                f"must be one of {', '.join(SWEEP_AXES)}"))
        else:
            sweep_axis = raw_axis
    if "sweep.values" in pairs:
        raw_values = pairs.pop("sweep.values")
        parsed = []
        ok = True
        for item in raw_values.split(","):
            item = item.strip()
            try:
                v = float(item)
            except ValueError:
                issues.append(Issue("error", "sweep.values", item,
                                    "must be a comma list of real numbers"))
                ok = False
                break
            if not math.isfinite(v):
                issues.append(Issue("error", "sweep.values", item,
                                    "values must be finite"))
                ok = False
                break
            parsed.append(v)
        if ok and not parsed:
            issues.append(Issue("error", "sweep.values", raw_values,
                                "must be non-empty"))
        elif ok:
            sweep_values = tuple(parsed)
    if (sweep_axis is None) != (len(sweep_values) == 0):
        issues.append(Issue("error", "sweep.axis", str(sweep_axis),
                            "sweep.axis and sweep.values must be given "
                            "together"))
        sweep_axis, sweep_values = None, ()
    baseline_r = _take_float(pairs, "sweep.baseline_r", issues,
                             _NON_NEGATIVE)
    if baseline_r is not None and sweep_axis is None:
        issues.append(Issue("error", "sweep.baseline_r", str(baseline_r),
                            "requires an active sweep"))
        baseline_r = None

    branch_index = _take_int(pairs, "branch_index", issues, minimum=0)

    grid_kwargs = {}
    v = _take_float(pairs, "grid.omega_max", issues, _POSITIVE)
    if v is not None:
        grid_kwargs["omega_max"] = v
    v = _take_float(pairs, "grid.rel_tol", issues, _UNIT_OPEN)
    if v is not None:
        grid_kwargs["rel_tol"] = v
    for key, name, minimum in (("grid.max_panels", "max_panels", 16),
                               ("grid.backbone_points", "backbone_points", 2),
                               ("grid.peak_points", "peak_points", 2)):
        v = _take_int(pairs, key, issues, minimum=minimum)
        if v is not None:
            grid_kwargs[name] = v
    v = _take_float(pairs, "grid.peak_span", issues, _POSITIVE)
    if v is not None:
        grid_kwargs["peak_span"] = v

    oracle_kwargs = {}
    for key, name in (("oracle.dim_cav", "dim_cav"),
                      ("oracle.dim_mech", "dim_mech")):
        v = _take_int(pairs, key, issues, minimum=2)
        if v is not None:
            oracle_kwargs[name] = v
    v = _take_float(pairs, "oracle.tail_tol", issues, _UNIT_OPEN)
    if v is not None:
        oracle_kwargs["tail_tol"] = v
    if ("dim_cav" in oracle_kwargs and "dim_mech" in oracle_kwargs
            and oracle_kwargs["dim_cav"] * oracle_kwargs["dim_mech"] > 4096):
        issues.append(Issue(
            "error", "oracle.dim_mech", str(oracle_kwargs["dim_mech"]),
            "dim_cav * dim_mech must be <= 4096"))
        oracle_kwargs.pop("dim_mech")

    outputs = ("steady",)
    if "outputs" in pairs:
        raw_outputs = pairs.pop("outputs")
        requested = [t.strip() for t in raw_outputs.split(",") if t.strip()]
        bad = [t for t in requested if t not in PRODUCTS]
        if bad:
            issues.append(Issue("error", "outputs", ", ".join(bad),
                                f"must be among {', '.join(PRODUCTS)}"))
        elif not requested:
            issues.append(Issue("error", "outputs", raw_outputs,
                                "must name at least one product"))
        else:
            outputs = tuple(p for p in PRODUCTS if p in requested)

    if any(issue.severity == "error" for issue in issues):
        return None, issues

    params = SystemParams(omega_m=omega_m, **values)
    scenario = Scenario(
        params=params,
        outputs=outputs,
        sweep_axis=sweep_axis,
        sweep_values=sweep_values,
        baseline_r=baseline_r,
        branch_index=branch_index,
        grid=GridSpec(**grid_kwargs),
        oracle=FockConfig(**oracle_kwargs),
    )

    r_c = critical_squeeze(params)
    swept_r = scenario.sweep_values if scenario.sweep_axis == "r" else ()
    for r_val in (params.r,) + tuple(swept_r):
        if abs(r_val - r_c) <= 1e-9 * max(1.0, r_c):
            issues.append(Issue(
                "warning", "r", repr(r_val),
                f"coincides with the critical squeeze factor r_c={r_c!r}; "
                "the static displacement equation is degenerate there"))
    return scenario, issues


def render(scenario: Scenario) -> str:
    """Canonical scenario text; ``validate(render(s))`` reproduces ``s``."""
    lines = []
    p = scenario.params
    for key in _PARAM_KEYS:
        lines.append(f"{key} = {getattr(p, key)!r}")
    if scenario.sweep_axis is not None:
        lines.append(f"sweep.axis = {scenario.sweep_axis}")
        lines.append("sweep.values = "
                     + ", ".join(repr(v) for v in scenario.sweep_values))
        if scenario.baseline_r is not None:
            lines.append(f"sweep.baseline_r = {scenario.baseline_r!r}")
    if scenario.branch_index is not None:
        lines.append(f"branch_index = {scenario.branch_index}")
    g = scenario.grid
    default_grid = GridSpec()
    if g.omega_max is not None:
        lines.append(f"grid.omega_max = {g.omega_max!r}")
    for name in ("rel_tol", "max_panels", "backbone_points", "peak_points",
                 "peak_span"):
        if getattr(g, name) != getattr(default_grid, name):
            lines.append(f"grid.{name} = {getattr(g, name)!r}")
    o = scenario.oracle
    default_oracle = FockConfig()
    for name in ("dim_cav", "dim_mech", "tail_tol"):
        if getattr(o, name) != getattr(default_oracle, name):
            lines.append(f"oracle.{name} = {getattr(o, name)!r}")
    lines.append("outputs = " + ", ".join(scenario.outputs))
    return "\n".join(lines) + "\n"
