"""Command-line front end: scenario files in, deterministic CSV tables out.

Exit codes: 0 success, 2 scenario validation failure, 3 numerical errors
(partial outputs written, rows flagged), 4 oracle non-convergence.  Output
files are byte-identical across runs of the same scenario: floats are
written with 17 significant digits and sweep assembly preserves grid order
regardless of the worker-pool size.
"""

from __future__ import annotations

import argparse
import os
import sys
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from importlib import resources
from pathlib import Path

from . import dynamics
from .errors import (AccuracyError, DegenerateDenominatorError,
                     DimensionCapError, NoStationaryStateError,
                     SingularFrequencyError, SqueezecoolError)
from .lindblad import FockConfig, converged_oracle
from .scenario import PRODUCTS, Scenario, validate
from .spectrum import FormalSpectrumWarning, GridSpec, integrate_occupation
from .steady import steady_states

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3
EXIT_ORACLE = 4

_HEADERS = {
    "steady": ("axis,value,branch,x_s,a_s_re,a_s_im,b_s_re,b_s_im,"
               "delta_eff(omega_m),residual,stable,flags"),
    "spectrum": "axis,value,omega(omega_m),S_n,flags",
    "occupation": "axis,value,n_bar,T_eff(hbar*omega_m/k_B),stable,flags",
    "ellipse": "axis,value,var_x,var_p,cov_xp,flags",
    "stability": ("axis,value,branch,verdict,eig1_re,eig1_im,eig2_re,"
                  "eig2_im,eig3_re,eig3_im,eig4_re,eig4_im,flags"),
    "oracle": ("axis,value,dim_cav,dim_mech,n_mech,n_cav,tail_mass,"
               "converged,flags"),
}

_COMMANDS = {
    "steady": "steady",
    "spectrum": "spectrum",
    "occupation": "occupation",
    "ellipse": "ellipse",
    "check": "stability",
    "oracle": "oracle",
    "sweep": None,
}


def _fmt(value) -> str:
    return format(float(value), ".17g")


@dataclass(frozen=True)
class _PointTask:
    params: object
    axis: str
    value: str
    outputs: tuple
    grid: GridSpec
    branch_index: object
    oracle_cfg: FockConfig
    extra_flags: tuple = ()


@dataclass
class _PointResult:
    rows: dict
    numerical_error: bool = False
    oracle_unconverged: bool = False


def _flag_str(flags) -> str:
    return ";".join(flags)


def _error_rows(task: _PointTask, flag: str) -> _PointResult:
    rows = {}
    flags = _flag_str(tuple(task.extra_flags) + (flag,))
    widths = {"steady": 9, "spectrum": 2, "occupation": 3, "ellipse": 3,
              "stability": 10, "oracle": 6}
    for product in task.outputs:
        rows[product] = [(task.axis, task.value)
                         + ("",) * widths[product] + (flags,)]
    return _PointResult(rows=rows, numerical_error=True)


def _compute_point(task: _PointTask) -> _PointResult:
    axis, value = task.axis, task.value
    base_flags = tuple(task.extra_flags)
    try:
        branches = steady_states(task.params)
    except DegenerateDenominatorError:
        return _error_rows(task, "singular-point")
    except SqueezecoolError as exc:
        return _error_rows(task, type(exc).__name__)

    classified = dynamics.classify_branches(task.params, branches)
    branch = dynamics.select_default_branch(task.params, classified,
                                            branch_index=task.branch_index)
    branch_flags = base_flags
    if branch.stable != dynamics.STABLE:
        branch_flags = branch_flags + (branch.stable,)

    result = _PointResult(rows={})
    for product in task.outputs:
        if product == "steady":
            result.rows[product] = [
                (axis, value, str(i), _fmt(b.x_s), _fmt(b.a_s.real),
                 _fmt(b.a_s.imag), _fmt(b.b_s.real), _fmt(b.b_s.imag),
                 _fmt(b.delta_eff), _fmt(b.residual), b.stable,
                 _flag_str(base_flags))
                for i, b in enumerate(classified)]
        elif product == "stability":
            rows = []
            for i, b in enumerate(classified):
                verdict, eig = dynamics.stability(
                    dynamics.linearize(task.params, b))
                eig_cols = tuple(_fmt(part) for lam in eig
                                 for part in (lam.real, lam.imag))
                rows.append((axis, value, str(i), verdict) + eig_cols
                            + (_flag_str(base_flags),))
            result.rows[product] = rows
        elif product in ("spectrum", "occupation"):
            try:
                with warnings.catch_warnings():
                    warnings.simplefilter("ignore", FormalSpectrumWarning)
                    spec = integrate_occupation(
                        dynamics.linearize(task.params, branch), task.grid)
            except SingularFrequencyError:
                result.rows[product] = [
                    (axis, value) + ("",) * (2 if product == "spectrum" else 3)
                    + (_flag_str(branch_flags + ("singular-frequency",)),)]
                result.numerical_error = True
                continue
            except AccuracyError as exc:
                est = "" if exc.estimate is None else _fmt(exc.estimate)
                if product == "occupation":
                    row = (axis, value, est, "", branch.stable,
                           _flag_str(branch_flags + ("accuracy",)))
                else:
                    row = (axis, value, "", "",
                           _flag_str(branch_flags + ("accuracy",)))
                result.rows[product] = [row]
                result.numerical_error = True
                continue
            flags = _flag_str(branch_flags + (("formal",) if spec.formal
                                              else ()))
            if product == "occupation":
                result.rows[product] = [(axis, value, _fmt(spec.n_bar),
                                         _fmt(spec.t_eff), branch.stable,
                                         flags)]
            else:
                result.rows[product] = [
                    (axis, value, _fmt(w), _fmt(s), flags)
                    for w, s in zip(spec.omega, spec.s_n)]
        elif product == "ellipse":
            try:
                moments = dynamics.lyapunov_moments(
                    dynamics.linearize(task.params, branch))
            except NoStationaryStateError:
                result.rows[product] = [
                    (axis, value, "", "", "",
                     _flag_str(branch_flags + ("no-stationary-state",)))]
                result.numerical_error = True
                continue
            var_x, var_p, cov_xp = dynamics.error_ellipse(moments)
            result.rows[product] = [(axis, value, _fmt(var_x), _fmt(var_p),
                                     _fmt(cov_xp), _flag_str(branch_flags))]
        elif product == "oracle":
            try:
                oracle, cfg = converged_oracle(task.params, branch,
                                               task.oracle_cfg)
            except (NoStationaryStateError, DimensionCapError) as exc:
                token = ("no-stationary-state"
                         if isinstance(exc, NoStationaryStateError)
                         else "dimension-cap")
                result.rows[product] = [
                    (axis, value, "", "", "", "", "", "",
                     _flag_str(branch_flags + (token,)))]
                result.numerical_error = True
                continue
            flags = branch_flags
            if not oracle.converged:
                flags = flags + ("not-converged",)
                result.oracle_unconverged = True
            result.rows[product] = [
                (axis, value, str(cfg.dim_cav), str(cfg.dim_mech),
                 _fmt(oracle.n_mech), _fmt(oracle.n_cav),
                 _fmt(oracle.tail_mass),
                 "true" if oracle.converged else "false",
                 _flag_str(flags))]
    return result


def _point_tasks(scenario: Scenario) -> list:
    if scenario.sweep_axis is None:
        return [_PointTask(
            params=scenario.params, axis="", value="",
            outputs=scenario.outputs, grid=scenario.grid,
            branch_index=scenario.branch_index,
            oracle_cfg=scenario.oracle)]
    tasks = []
    if scenario.baseline_r is not None:
        tasks.append(_PointTask(
            params=replace(scenario.params, r=scenario.baseline_r),
            axis="r", value=_fmt(scenario.baseline_r),
            outputs=scenario.outputs, grid=scenario.grid,
            branch_index=scenario.branch_index,
            oracle_cfg=scenario.oracle, extra_flags=("baseline",)))
    for value in scenario.sweep_values:
        tasks.append(_PointTask(
            params=replace(scenario.params,
                           **{scenario.sweep_axis: value}),
            axis=scenario.sweep_axis, value=_fmt(value),
            outputs=scenario.outputs, grid=scenario.grid,
            branch_index=scenario.branch_index,
            oracle_cfg=scenario.oracle))
    return tasks


def run(scenario: Scenario, out_dir, jobs: int = 1) -> int:
    """Execute a scenario, writing one CSV per requested product."""
    tasks = _point_tasks(scenario)
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_compute_point, tasks))
    else:
        results = [_compute_point(t) for t in tasks]

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for product in scenario.outputs:
        lines = [_HEADERS[product]]
        for res in results:
            lines.extend(",".join(row) for row in res.rows.get(product, ()))
        (out_dir / f"{product}.csv").write_text("\n".join(lines) + "\n",
                                                encoding="utf-8")
    if any(res.numerical_error for res in results):
        return EXIT_NUMERICAL
    if any(res.oracle_unconverged for res in results):
        return EXIT_ORACLE
    return EXIT_OK


def load_scenario_text(name: str):
    """Scenario text from a filesystem path or a bundled scenario name."""
    path = Path(name)
    if path.is_file():
        return path.read_text(encoding="utf-8")
    bundled = resources.files(__package__).joinpath("scenarios", name)
    if bundled.is_file():
        return bundled.read_text(encoding="utf-8")
    return None


def _default_jobs():
    raw = os.environ.get("SQUEEZECOOL_JOBS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return None


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="squeezecool",
        description="Steady states, stability, and phonon-number spectra "
                    "of a parametrically squeezed optomechanical resonator.")
    sub = parser.add_subparsers(dest="command", required=True)
    for command in _COMMANDS:
        p = sub.add_parser(
            command,
            help=(f"write the {_COMMANDS[command]} table"
                  if _COMMANDS[command] else
                  "run the scenario's own sweep and product list"))
        p.add_argument("--scenario", required=True,
                       help="scenario file path or bundled scenario name")
        p.add_argument("--out", required=True, help="output directory")
        p.add_argument("--branch", type=int, default=None,
                       help="steady-state branch index override")
        p.add_argument("--jobs", type=int, default=None,
                       help="sweep worker processes "
                            "(default: $SQUEEZECOOL_JOBS or 1)")
    args = parser.parse_args(argv)

    jobs = args.jobs if args.jobs is not None else _default_jobs()
    if jobs is None or jobs < 1:
        print("error: --jobs/SQUEEZECOOL_JOBS must be a positive integer",
              file=sys.stderr)
        return EXIT_VALIDATION

    text = load_scenario_text(args.scenario)
    if text is None:
        print(f"error: scenario {args.scenario!r} is neither a file nor a "
              "bundled scenario", file=sys.stderr)
        return EXIT_VALIDATION
    scenario, issues = validate(text)
    for issue in issues:
        print(issue, file=sys.stderr)
    if scenario is None:
        return EXIT_VALIDATION

    if args.branch is not None:
        scenario = replace(scenario, branch_index=args.branch)
    product = _COMMANDS[args.command]
    if product is not None:
        scenario = replace(scenario, outputs=(product,))
    return run(scenario, args.out, jobs=jobs)


if __name__ == "__main__":
    sys.exit(main())
