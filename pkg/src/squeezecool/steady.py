"""Classical equilibria of the driven, squeezed optomechanical system.

The static displacement x_s obeys an implicit equation that clears to a
cubic; depending on drive strength and detuning there are one, two (fold
tangency), or three real branches.  Each branch carries the consistent
cavity and mechanical amplitudes and a back-substitution residual.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .errors import DegenerateDenominatorError, InvalidParameterError, SqueezecoolError
from .params import SystemParams, critical_squeeze

#: absolute tolerance for merging duplicate cubic roots (fold points)
_DEDUPE_TOL = 1e-8
#: distance from r_c (relative to max(1, r_c)) treated as singular
_SINGULAR_TOL = 1e-9

SWEEP_AXES = ("r", "delta_c", "theta", "g")


@dataclass(frozen=True)
class SteadyStateBranch:
    """One classical equilibrium of the coupled cavity-resonator system.

    ``stable`` is a tri-state verdict ("stable", "unstable", "marginal")
    filled in by the dynamics module; it is None until classified.
    """

    x_s: float
    a_s: complex
    b_s: complex
    delta_eff: float
    residual: float
    stable: Optional[str] = None


@dataclass(frozen=True)
class SweepRow:
    """One grid point of a displacement sweep.

    ``error`` is None for a clean point, otherwise a flag token such as
    "singular-point"; failed points keep the sweep alive as gaps.
    """

    value: float
    branches: tuple
    error: Optional[str] = None


def _denominator_gap(params: SystemParams) -> float:
    return abs(params.r - critical_squeeze(params))


def _displacement_rhs(params: SystemParams, x: float, coupling_sum: float,
                      a_quad: float) -> float:
    # right-hand side of the implicit displacement equation
    lorentz = (params.kappa / 2.0) ** 2 + (params.delta_c - params.g * x) ** 2
    return coupling_sum / (lorentz * a_quad)


def _build_branch(params: SystemParams, x_s: float) -> SteadyStateBranch:
    kappa, gamma_m, g, eta = params.kappa, params.gamma_m, params.g, params.eta
    delta_eff = params.delta_c - g * x_s
    a_s = eta / (1j * delta_eff + kappa / 2.0)
    force = g * abs(a_s) ** 2
    c = 1j * params.delta + gamma_m / 2.0
    xi = params.xi
    a_quad = (gamma_m / 2.0) ** 2 + params.delta ** 2 - params.r ** 2
    b_s = 1j * force * (c.conjugate() + xi) / a_quad
    res_cav = abs(-(1j * params.delta_c + kappa / 2.0) * a_s
                  + 1j * g * a_s * x_s + eta)
    res_mech = abs(-c * b_s - xi * b_s.conjugate() + 1j * force)
    res_x = abs(2.0 * b_s.real - x_s)
    return SteadyStateBranch(
        x_s=x_s, a_s=a_s, b_s=b_s, delta_eff=delta_eff,
        residual=max(res_cav, res_mech, res_x),
    )


def steady_states(params: SystemParams) -> list:
    """All classical equilibrium branches, sorted ascending in x_s.

    The cubic obtained by clearing denominators of the implicit displacement
    equation is solved through companion-matrix eigenvalues, each real root
    is polished with one Newton step on the original implicit equation, and
    near-duplicate roots (fold tangencies) are merged.

    Raises
    ------
    DegenerateDenominatorError
        If r lies within tolerance of the critical squeeze factor, where
        the displacement equation is singular.
    """
    r_c = critical_squeeze(params)
    if _denominator_gap(params) <= _SINGULAR_TOL * max(1.0, r_c):
        raise DegenerateDenominatorError(
            f"r={params.r} is within {_SINGULAR_TOL:g} of the critical "
            f"squeeze factor r_c={r_c!r}; the static displacement equation "
            "is singular there")

    if params.g == 0.0 or params.eta == 0.0:
        # no radiation-pressure force: the cubic degenerates, x_s = 0 exactly
        return [_build_branch(params, 0.0)]

    g, eta = params.g, params.eta
    a_quad = (params.gamma_m / 2.0) ** 2 + params.delta ** 2 - params.r ** 2
    coupling_sum = 2.0 * g * eta ** 2 * (params.delta
                                         + params.r * math.sin(2.0 * params.theta))
    lorentz0 = (params.kappa / 2.0) ** 2 + params.delta_c ** 2
    coeffs = [
        a_quad * g ** 2,
        -2.0 * a_quad * g * params.delta_c,
        a_quad * lorentz0,
        -coupling_sum,
    ]
    roots = np.roots(coeffs)
    real_roots = [z.real for z in roots if abs(z.imag) <= 1e-9 * (1.0 + abs(z))]

    polished = []
    for x in real_roots:
        # one Newton step on f(x) = x - rhs(x); rhs' from the chain rule
        lorentz = (params.kappa / 2.0) ** 2 + (params.delta_c - g * x) ** 2
        rhs = coupling_sum / (lorentz * a_quad)
        drhs = rhs * 2.0 * g * (params.delta_c - g * x) / lorentz
        fprime = 1.0 - drhs
        if fprime != 0.0:
            step = (x - rhs) / fprime
            if math.isfinite(step):
                x = x - step
        polished.append(x)

    polished.sort()
    unique = []
    for x in polished:
        if not unique or abs(x - unique[-1]) > _DEDUPE_TOL:
            unique.append(x)
    return [_build_branch(params, x) for x in unique]


def displacement_sweep(params: SystemParams, axis: str, grid) -> list:
    """Steady-state branches along one parameter axis.

    ``axis`` is one of "r", "delta_c", "theta", "g"; ``grid`` must be
    non-empty and strictly ascending.  Singular or otherwise failed points
    are reported as rows with an error flag instead of aborting the sweep,
    so bistability loops and critical points remain visible.
    """
    if axis not in SWEEP_AXES:
        raise InvalidParameterError(
            f"axis must be one of {SWEEP_AXES}, got {axis!r}")
    grid = [float(v) for v in grid]
    if not grid:
        raise InvalidParameterError("sweep grid must be non-empty")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise InvalidParameterError("sweep grid must be strictly ascending")

    rows = []
    for value in grid:
        try:
            point = replace(params, **{axis: value})
            branches = tuple(steady_states(point))
            rows.append(SweepRow(value=value, branches=branches))
        except DegenerateDenominatorError:
            rows.append(SweepRow(value=value, branches=(), error="singular-point"))
        except SqueezecoolError as exc:
            rows.append(SweepRow(value=value, branches=(),
                                 error=type(exc).__name__))
    return rows
