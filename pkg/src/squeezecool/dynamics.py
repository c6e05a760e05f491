"""Linearized fluctuation dynamics around a classical equilibrium.

Fluctuations are ordered as v = (da, da+, db, db+) project-wide, where da
and db are the cavity and mechanical fluctuation operators.  The drift
matrix M and diffusion matrix D define the linear Langevin system
dv/dt = M v + n with white-noise correlators <n_i(t) n_j(t')> =
D_ij delta(t - t').  Stationary second moments <v_i v_j> follow from the
Lyapunov equation M V + V M^T + D = 0, giving the phonon occupation and
quadrature error ellipse without any frequency integration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .errors import AccuracyError, InvalidParameterError, NoStationaryStateError
from .params import SystemParams
from .steady import SteadyStateBranch

#: default tolerance on eigenvalue real parts for the stability verdict
STABILITY_TOL = 1e-9

STABLE = "stable"
UNSTABLE = "unstable"
MARGINAL = "marginal"


@dataclass(frozen=True)
class LinearModel:
    """Drift matrix M, diffusion matrix D, and enhanced coupling G = g*a_s
    of the fluctuations around one steady-state branch.

    The arrays are frozen read-only; build a new model instead of mutating.
    """

    M: np.ndarray
    D: np.ndarray
    G: complex
    branch: SteadyStateBranch


@dataclass(frozen=True)
class MomentMatrix:
    """Stationary second moments V_ij = <v_i v_j> of the fluctuation vector.

    V is not Hermitian: rows/columns pair operators with their conjugates,
    so the bosonic commutators appear as V[0,1]-V[1,0] = V[2,3]-V[3,2] = 1.
    """

    V: np.ndarray

    @property
    def n_mech(self) -> float:
        """Mean phonon number <db+ db>."""
        return self.V[3, 2].real

    @property
    def n_cav(self) -> float:
        """Mean photon number <da+ da>."""
        return self.V[1, 0].real


def linearize(params: SystemParams, branch: SteadyStateBranch) -> LinearModel:
    """Linear fluctuation model around ``branch``.

    The cavity row couples to the mechanical position through the enhanced
    coupling G = g*a_s; the mechanical row carries the detuned oscillator,
    its damping, and the quadrature-mixing squeeze term.
    """
    kappa, gamma_m = params.kappa, params.gamma_m
    delta, xi = params.delta, params.xi
    delta_eff = branch.delta_eff
    G = params.g * branch.a_s
    Gc = G.conjugate()
    M = np.array([
        [-(1j * delta_eff + kappa / 2.0), 0.0, 1j * G, 1j * G],
        [0.0, 1j * delta_eff - kappa / 2.0, -1j * Gc, -1j * Gc],
        [1j * Gc, 1j * G, -(1j * delta + gamma_m / 2.0), -xi],
        [-1j * Gc, -1j * G, -xi.conjugate(), 1j * delta - gamma_m / 2.0],
    ], dtype=complex)
    D = np.zeros((4, 4), dtype=complex)
    D[0, 1] = kappa * (params.n_th_cav + 1.0)
    D[1, 0] = kappa * params.n_th_cav
    D[2, 3] = gamma_m * (params.n_th_m + 1.0)
    D[3, 2] = gamma_m * params.n_th_m
    M.setflags(write=False)
    D.setflags(write=False)
    return LinearModel(M=M, D=D, G=G, branch=branch)


def stability(model: LinearModel, tol: float = STABILITY_TOL):
    """Stability verdict and drift eigenvalues, sorted by real part descending.

    Returns ``(verdict, eigenvalues)`` with verdict "stable" when every
    eigenvalue real part is below -tol, "marginal" when any real part lies
    within [-tol, tol], and "unstable" otherwise.
    """
    if not (tol >= 0.0 and math.isfinite(tol)):
        raise InvalidParameterError(f"tol must be >= 0, got {tol}")
    eig = np.linalg.eigvals(model.M)
    eig = eig[np.argsort(-eig.real, kind="stable")]
    re = eig.real
    if np.any(np.abs(re) <= tol):
        verdict = MARGINAL
    elif np.all(re < -tol):
        verdict = STABLE
    else:
        verdict = UNSTABLE
    return verdict, eig


def classify_branch(params: SystemParams, branch: SteadyStateBranch,
                    tol: float = STABILITY_TOL) -> SteadyStateBranch:
    """Return ``branch`` with its stability verdict filled in."""
    verdict, _ = stability(linearize(params, branch), tol=tol)
    return replace(branch, stable=verdict)


def classify_branches(params: SystemParams, branches,
                      tol: float = STABILITY_TOL) -> tuple:
    """Classify every branch of a steady-state solution."""
    return tuple(classify_branch(params, b, tol=tol) for b in branches)


def select_default_branch(params: SystemParams, branches,
                          branch_index: Optional[int] = None) -> SteadyStateBranch:
    """Deterministic default branch for downstream single-branch products.

    Picks the stable branch of smallest ``|x_s|`` (the branch continuously
    connected to x_s = 0 at vanishing pump); when no branch is stable, the
    smallest ``|x_s|`` overall.  ``branch_index`` (into the ascending-x_s
    list) overrides the heuristic.
    """
    branches = list(branches)
    if not branches:
        raise InvalidParameterError("no steady-state branches to select from")
    if branch_index is not None:
        if not 0 <= branch_index < len(branches):
            raise InvalidParameterError(
                f"branch index {branch_index} out of range for "
                f"{len(branches)} branches")
        branch = branches[branch_index]
        return branch if branch.stable is not None \
            else classify_branch(params, branch)
    classified = [b if b.stable is not None else classify_branch(params, b)
                  for b in branches]
    stable = [b for b in classified if b.stable == STABLE]
    pool = stable if stable else classified
    return min(pool, key=lambda b: abs(b.x_s))


def lyapunov_moments(model: LinearModel) -> MomentMatrix:
    """Stationary second moments of a stable linear model.

    Solves M V + V M^T + D = 0 by dense vectorization (a 16-dimensional
    linear system); the mean phonon number is V[3,2].

    Raises
    ------
    NoStationaryStateError
        If the model is unstable or marginal.
    AccuracyError
        If the solved moments fail the residual check.
    """
    verdict, eig = stability(model)
    if verdict != STABLE:
        raise NoStationaryStateError(
            f"model is {verdict} (leading eigenvalue {eig[0]!r}); "
            "no stationary second moments exist")
    n = model.M.shape[0]
    eye = np.eye(n)
    coeff = np.kron(eye, model.M) + np.kron(model.M, eye)
    vec = np.linalg.solve(coeff, -model.D.flatten(order="F"))
    V = vec.reshape((n, n), order="F")
    residual = np.abs(model.M @ V + V @ model.M.T + model.D).max()
    d_scale = np.abs(model.D).max()
    if residual > 1e-10 * max(d_scale, 1e-300):
        raise AccuracyError(
            f"Lyapunov residual {residual:g} exceeds 1e-10 * |D|max "
            f"({d_scale:g})", estimate=V, bound=residual)
    V.setflags(write=False)
    return MomentMatrix(V=V)


def error_ellipse(moments: MomentMatrix):
    """Quadrature noise ellipse (varX, varP, covXP) of the mechanical mode.

    Quadratures follow db = (X + iP)/2, i.e. X = db + db+ and
    P = -i(db - db+); the vacuum gives (1, 1, 0), a thermal state the
    isotropic (2n+1, 2n+1, 0).
    """
    V = moments.V
    bb = V[2, 2]
    n = V[3, 2].real
    var_x = 2.0 * bb.real + 2.0 * n + 1.0
    var_p = -2.0 * bb.real + 2.0 * n + 1.0
    cov_xp = 2.0 * bb.imag
    return var_x, var_p, cov_xp


def quadrature_coupling(r: float, theta: float):
    """Coefficients (cX, cP) of the cavity coupling to the mechanical
    quadratures, as seen from the squeezed frame.

    The position-quadrature coupling transforms to
    (cosh r - cos(2 theta) sinh r) X + (sin(2 theta) sinh r) P, so the
    angle theta steers how strongly the amplified quadrature is addressed.
    """
    if not (math.isfinite(r) and r >= 0.0):
        raise InvalidParameterError(f"r must be >= 0, got {r}")
    ch, sh = math.cosh(r), math.sinh(r)
    return ch - math.cos(2.0 * theta) * sh, math.sin(2.0 * theta) * sh
