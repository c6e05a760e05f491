"""Independent quantum ground truth: truncated Fock-space steady states.

Builds the Lindblad generator of the linearized model on a cavity (x)
mechanical product space, extracts the stationary density operator from the
null space by dense singular-value decomposition, and reports occupations
and the full second-moment matrix for cross-validation against the Lyapunov
route.  This is a correctness instrument for small occupations, not a
production path: Fock cost grows quadratically with occupation.

Product-space ordering is cavity-major: basis index = i_cav * dim_mech +
i_mech (asserted by a shape test).  Density matrices are vectorized
row-major, so pre-multiplication by A is kron(A, I) and post-multiplication
by B is kron(I, B.T).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse as sp

from .dynamics import STABLE, linearize, stability
from .errors import (DegenerateSteadyStateError, DimensionCapError,
                     InvalidParameterError, NoStationaryStateError)
from .params import SystemParams
from .steady import SteadyStateBranch

#: largest dense Liouvillian dimension (= product-space dimension squared)
#: the SVD-based null-space extraction is allowed to attempt
_DENSE_CAP = 4096


@dataclass(frozen=True)
class FockConfig:
    """Truncation dimensions and convergence tolerance for the oracle.

    ``tail_tol`` bounds the admissible population in the top two Fock
    levels of either mode; runs above it are reported as not converged.
    """

    dim_cav: int = 4
    dim_mech: int = 12
    tail_tol: float = 1e-6

    def __post_init__(self):
        if self.dim_cav < 2 or self.dim_mech < 2:
            raise InvalidParameterError(
                f"truncation dimensions must be >= 2, got "
                f"({self.dim_cav}, {self.dim_mech})")
        if self.dim_cav * self.dim_mech > 4096:
            raise InvalidParameterError(
                f"dim_cav*dim_mech={self.dim_cav * self.dim_mech} exceeds "
                "the desk-scale cap of 4096")
        if not (0.0 < self.tail_tol < 1.0):
            raise InvalidParameterError(
                f"tail_tol must be in (0, 1), got {self.tail_tol}")


@dataclass(frozen=True)
class OracleResult:
    """Steady-state expectations from the truncated Lindblad solve."""

    n_mech: float
    n_cav: float
    moments: np.ndarray
    tail_mass: float
    converged: bool


def _mode_operators(cfg: FockConfig):
    def destroy(dim):
        return sp.diags(np.sqrt(np.arange(1, dim)), 1, format="csr",
                        dtype=complex)

    id_cav = sp.identity(cfg.dim_cav, format="csr", dtype=complex)
    id_mech = sp.identity(cfg.dim_mech, format="csr", dtype=complex)
    a = sp.kron(destroy(cfg.dim_cav), id_mech, format="csr")
    b = sp.kron(id_cav, destroy(cfg.dim_mech), format="csr")
    return a, b


def _spre(op, dim):
    return sp.kron(op, sp.identity(dim, format="csr", dtype=complex),
                   format="csr")


def _spost(op, dim):
    return sp.kron(sp.identity(dim, format="csr", dtype=complex),
                   op.T, format="csr")


def _dissipator(op, dim):
    opd_op = (op.conjugate().T @ op).tocsr()
    return (sp.kron(op, op.conjugate(), format="csr")
            - 0.5 * _spre(opd_op, dim) - 0.5 * _spost(opd_op, dim))


def build_liouvillian(params: SystemParams, branch: SteadyStateBranch,
                      cfg: FockConfig) -> sp.csr_matrix:
    """Lindblad generator of the linearized model, as a sparse matrix acting
    on row-major vectorized density operators.

    The Hamiltonian combines the detuned cavity and mechanical oscillators,
    the pump-enhanced optomechanical coupling G = g*a_s to the mechanical
    position, and the quadrature squeeze term; dissipation enters through
    thermal cavity and mechanical baths at the configured occupations.

    Raises
    ------
    NoStationaryStateError
        If the linearized model around ``branch`` is not stable.
    DimensionCapError
        If the dense null-space solve would exceed the desk-scale cap.
    """
    verdict, eig = stability(linearize(params, branch))
    if verdict != STABLE:
        raise NoStationaryStateError(
            f"branch is {verdict} (leading eigenvalue {eig[0]!r}); the "
            "oracle targets stationary states only")
    dim = cfg.dim_cav * cfg.dim_mech
    if dim * dim > _DENSE_CAP * _DENSE_CAP:
        raise DimensionCapError(
            f"Liouvillian dimension {dim * dim} exceeds the dense-solver "
            f"cap {_DENSE_CAP * _DENSE_CAP}")

    a, b = _mode_operators(cfg)
    G = params.g * branch.a_s
    xi = params.xi
    x_b = b + b.conjugate().T
    H = (branch.delta_eff * (a.conjugate().T @ a)
         + params.delta * (b.conjugate().T @ b)
         - (G.conjugate() * a + G * a.conjugate().T) @ x_b
         + 0.5j * (xi.conjugate() * (b @ b)
                   - xi * (b.conjugate().T @ b.conjugate().T)))
    H = H.tocsr()

    lv = -1j * (_spre(H, dim) - _spost(H, dim))
    lv = lv + params.kappa * (params.n_th_cav + 1.0) * _dissipator(a, dim)
    lv = lv + params.kappa * params.n_th_cav * _dissipator(
        a.conjugate().T.tocsr(), dim)
    lv = lv + params.gamma_m * (params.n_th_m + 1.0) * _dissipator(b, dim)
    lv = lv + params.gamma_m * params.n_th_m * _dissipator(
        b.conjugate().T.tocsr(), dim)
    return lv.tocsr()


def steady_expectations(liouvillian, cfg: FockConfig) -> OracleResult:
    """Stationary expectations from the Liouvillian null space.

    The density operator is the right singular direction of the smallest
    singular value, phase-fixed, Hermitized, and trace-normalized.
    ``converged`` reflects whether the top-two-level population of both
    modes stayed within ``cfg.tail_tol``.

    Raises
    ------
    DegenerateSteadyStateError
        If the null space is not one-dimensional at working tolerance.
    """
    dense = liouvillian.toarray() if sp.issparse(liouvillian) else \
        np.asarray(liouvillian, dtype=complex)
    dim = cfg.dim_cav * cfg.dim_mech
    if dense.shape != (dim * dim, dim * dim):
        raise InvalidParameterError(
            f"Liouvillian shape {dense.shape} does not match config "
            f"dimensions ({dim * dim})")
    _, svals, vh = scipy.linalg.svd(dense, check_finite=False,
                                    lapack_driver="gesdd")
    scale = svals[0]
    if svals[-2] <= 1e-10 * scale:
        raise DegenerateSteadyStateError(
            f"second-smallest singular value {svals[-2]:g} is numerically "
            f"zero (scale {scale:g}); steady state is degenerate")
    rho = vh[-1].conj().reshape(dim, dim)
    tr = np.trace(rho)
    if abs(tr) < 1e-12:
        raise DegenerateSteadyStateError(
            "null-space direction is traceless; no normalizable steady state")
    rho = rho * (abs(tr) / tr)
    rho = 0.5 * (rho + rho.conjugate().T)
    rho = rho / np.trace(rho).real

    populations = np.diag(rho).real.reshape(cfg.dim_cav, cfg.dim_mech)
    tail_cav = populations[-2:, :].sum()
    tail_mech = populations[:, -2:].sum()
    tail_mass = float(max(tail_cav, tail_mech))

    a, b = _mode_operators(cfg)
    ops = [op.toarray() for op in
           (a, a.conjugate().T, b, b.conjugate().T)]
    moments = np.empty((4, 4), dtype=complex)
    for i in range(4):
        for j in range(4):
            moments[i, j] = np.trace(rho @ ops[i] @ ops[j])
    moments.setflags(write=False)
    return OracleResult(
        n_mech=float(moments[3, 2].real),
        n_cav=float(moments[1, 0].real),
        moments=moments,
        tail_mass=tail_mass,
        converged=bool(tail_mass <= cfg.tail_tol),
    )


def converged_oracle(params: SystemParams, branch: SteadyStateBranch,
                     cfg: FockConfig, attempts: int = 3):
    """Run the oracle, growing truncation dimensions until converged.

    Returns ``(result, final_config)``; the last attempt is returned even if
    still unconverged (its ``converged`` flag tells).
    """
    if attempts < 1:
        raise InvalidParameterError(f"attempts must be >= 1, got {attempts}")
    result = None
    for attempt in range(attempts):
        lv = build_liouvillian(params, branch, cfg)
        result = steady_expectations(lv, cfg)
        if result.converged or attempt == attempts - 1:
            break
        cfg = FockConfig(
            dim_cav=cfg.dim_cav + 2,
            dim_mech=int(math.ceil(cfg.dim_mech * 1.5)),
            tail_tol=cfg.tail_tol,
        )
    return result, cfg
