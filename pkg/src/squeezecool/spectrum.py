"""Phonon-number noise spectra and their frequency integral.

Fourier convention: f(w) = integral dt exp(i*w*t) f(t), under which the
fluctuation vector responds to input noise through the susceptibility
chi(w) = (-i*w*I - M)^-1 and input correlators read
<n_k(w) n_l(w')> = 2*pi*D_kl*delta(w + w').  The phonon-number spectral
density is evaluated as

    S_n(w) = sum_kl chi[3, k](-w) * D[k, l] * chi[2, l](w)

(creation row 3, annihilation row 2 of the 4-component fluctuation vector),
whose (1/2pi)-integral over the real line equals the stationary phonon
number <db+ db>.  This orientation places the bare thermal resonance at
+delta; the mirror image w -> -w integrates to the same occupation.  The
equality against the Lyapunov moments is enforced by tests over randomized
stable parameter sets, which pins the convention independently of any
derivation.

For unstable models the same algebra is still evaluated ("formal" spectra,
flagged and warned about): the physical deep-squeezing regime relies on
external stabilization, and the formal curve is the quantity to report.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from . import kernels
from .dynamics import LinearModel, MARGINAL, STABLE, linearize, select_default_branch, stability
from .errors import (AccuracyError, DegenerateDenominatorError,
                     InvalidParameterError, SingularFrequencyError,
                     SqueezecoolError)
from .params import SystemParams, effective_temperature
from .steady import steady_states

_BDAG_ROW = 3
_B_ROW = 2

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(15)

SPECTRUM_SWEEP_AXES = ("r", "theta")


class FormalSpectrumWarning(UserWarning):
    """Emitted when a spectrum is evaluated for a model without a
    stationary state."""


@dataclass(frozen=True)
class GridSpec:
    """Frequency-domain controls for spectrum evaluation.

    ``omega_max`` bounds the integration window [-omega_max, omega_max];
    None selects 10x the largest rate/detuning in the model.  ``rel_tol``
    and ``max_panels`` control the adaptive quadrature; ``backbone_points``
    and ``peak_points`` shape the emitted curve grid (uniform backbone plus
    log-dense clusters around detected resonances).
    """

    omega_max: Optional[float] = None
    rel_tol: float = 1e-6
    max_panels: int = 100_000
    backbone_points: int = 801
    peak_points: int = 24
    peak_span: float = 10.0

    def __post_init__(self):
        if self.omega_max is not None and not (
                math.isfinite(self.omega_max) and self.omega_max > 0):
            raise InvalidParameterError(
                f"omega_max must be > 0, got {self.omega_max}")
        if not (0 < self.rel_tol < 1):
            raise InvalidParameterError(
                f"rel_tol must be in (0, 1), got {self.rel_tol}")
        if self.max_panels < 16:
            raise InvalidParameterError(
                f"max_panels must be >= 16, got {self.max_panels}")
        if self.backbone_points < 2 or self.peak_points < 2:
            raise InvalidParameterError("grid point counts must be >= 2")
        if not (self.peak_span > 0):
            raise InvalidParameterError(
                f"peak_span must be > 0, got {self.peak_span}")


@dataclass(frozen=True)
class Spectrum:
    """Sampled spectral curve plus its integrated occupation.

    ``n_bar`` comes from adaptive quadrature with an analytic 1/w^2 tail
    correction, not from the emitted curve samples.  ``formal`` marks curves
    computed for a model without a stationary state.
    """

    omega: np.ndarray
    s_n: np.ndarray
    n_bar: float
    t_eff: float
    formal: bool


@dataclass(frozen=True)
class SpectrumPoint:
    """One row of a spectrum sweep; ``error`` flags failed points."""

    value: float
    spectrum: Optional[Spectrum]
    branch: Optional[object] = None
    error: Optional[str] = None


def _required_omega_max(model: LinearModel) -> float:
    # every rate entering the bound is recoverable from the drift matrix
    kappa = -2.0 * model.M[0, 0].real
    delta = -model.M[2, 2].imag
    r = abs(model.M[2, 3])
    delta_eff = -model.M[0, 0].imag
    return 10.0 * max(kappa, abs(delta), r, abs(delta_eff), 1.0)


def _resolve_omega_max(model: LinearModel, grid: GridSpec) -> float:
    bound = _required_omega_max(model)
    if grid.omega_max is None:
        return bound
    if grid.omega_max < bound:
        raise InvalidParameterError(
            f"omega_max={grid.omega_max} is below the required window "
            f"{bound:g} (10x the largest rate in the model)")
    return grid.omega_max


def _to_real(values: np.ndarray) -> np.ndarray:
    scale = np.abs(values.real).max() if values.size else 0.0
    residue = np.abs(values.imag).max() if values.size else 0.0
    if residue > 1e-10 * max(scale, 1.0):
        raise AccuracyError(
            f"spectrum values have imaginary residue {residue:g} "
            f"(scale {scale:g}); drift/diffusion symmetry is broken",
            estimate=values.real, bound=residue)
    return values.real


def susceptibility(model: LinearModel, omega: float) -> np.ndarray:
    """Susceptibility chi(omega) = (-i*omega*I - M)^-1.

    Raises
    ------
    SingularFrequencyError
        If -i*omega lies within 1e-12 of a drift eigenvalue.
    """
    eig = np.linalg.eigvals(model.M)
    dist = np.abs(eig + 1j * omega).min()
    if dist <= 1e-12:
        raise SingularFrequencyError(
            f"omega={omega} coincides with an undamped resonance "
            f"(eigenvalue distance {dist:g})")
    n = model.M.shape[0]
    return np.linalg.inv(-1j * omega * np.eye(n) - model.M)


def s_n_at(model: LinearModel, omega: float) -> float:
    """Phonon-number spectral density at a single frequency.

    Warns with ``FormalSpectrumWarning`` when the model is unstable; the
    value is then the formal continuation of the stable-side algebra.
    """
    eig = np.linalg.eigvals(model.M)
    for w in (omega, -omega):
        if np.abs(eig + 1j * w).min() <= 1e-12:
            raise SingularFrequencyError(
                f"omega={omega} coincides with an undamped resonance")
    verdict, _ = stability(model)
    if verdict != STABLE:
        warnings.warn(
            f"model is {verdict}; returning the formal spectral density",
            FormalSpectrumWarning, stacklevel=2)
    value = kernels.spectrum_batch(model.M, model.D, np.array([omega]),
                                   _BDAG_ROW, _B_ROW)
    return float(_to_real(value)[0])


def _panel_integrals(model: LinearModel, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Fixed-order Gauss-Legendre integral of S_n over each panel [a_i, b_i]."""
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    nodes = mid[:, None] + half[:, None] * _GL_NODES[None, :]
    vals = kernels.spectrum_batch(model.M, model.D, nodes.ravel(),
                                  _BDAG_ROW, _B_ROW)
    vals = _to_real(vals).reshape(nodes.shape)
    return half * (vals @ _GL_WEIGHTS)


def _seed_breakpoints(model: LinearModel, omega_max: float) -> np.ndarray:
    """Symmetric initial partition: coarse backbone plus clusters around
    every resonance frequency of the drift matrix."""
    pts = [np.linspace(0.0, omega_max, 9)]
    eig = np.linalg.eigvals(model.M)
    for lam in eig:
        center = abs(lam.imag)
        width = max(abs(lam.real), 1e-12)
        local = center + width * np.array([-10.0, -1.0, 0.0, 1.0, 10.0])
        pts.append(local)
    half = np.concatenate(pts)
    half = half[(half > 0.0) & (half < omega_max)]
    full = np.unique(np.concatenate([[-omega_max, 0.0, omega_max],
                                     half, -half]))
    # collapse breakpoints closer than float resolution of the window
    keep = np.concatenate([[True], np.diff(full) > 1e-14 * omega_max])
    return full[keep]


def _adaptive_quadrature(model: LinearModel, omega_max: float,
                         grid: GridSpec):
    """Globally adaptive bisection with a fixed-order panel rule.

    Returns (integral, error_bound, panels_evaluated, exhausted); panels are
    accepted when the parent/children disagreement fits a width-proportional
    share of the global tolerance.
    """
    bps = _seed_breakpoints(model, omega_max)
    a = bps[:-1]
    b = bps[1:]
    vals = _panel_integrals(model, a, b)
    evaluated = len(a)
    accepted_sum = 0.0
    accepted_err = 0.0
    width_total = 2.0 * omega_max
    min_width = 1e-15 * omega_max

    while a.size:
        if evaluated > grid.max_panels:
            best = accepted_sum + float(vals.sum())
            bound = accepted_err + float(np.abs(vals).sum())
            return best, bound, evaluated, True
        mid = 0.5 * (a + b)
        left = _panel_integrals(model, a, mid)
        right = _panel_integrals(model, mid, b)
        evaluated += 2 * a.size
        refined = left + right
        err = np.abs(vals - refined)
        running = accepted_sum + float(refined.sum())
        tol_global = grid.rel_tol * max(abs(running), 1e-300)
        share = tol_global * (b - a) / width_total
        done = (err <= share) | ((b - a) <= min_width)
        accepted_sum += float(refined[done].sum())
        accepted_err += float(err[done].sum())
        keep = ~done
        a = np.concatenate([a[keep], mid[keep]])
        b = np.concatenate([mid[keep], b[keep]])
        vals = np.concatenate([left[keep], right[keep]])
    return accepted_sum, accepted_err, evaluated, False


def _tail_coefficient(model: LinearModel, omega_max: float, sign: float) -> float:
    """Least-squares c of the model S ~ c/w^2 over the last decade."""
    w = sign * np.geomspace(omega_max / 10.0, omega_max, 17)
    s = _to_real(kernels.spectrum_batch(model.M, model.D, w,
                                        _BDAG_ROW, _B_ROW))
    inv2 = w.astype(float) ** -2.0
    return float((s * inv2).sum() / (inv2 * inv2).sum())


def _emitted_grid(model: LinearModel, omega_max: float,
                  grid: GridSpec) -> np.ndarray:
    pts = [np.linspace(-omega_max, omega_max, grid.backbone_points)]
    for lam in np.linalg.eigvals(model.M):
        center = abs(lam.imag)
        width = max(abs(lam.real), 1e-9 * omega_max)
        offsets = np.geomspace(0.05 * width, grid.peak_span * width,
                               grid.peak_points)
        cluster = np.concatenate([-offsets[::-1], [0.0], offsets])
        pts.extend([center + cluster, -center + cluster])
    out = np.unique(np.concatenate(pts))
    return out[(out >= -omega_max) & (out <= omega_max)]


def integrate_occupation(model: LinearModel,
                         grid: GridSpec = GridSpec()) -> Spectrum:
    """Spectral curve, integrated occupation, and effective temperature.

    The occupation is (1/2pi) times the adaptive-quadrature integral over
    [-omega_max, omega_max] plus an analytic c/omega_max tail correction
    fitted per side over the last decade.

    Raises
    ------
    SingularFrequencyError
        If the model is marginal (resonances sit on the integration path).
    AccuracyError
        If the panel budget is exhausted before reaching ``rel_tol``; the
        exception carries the best occupation estimate and an error bound.
    """
    verdict, _ = stability(model)
    if verdict == MARGINAL:
        raise SingularFrequencyError(
            "model is marginally stable: undamped resonances lie on the "
            "integration path")
    formal = verdict != STABLE
    if formal:
        warnings.warn(
            "model is unstable; computing the formal spectrum",
            FormalSpectrumWarning, stacklevel=2)
    omega_max = _resolve_omega_max(model, grid)
    integral, err, _evaluated, exhausted = _adaptive_quadrature(
        model, omega_max, grid)
    tail = (_tail_coefficient(model, omega_max, +1.0)
            + _tail_coefficient(model, omega_max, -1.0)) / omega_max
    n_bar = (integral + tail) / (2.0 * math.pi)
    if exhausted:
        raise AccuracyError(
            f"quadrature used more than {grid.max_panels} panels without "
            f"reaching rel_tol={grid.rel_tol:g}",
            estimate=n_bar, bound=(err + abs(tail)) / (2.0 * math.pi))
    n_bar = max(n_bar, 0.0)
    omega = _emitted_grid(model, omega_max, grid)
    s_n = _to_real(kernels.spectrum_batch(model.M, model.D, omega,
                                          _BDAG_ROW, _B_ROW))
    omega.setflags(write=False)
    s_n.setflags(write=False)
    return Spectrum(omega=omega, s_n=s_n, n_bar=n_bar,
                    t_eff=effective_temperature(n_bar), formal=formal)


def spectrum_sweep(params: SystemParams, axis: str, values,
                   grid: GridSpec = GridSpec(),
                   branch_index: Optional[int] = None) -> list:
    """Spectra along a squeeze-factor or squeezing-angle sweep.

    Each point resolves its own steady state (default branch unless
    ``branch_index`` is given), linearizes, and integrates.  Failed points
    are flagged rows, never a sweep abort; order follows ``values``.
    """
    if axis not in SPECTRUM_SWEEP_AXES:
        raise InvalidParameterError(
            f"axis must be one of {SPECTRUM_SWEEP_AXES}, got {axis!r}")
    values = [float(v) for v in values]
    if not values:
        raise InvalidParameterError("sweep values must be non-empty")
    rows = []
    for value in values:
        point = replace(params, **{axis: value})
        rows.append(spectrum_point(point, value=value, grid=grid,
                                   branch_index=branch_index))
    return rows


def spectrum_point(params: SystemParams, value: float = float("nan"),
                   grid: GridSpec = GridSpec(),
                   branch_index: Optional[int] = None) -> SpectrumPoint:
    """Single-parameter-set spectrum row with flagged failure modes."""
    try:
        branches = steady_states(params)
        branch = select_default_branch(params, branches,
                                       branch_index=branch_index)
        model = linearize(params, branch)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", FormalSpectrumWarning)
            spec = integrate_occupation(model, grid)
        return SpectrumPoint(value=value, spectrum=spec, branch=branch)
    except DegenerateDenominatorError:
        return SpectrumPoint(value=value, spectrum=None,
                             error="singular-point")
    except SingularFrequencyError:
        return SpectrumPoint(value=value, spectrum=None,
                             error="singular-frequency")
    except AccuracyError:
        return SpectrumPoint(value=value, spectrum=None, error="accuracy")
    except SqueezecoolError as exc:
        return SpectrumPoint(value=value, spectrum=None,
                             error=type(exc).__name__)
