"""Physical parameters and closed-form conversions.

Unit conventions used throughout the package:

* hbar = k_B = 1, and every rate/frequency is expressed in units of the
  mechanical frequency omega_m (so omega_m itself is 1 after construction).
* Temperatures are in units of hbar*omega_m/k_B.
* The pump amplitude eta is taken real and non-negative; a pump phase is a
  gauge choice absorbed into the cavity field and does not affect photon
  number, displacement, or spectra.
* The squeezing angle theta enters the dynamics only through the complex
  squeeze parameter r*exp(-2i*theta), which is pi-periodic in theta, so
  theta is stored reduced to [0, pi).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .errors import InvalidParameterError


def _reduce_angle(theta: float) -> float:
    # math.remainder is exact, so theta and theta + k*pi reduce to values
    # differing only by the rounding already present in the caller's sum
    t = math.remainder(theta, math.pi)
    if t < 0.0:
        t += math.pi
    if t >= math.pi:  # guard against remainder(x, pi) == -0.0 edge rounding
        t -= math.pi
    return t + 0.0


@dataclass(frozen=True)
class SystemParams:
    """Complete parameter set of the squeezed optomechanical model.

    All rates are in units of the mechanical frequency ``omega_m``.  If a
    different ``omega_m`` is supplied, every rate field is divided by it on
    construction and ``omega_m`` is reset to 1.

    Parameters
    ----------
    delta : float
        Effective mechanical frequency in the frame rotating at the
        parametric half-drive frequency.
    delta_c : float
        Laser-cavity detuning (cavity frequency minus laser frequency).
    kappa : float
        Total cavity energy decay rate (> 0).
    gamma_m : float
        Mechanical damping rate (> 0).
    g : float
        Single-photon optomechanical coupling (>= 0).
    eta : float
        Pump strength, real and non-negative.
    r : float
        Squeeze factor (>= 0).
    theta : float
        Squeezing angle in radians; reduced to [0, pi).
    n_th_m : float
        Mechanical bath thermal occupation (>= 0).
    n_th_cav : float
        Optical bath thermal occupation (>= 0).
    omega_m : float
        Mechanical frequency setting the unit scale; 1 after normalization.
    """

    delta: float
    delta_c: float
    kappa: float
    gamma_m: float
    g: float
    eta: float
    r: float
    theta: float
    n_th_m: float
    n_th_cav: float
    omega_m: float = 1.0

    def __post_init__(self):
        if not (self.omega_m > 0):
            raise InvalidParameterError(f"omega_m must be > 0, got {self.omega_m}")
        if self.omega_m != 1.0:
            scale = self.omega_m
            for name in ("delta", "delta_c", "kappa", "gamma_m", "g", "eta", "r"):
                object.__setattr__(self, name, getattr(self, name) / scale)
            object.__setattr__(self, "omega_m", 1.0)
        for name, val, strict in (
            ("kappa", self.kappa, True),
            ("gamma_m", self.gamma_m, True),
            ("g", self.g, False),
            ("eta", self.eta, False),
            ("r", self.r, False),
            ("n_th_m", self.n_th_m, False),
            ("n_th_cav", self.n_th_cav, False),
        ):
            if not math.isfinite(val):
                raise InvalidParameterError(f"{name} must be finite, got {val}")
            if strict and not val > 0:
                raise InvalidParameterError(f"{name} must be > 0, got {val}")
            if not strict and not val >= 0:
                raise InvalidParameterError(f"{name} must be >= 0, got {val}")
        for name in ("delta", "delta_c", "theta"):
            if not math.isfinite(getattr(self, name)):
                raise InvalidParameterError(
                    f"{name} must be finite, got {getattr(self, name)}")
        object.__setattr__(self, "theta", _reduce_angle(self.theta))

    @property
    def xi(self) -> complex:
        """Complex squeeze parameter r*exp(-2i*theta)."""
        return self.r * cmath.exp(-2j * self.theta)

    @property
    def r_critical(self) -> float:
        """Squeeze factor at which the bare mechanical mode loses stability."""
        return critical_squeeze(self)


@dataclass(frozen=True)
class ParametricDrive:
    """Spring-constant modulation drive of the mechanical resonator.

    ``k0`` is the free spring constant, ``kr`` the modulation amplitude (same
    units), and ``omega_m`` the mechanical frequency. Any consistent unit
    system is accepted; the derived squeeze factor carries omega_m's units.
    """

    k0: float
    kr: float
    omega_m: float

    def __post_init__(self):
        if not (math.isfinite(self.k0) and self.k0 > 0):
            raise InvalidParameterError(f"k0 must be > 0, got {self.k0}")
        if not (math.isfinite(self.kr) and self.kr >= 0):
            raise InvalidParameterError(f"kr must be >= 0, got {self.kr}")


def squeeze_factor_from_drive(drive: ParametricDrive) -> float:
    """Squeeze factor produced by a spring-constant modulation drive.

    Returns omega_m*kr/(4*k0), in the same frequency units as ``omega_m``.
    """
    if not (math.isfinite(drive.k0) and drive.k0 > 0):
        raise InvalidParameterError(f"k0 must be > 0, got {drive.k0}")
    return drive.omega_m * drive.kr / (4.0 * drive.k0)


def critical_squeeze(params: SystemParams) -> float:
    """Critical squeeze factor sqrt(delta**2 + gamma_m**2/4).

    At r = r_c the static displacement equation becomes singular and the
    bare (uncoupled) mechanical mode turns unstable.
    """
    return math.hypot(params.delta, params.gamma_m / 2.0)


def thermal_occupation(freq: float, temperature: float) -> float:
    """Bose-Einstein occupation of a mode at ``freq`` and ``temperature``.

    ``freq`` is in units of omega_m and ``temperature`` in hbar*omega_m/k_B;
    returns 1/(exp(freq/temperature) - 1), and 0 at zero temperature.
    """
    if not (math.isfinite(freq) and freq > 0):
        raise InvalidParameterError(f"freq must be > 0, got {freq}")
    if not (math.isfinite(temperature) and temperature >= 0):
        raise InvalidParameterError(
            f"temperature must be >= 0, got {temperature}")
    if temperature == 0.0:
        return 0.0
    return 1.0 / math.expm1(freq / temperature)


def effective_temperature(n_bar: float) -> float:
    """Detailed-balance temperature of a mode holding ``n_bar`` quanta.

    Returns 1/ln(1/n_bar + 1) in units of hbar*omega_m/k_B; 0 for an empty
    mode, strictly increasing in ``n_bar``.
    """
    if not (math.isfinite(n_bar) and n_bar >= 0):
        raise InvalidParameterError(f"n_bar must be >= 0, got {n_bar}")
    if n_bar == 0.0:
        return 0.0
    return 1.0 / math.log1p(1.0 / n_bar)
