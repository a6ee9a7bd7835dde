"""Complete dynamics of the constrained system in a harmonic field.

With constant U' = gamma the coordinate s3 = det(v, u) is a conserved
quantity sigma, and the remaining reduced equations in (s4, s5, s6, s7)
are affine with eigenvalues +/- i (sigma +/- sqrt(2 gamma)).  The ratio of
the two frequencies decides between periodic (rational ratio) and
quasiperiodic motion, with two exceptional regimes at sigma = 0 and
sigma^2 = 2 gamma.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import DegenerateInput
from .full_system import Params

__all__ = [
    "REGIME_NON_RESONANT",
    "REGIME_RESONANT",
    "REGIME_SIGMA_ZERO",
    "REGIME_SIGMA_SQUARED_EQUALS_2GAMMA",
    "HarmonicAnalysis",
    "harmonic_matrix",
    "classify_harmonic",
    "reconstruct_v",
    "rational_approximation",
    "resonant_return_time",
]

REGIME_NON_RESONANT = "non_resonant"
REGIME_RESONANT = "resonant"
REGIME_SIGMA_ZERO = "sigma_zero"
REGIME_SIGMA_SQUARED_EQUALS_2GAMMA = "sigma_squared_equals_2gamma"

_RATIONAL_MAX_DENOMINATOR = 64
_RATIONAL_TOL = 1e-9


def harmonic_matrix(sigma: float, gamma: float, params: Params):
    """Affine system matrix and inhomogeneity for fixed s3 = sigma.

    Returns (A, b) with d/dt (s4, s5, s6, s7) = A (s4, s5, s6, s7) + b.
    """
    if gamma <= 0:
        raise ValueError(f"harmonic strength must be positive, got {gamma}")
    a = np.array(
        [
            [0.0, sigma, 1.0, 0.0],
            [-sigma, 0.0, 0.0, 1.0],
            [-2.0 * gamma, 0.0, 0.0, sigma],
            [0.0, -2.0 * gamma, -sigma, 0.0],
        ]
    )
    b = np.array(
        [0.0, 0.0, (sigma * sigma - 2.0 * gamma) * params.mass_fraction_1, 0.0]
    )
    return a, b


def rational_approximation(
    x: float,
    max_denominator: int = _RATIONAL_MAX_DENOMINATOR,
    tol: float = _RATIONAL_TOL,
):
    """Best fraction p/q with q <= max_denominator, or None if not within tol.

    A numerical method cannot certify irrationality; a None result only
    means no small-denominator fraction matches to the given tolerance.
    """
    frac = Fraction(x).limit_denominator(max_denominator)
    if abs(x - float(frac)) <= tol:
        return frac.numerator, frac.denominator
    return None


def resonant_return_time(sigma: float, gamma: float, q: int) -> float:
    """Common period 2 pi q / |sigma + sqrt(2 gamma)| of a p/q resonance."""
    return 2.0 * math.pi * q / abs(sigma + math.sqrt(2.0 * gamma))


@dataclass
class HarmonicAnalysis:
    """Spectral and resonance data of the harmonic reduced flow."""

    sigma: float
    gamma: float
    eigenvalues: list = field(default_factory=list)  # four complex numbers
    omega: float | None = None  # frequency ratio, None when undefined
    omega_fraction: tuple | None = None  # (p, q) when resonant within tolerance
    regime: str = REGIME_NON_RESONANT
    stationary_point: np.ndarray | None = None  # None when non-unique
    stationary_set_dimension: int = 0
    period: float | None = None  # common period in the periodic regimes
    note: str = ""

    def to_json_dict(self) -> dict:
        return {
            "sigma": self.sigma,
            "gamma": self.gamma,
            "eigenvalues": [[ev.real, ev.imag] for ev in self.eigenvalues],
            "omega": self.omega,
            "omega_fraction": list(self.omega_fraction) if self.omega_fraction else None,
            "regime": self.regime,
            "stationary_point": (
                None if self.stationary_point is None else list(self.stationary_point)
            ),
            "stationary_set_dimension": self.stationary_set_dimension,
            "period": self.period,
            "note": self.note,
        }


def classify_harmonic(sigma: float, gamma: float, params: Params) -> HarmonicAnalysis:
    """Eigenvalues, stationary point and resonance regime for given sigma.

    The unique stationary point away from sigma^2 = 2 gamma is
    -(m1/(m1+m2)) (1, 0, 0, sigma): the rod is radial with the center of
    mass at the force center, rotating rigidly at angular speed |sigma|.
    At sigma^2 = 2 gamma the system is homogeneous of rank two and the
    stationary set is a plane.
    """
    if gamma <= 0:
        raise ValueError(f"harmonic strength must be positive, got {gamma}")
    sigma = float(sigma)
    gamma = float(gamma)
    root = math.sqrt(2.0 * gamma)
    eigs = [
        complex(0.0, sigma + root),
        complex(0.0, -(sigma + root)),
        complex(0.0, sigma - root),
        complex(0.0, -(sigma - root)),
    ]
    out = HarmonicAnalysis(sigma=sigma, gamma=gamma, eigenvalues=eigs)

    degenerate = abs(sigma * sigma - 2.0 * gamma) <= 1e-12 * max(1.0, 2.0 * gamma)
    if degenerate:
        out.regime = REGIME_SIGMA_SQUARED_EQUALS_2GAMMA
        out.stationary_point = None
        out.stationary_set_dimension = 2
        out.period = math.pi / root
        if sigma + root != 0.0:
            out.omega = (sigma - root) / (sigma + root)
        out.note = (
            "homogeneous system of rank two; stationary points form a plane and "
            "every non-stationary solution is periodic"
        )
        return out

    out.stationary_point = -params.mass_fraction_1 * np.array([1.0, 0.0, 0.0, sigma])
    if abs(sigma) <= 1e-12:
        out.regime = REGIME_SIGMA_ZERO
        out.omega = -1.0
        out.omega_fraction = (-1, 1)
        out.period = 2.0 * math.pi / root
        out.note = "semisimple double frequency; all non-constant solutions periodic"
        return out

    out.omega = (sigma - root) / (sigma + root)
    frac = rational_approximation(out.omega)
    if frac is not None:
        out.regime = REGIME_RESONANT
        out.omega_fraction = frac
        out.period = resonant_return_time(sigma, gamma, frac[1])
        out.note = (
            f"frequency ratio matches {frac[0]}/{frac[1]} within {_RATIONAL_TOL:g} "
            f"(continued fractions, max denominator {_RATIONAL_MAX_DENOMINATOR}); "
            "irrationality cannot be certified numerically"
        )
    else:
        out.regime = REGIME_NON_RESONANT
        out.note = (
            "no frequency ratio with denominator up to "
            f"{_RATIONAL_MAX_DENOMINATOR} within {_RATIONAL_TOL:g}; "
            "solutions are quasiperiodic if the ratio is irrational"
        )
    return out


def reconstruct_v(sigma: float, u) -> np.ndarray:
    """Relative velocity sigma * (u2, -u1) of a constrained state with s3 = sigma."""
    u = np.asarray(u, dtype=float).reshape(2)
    if abs(float(u @ u) - 1.0) > 1e-10:
        raise DegenerateInput("u must be a unit vector")
    return sigma * np.array([u[1], -u[0]])
