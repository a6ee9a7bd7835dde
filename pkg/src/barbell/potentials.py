"""Central-force laws evaluated as functions of the squared radius.

Every evaluator in this package takes the squared distance r = <x, x> from
the force center, never the distance itself.  A force law is described by
the derivatives U' and U'' of its radial profile; U itself is optional and
only needed for energy bookkeeping (Hamiltonians), not for the dynamics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

from .errors import DomainError, NotApplicable

__all__ = [
    "PotentialModel",
    "harmonic",
    "gravitational",
    "custom",
    "power_law",
    "eval_uprime",
    "eval_udoubleprime",
    "eval_energy",
]


@dataclass(frozen=True)
class PotentialModel:
    """A central-force law with squared-radius evaluators.

    Attributes
    ----------
    kind : str
        "harmonic", "gravitational2d" or "custom".
    uprime, udoubleprime : callable
        U' and U'' as functions of the squared radius.
    energy : callable or None
        U itself; required only by energy evaluations.
    domain_min : float
        Smallest admissible squared radius.
    open_domain : bool
        If true the bound is strict (r > domain_min), as for the
        gravitational law, which is singular at the origin.
    uprime_monotone : str or None
        "increasing" or "decreasing" when U' is declared strictly
        monotone.  Gates the equal-distance equilibrium branch.
    meta : dict
        Constructor parameters, echoed into reports.
    """

    kind: str
    uprime: Callable[[float], float]
    udoubleprime: Callable[[float], float]
    energy: Callable[[float], float] | None = None
    domain_min: float = 0.0
    open_domain: bool = False
    uprime_monotone: str | None = None
    meta: dict = field(default_factory=dict)

    def admissible(self, r: float) -> bool:
        """Whether the squared radius r lies in the model's domain."""
        if self.open_domain:
            return r > self.domain_min
        return r >= self.domain_min


def _check_domain(pot: PotentialModel, r: float) -> None:
    if not pot.admissible(r):
        raise DomainError(
            f"squared radius {r!r} is outside the domain of the {pot.kind} potential"
        )


def eval_uprime(pot: PotentialModel, r: float) -> float:
    """U'(r) with domain checking; r is the squared radius."""
    _check_domain(pot, r)
    return pot.uprime(r)


def eval_udoubleprime(pot: PotentialModel, r: float) -> float:
    """U''(r) with domain checking; r is the squared radius."""
    _check_domain(pot, r)
    return pot.udoubleprime(r)


def eval_energy(pot: PotentialModel, r: float) -> float:
    """U(r) with domain checking; raises NotApplicable if U is unregistered."""
    if pot.energy is None:
        raise NotApplicable(
            f"{pot.kind} potential does not register U itself; "
            "energy-dependent features are unavailable"
        )
    _check_domain(pot, r)
    return pot.energy(r)


def harmonic(gamma: float) -> PotentialModel:
    """Harmonic attraction: U(r) = gamma * r, so U' is the constant gamma."""
    if gamma <= 0:
        raise ValueError(f"harmonic strength must be positive, got {gamma}")
    g = float(gamma)
    return PotentialModel(
        kind="harmonic",
        uprime=lambda r: g,
        udoubleprime=lambda r: 0.0,
        energy=lambda r: g * r,
        domain_min=0.0,
        open_domain=False,
        uprime_monotone=None,  # constant U' is not strictly monotone
        meta={"gamma": g},
    )


def gravitational() -> PotentialModel:
    """Planar gravity: U'(r) = 1/r, U''(r) = -1/r^2, U(r) = log r, for r > 0.

    The additive constant of U is irrelevant to the dynamics and fixed to 0.
    """
    return PotentialModel(
        kind="gravitational2d",
        uprime=lambda r: 1.0 / r,
        udoubleprime=lambda r: -1.0 / (r * r),
        energy=math.log,
        domain_min=0.0,
        open_domain=True,
        uprime_monotone="decreasing",
        meta={},
    )


def custom(
    uprime: Callable[[float], float],
    udoubleprime: Callable[[float], float],
    energy: Callable[[float], float] | None = None,
    domain_min: float = 0.0,
    open_domain: bool = False,
    uprime_monotone: str | None = None,
    meta: dict | None = None,
) -> PotentialModel:
    """Wrap user-supplied U' and U'' callables as a potential model."""
    if uprime_monotone not in (None, "increasing", "decreasing"):
        raise ValueError(f"invalid monotonicity declaration {uprime_monotone!r}")
    return PotentialModel(
        kind="custom",
        uprime=uprime,
        udoubleprime=udoubleprime,
        energy=energy,
        domain_min=float(domain_min),
        open_domain=bool(open_domain),
        uprime_monotone=uprime_monotone,
        meta=dict(meta or {}),
    )


def power_law(coefficient: float, exponent: float) -> PotentialModel:
    """Custom model U(r) = a * r^k with derivatives filled in.

    With a > 0 and k > 1 this gives U' > 0 and U'' > 0, the textbook
    linearly stable case for the equal-distance equilibrium branch.
    """
    a = float(coefficient)
    k = float(exponent)
    curvature = a * k * (k - 1.0)
    if curvature > 0:
        monotone = "increasing"
    elif curvature < 0:
        monotone = "decreasing"
    else:
        monotone = None
    # U'' has a negative power of r unless k is at least 2 (or exactly 1).
    open_at_zero = (k < 2.0) and (k != 1.0)
    return PotentialModel(
        kind="custom",
        uprime=lambda r: a * k * r ** (k - 1.0),
        udoubleprime=lambda r: a * k * (k - 1.0) * r ** (k - 2.0),
        energy=lambda r: a * r**k,
        domain_min=0.0,
        open_domain=open_at_zero,
        uprime_monotone=monotone,
        meta={"form": "power", "coefficient": a, "exponent": k},
    )
