"""Relative equilibria of the reduced system and their linear stability.

Equilibria of the reduced equations correspond to steady rotations of the
rod about the force center.  The first reduced equation splits them into
two branches:

* radial branch (s5 = 0): the rod lies on a line through the center; the
  rotation rate follows from s4 by a closed formula.
* equal-distance branch (s5 != 0): for strictly monotone U' both particles
  sit at the same distance from the center, forcing s4 = -1/2.

For equal masses the excluded radial point s4 = -m1/(m1+m2) = -1/2 carries
its own one-parameter family with arbitrary rotation rate s3.

At every equilibrium the characteristic polynomial of the linearization is
t * (t^4 + C1 t^2 + C2), the zero root being forced by the first integral.
Stability is decided by the quadratic tau^2 + C1 tau + C2: two negative
real roots give four purely imaginary eigenvalues (linear stability).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import numerics
from .errors import DomainError, NotApplicable, SingularDenominator
from .full_system import Params
from .potentials import PotentialModel, eval_udoubleprime, eval_uprime
from .reduced import ReducedState, reduced_rhs

__all__ = [
    "BRANCH_RADIAL",
    "BRANCH_EQUAL_DISTANCE",
    "BRANCH_EQUAL_MASS",
    "VERDICT_STABLE",
    "VERDICT_UNSTABLE",
    "VERDICT_MARGINAL",
    "EquilibriumRecord",
    "BranchScan",
    "Interval",
    "jacobian_reduced",
    "chi_hat_from_jacobian",
    "classify_stability",
    "equilibria_radial",
    "equilibria_equal_distance",
    "equilibria_equal_mass",
    "chi_hat_equal_distance",
    "chi_hat_equal_mass",
    "gravitational_radial_s3_squared",
    "gravitational_radial_chi",
    "gravitational_d1_coefficients",
    "existence_intervals_gravitational",
    "scan_branch",
]

BRANCH_RADIAL = "radial"
BRANCH_EQUAL_DISTANCE = "equal_distance"
BRANCH_EQUAL_MASS = "equal_mass"

VERDICT_STABLE = "linearly_stable"
VERDICT_UNSTABLE = "unstable"
VERDICT_MARGINAL = "marginal"

_EIG_TOL = 1e-9  # magnitude below which a root counts as zero
_MASS_EQUAL_TOL = 1e-12


@dataclass
class EquilibriumRecord:
    """One relative equilibrium with its linearization data."""

    branch: str
    s: ReducedState
    s3_sign: int
    c1: float
    c2: float
    discriminant: float
    chi_roots: tuple
    eigenvalues: np.ndarray
    verdict: str
    residual: float
    parameter: float | None = None  # grid value that produced the record

    def to_json_dict(self) -> dict:
        return {
            "branch": self.branch,
            "parameter": self.parameter,
            "s": list(self.s.as_vector()),
            "s3_sign": self.s3_sign,
            "C1": self.c1,
            "C2": self.c2,
            "D": self.discriminant,
            "chi_roots": [[r.real, r.imag] for r in self.chi_roots],
            "eigenvalues": [[ev.real, ev.imag] for ev in self.eigenvalues],
            "verdict": self.verdict,
            "residual": self.residual,
        }


@dataclass
class BranchScan:
    """Result of sweeping one equilibrium branch over a parameter grid."""

    branch: str
    parameter_grid: np.ndarray
    records: list
    failures: list  # (parameter, kind, message)
    admissible_intervals: list  # merged runs of grid values carrying records


@dataclass(frozen=True)
class Interval:
    """Interval with individually open or closed endpoints."""

    lo: float
    hi: float
    lo_closed: bool = False
    hi_closed: bool = False

    def __contains__(self, x: float) -> bool:
        above = x >= self.lo if self.lo_closed else x > self.lo
        below = x <= self.hi if self.hi_closed else x < self.hi
        return above and below

    def describe(self) -> str:
        left = "[" if self.lo_closed else "("
        right = "]" if self.hi_closed else ")"
        return f"{left}{self.lo:g}, {self.hi:g}{right}"


# ---------------------------------------------------------------------------
# Linearization


def jacobian_reduced(s, params: Params, pot: PotentialModel) -> np.ndarray:
    """Analytic Jacobian of the reduced vector field."""
    if isinstance(s, ReducedState):
        s3, s4, s5, s6, s7 = s.s3, s.s4, s.s5, s.s6, s.s7
    else:
        s3, s4, s5, s6, s7 = (float(x) for x in np.asarray(s).reshape(5))
    r1 = (1.0 + s4) ** 2 + s5 * s5
    r0 = s4 * s4 + s5 * s5
    up1 = eval_uprime(pot, r1)
    up0 = eval_uprime(pot, r0)
    upp1 = eval_udoubleprime(pot, r1)
    upp0 = eval_udoubleprime(pot, r0)
    f1 = params.mass_fraction_1
    f2 = params.mass_fraction_2
    jac = np.zeros((5, 5))
    jac[0, 1] = -4.0 * s5 * (upp1 * (1.0 + s4) - upp0 * s4)
    jac[0, 2] = -2.0 * (up1 - up0) - 4.0 * s5 * s5 * (upp1 - upp0)
    jac[1] = (s5, 0.0, s3, 1.0, 0.0)
    jac[2] = (-s4, -s3, 0.0, 0.0, 1.0)
    jac[3, 0] = 2.0 * f1 * s3 + s7
    jac[3, 1] = (
        -4.0 * f1 * upp1 * (1.0 + s4) ** 2
        - 2.0 * f1 * up1
        - 4.0 * f2 * upp0 * s4 * s4
        - 2.0 * f2 * up0
    )
    jac[3, 2] = -4.0 * s5 * (f1 * upp1 * (1.0 + s4) + f2 * upp0 * s4)
    jac[3, 4] = s3
    jac[4, 0] = -s6
    jac[4, 1] = -4.0 * upp0 * s4 * s5
    jac[4, 2] = -2.0 * up0 - 4.0 * upp0 * s5 * s5
    jac[4, 3] = -s3
    return jac


def chi_hat_from_jacobian(jac) -> tuple[float, float, float]:
    """Quadratic coefficients (C1, C2) extracted from a Jacobian.

    At an equilibrium the characteristic polynomial is t(t^4 + C1 t^2 + C2);
    the even coefficients vanish.  Returns (C1, C2, spurious) where spurious
    is the largest of the coefficients that should be zero.
    """
    coeffs = np.poly(np.asarray(jac, dtype=float))
    coeffs = np.real_if_close(coeffs, tol=1e6)
    c4, c3, c2, c1, c0 = (float(np.real(c)) for c in coeffs[1:])
    spurious = max(abs(c4), abs(c2), abs(c0))
    return c3, c1, spurious


def classify_stability(c1: float, c2: float, tol: float = _EIG_TOL) -> str:
    """Stability verdict from the roots of tau^2 + C1 tau + C2.

    Linearly stable: both roots real and strictly negative, so the four
    nonzero eigenvalues are purely imaginary and distinct from zero.
    complex roots or a positive real root give eigenvalues with positive
    real part; a root at zero (within tol) is marginal.
    """
    roots, _ = numerics.quadratic_roots(c1, c2)
    if max(abs(r.imag) for r in roots) > tol:
        return VERDICT_UNSTABLE
    largest = max(r.real for r in roots)
    if largest > tol:
        return VERDICT_UNSTABLE
    if largest > -tol:
        return VERDICT_MARGINAL
    return VERDICT_STABLE


def _build_record(
    branch: str,
    s: ReducedState,
    s3_sign: int,
    params: Params,
    pot: PotentialModel,
    parameter: float | None = None,
) -> EquilibriumRecord:
    residual = float(np.max(np.abs(reduced_rhs(s, params, pot))))
    jac = jacobian_reduced(s, params, pot)
    eigs = numerics.eigenvalues(jac)
    c1, c2, _ = chi_hat_from_jacobian(jac)
    roots, disc = numerics.quadratic_roots(c1, c2)
    return EquilibriumRecord(
        branch=branch,
        s=s,
        s3_sign=s3_sign,
        c1=c1,
        c2=c2,
        discriminant=disc,
        chi_roots=roots,
        eigenvalues=eigs,
        verdict=classify_stability(c1, c2),
        residual=residual,
        parameter=parameter,
    )


# ---------------------------------------------------------------------------
# Radial branch (s5 = 0)


def radial_s3_squared(s4: float, params: Params, pot: PotentialModel) -> float:
    """Closed-form s3^2 on the radial branch; raises on the singular s4."""
    den = params.m1 + params.total * s4
    if abs(den) <= 1e-12 * params.total:
        raise SingularDenominator(
            f"s4 = {s4!r} makes the radial branch formula singular "
            "(equal masses carry their own family there)"
        )
    num = 2.0 * params.m1 * eval_uprime(pot, (1.0 + s4) ** 2) * (1.0 + s4)
    num += 2.0 * params.m2 * eval_uprime(pot, s4 * s4) * s4
    return num / den


def equilibria_radial(s4: float, params: Params, pot: PotentialModel) -> list:
    """Zero, one or two equilibria with s5 = 0 at the given s4.

    Records carry s5 = s6 = 0 and s7 = s3 * s4, with s3 = +/- sqrt of the
    branch formula; a negative value means no equilibrium at this s4.
    """
    s3_sq = radial_s3_squared(s4, params, pot)
    if s3_sq < 0.0:
        return []
    if s3_sq <= 1e-14:
        s = ReducedState(0.0, s4, 0.0, 0.0, 0.0)
        return [_build_record(BRANCH_RADIAL, s, 0, params, pot, parameter=s4)]
    out = []
    for sign in (1, -1):
        s3 = sign * math.sqrt(s3_sq)
        s = ReducedState(s3, s4, 0.0, 0.0, s3 * s4)
        out.append(_build_record(BRANCH_RADIAL, s, sign, params, pot, parameter=s4))
    return out


def gravitational_radial_s3_squared(s4: float, params: Params) -> float:
    """s3^2 = 2 (a s4 + m2) / ((1+s4) s4 (a s4 + m1)) for U'(r) = 1/r."""
    a = params.total
    return 2.0 * (a * s4 + params.m2) / ((1.0 + s4) * s4 * (a * s4 + params.m1))


def existence_intervals_gravitational(params: Params) -> list:
    """The s4 ranges carrying radial equilibria in the gravitational field."""
    f1 = params.mass_fraction_1
    f2 = params.mass_fraction_2
    outer = [Interval(-math.inf, -1.0), Interval(0.0, math.inf)]
    if abs(params.m1 - params.m2) <= _MASS_EQUAL_TOL * params.total:
        return [outer[0], outer[1]]
    if params.m1 > params.m2:
        middle = Interval(-f1, -f2, lo_closed=False, hi_closed=True)
    else:
        middle = Interval(-f2, -f1, lo_closed=True, hi_closed=False)
    return [outer[0], middle, outer[1]]


def gravitational_d1_coefficients(params: Params) -> tuple[float, float, float]:
    """Coefficients (alpha, beta, delta) of the quadratic D1 in s4."""
    m1, m2 = params.m1, params.m2
    alpha = 9.0 * m1 * m1 + 14.0 * m1 * m2 + 9.0 * m2 * m2
    beta = 6.0 * m1 * m1 + 14.0 * m1 * m2 + 12.0 * m2 * m2
    delta = m1 * m1 + 4.0 * m1 * m2 + 4.0 * m2 * m2
    return alpha, beta, delta


def gravitational_radial_chi(s4: float, params: Params) -> tuple[float, float, float]:
    """Closed-form (C1, C2, D) on the gravitational radial branch.

    D is returned as C1^2 - 4 C2; it factors as
    4 D1 (a s4 + m1)^2 / (s4^4 (1+s4)^4 a^2 (a s4 + m1)^2) with D1 the
    quadratic from gravitational_d1_coefficients, hence is nonnegative
    wherever defined and the quadratic has real roots.
    """
    m1, m2 = params.m1, params.m2
    a = params.total
    pole = a * s4 + m1
    if abs(s4) < 1e-12 or abs(1.0 + s4) < 1e-12 or abs(pole) <= 1e-12 * a:
        raise SingularDenominator(f"closed forms undefined at s4 = {s4!r}")
    n1 = (
        (8 * m1**2 + 16 * m1 * m2 + 8 * m2**2) * s4**3
        + (14 * m1**2 + 24 * m1 * m2 + 10 * m2**2) * s4**2
        + (8 * m1**2 + 8 * m1 * m2 + 4 * m2**2) * s4
        + 2 * m1**2
    )
    c1 = n1 / (s4**2 * a * (1.0 + s4) ** 2 * pole)
    n2 = (
        16 * a**3 * s4**6
        + (56 * m1**3 + 152 * m1**2 * m2 + 136 * m1 * m2**2 + 40 * m2**3) * s4**5
        + (72 * m1**3 + 160 * m1**2 * m2 + 120 * m1 * m2**2 + 32 * m2**3) * s4**4
        + (40 * m1**3 + 56 * m1**2 * m2 + 24 * m1 * m2**2 + 8 * m2**3) * s4**3
        + (8 * m1**3 - 12 * m1**2 * m2 - 20 * m1 * m2**2) * s4**2
        + (-16 * m1**2 * m2 - 8 * m1 * m2**2) * s4
        - 4 * m1**2 * m2
    )
    c2 = n2 / (s4**4 * (1.0 + s4) ** 4 * a * pole**2)
    return c1, c2, c1 * c1 - 4.0 * c2


# ---------------------------------------------------------------------------
# Equal-distance branch (s5 != 0)


def _require_monotone(pot: PotentialModel) -> None:
    if pot.uprime_monotone not in ("increasing", "decreasing"):
        raise NotApplicable(
            "equal-distance branch requires U' declared strictly monotone; "
            f"the {pot.kind} model declares {pot.uprime_monotone!r}"
        )


def equilibria_equal_distance(s5: float, params: Params, pot: PotentialModel) -> list:
    """Zero, one or two equilibria with the given s5 != 0.

    Strict monotonicity of U' pins s4 = -1/2 (both particles at the same
    distance from the center); then s3^2 = 2 U'(1/4 + s5^2), s6 = -s3 s5
    and s7 = -s3/2.  A repelling force (U' < 0 there) carries none.
    """
    _require_monotone(pot)
    if s5 == 0.0:
        raise ValueError("s5 must be nonzero on the equal-distance branch")
    up = eval_uprime(pot, 0.25 + s5 * s5)
    if up < 0.0:
        return []
    if 2.0 * up <= 1e-14:
        s = ReducedState(0.0, -0.5, s5, 0.0, 0.0)
        return [_build_record(BRANCH_EQUAL_DISTANCE, s, 0, params, pot, parameter=s5)]
    out = []
    for sign in (1, -1):
        s3 = sign * math.sqrt(2.0 * up)
        s = ReducedState(s3, -0.5, s5, -s3 * s5, -0.5 * s3)
        out.append(
            _build_record(BRANCH_EQUAL_DISTANCE, s, sign, params, pot, parameter=s5)
        )
    return out


def chi_hat_equal_distance(s5: float, pot: PotentialModel) -> tuple[float, float, float]:
    """Closed-form (C1, C2, D) on the equal-distance branch.

    D = (U'' + 8 U')^2 at 1/4 + s5^2 is a perfect square, so the quadratic
    always has real roots there.
    """
    r = 0.25 + s5 * s5
    up = eval_uprime(pot, r)
    upp = eval_udoubleprime(pot, r)
    c1 = upp * (8.0 * s5 * s5 + 1.0) + 8.0 * up
    c2 = upp * upp * (16.0 * s5**4 + 4.0 * s5 * s5) + 32.0 * upp * up * s5 * s5
    d = (upp + 8.0 * up) ** 2
    return c1, c2, d


# ---------------------------------------------------------------------------
# Equal-mass family


def equilibria_equal_mass(s3: float, params: Params, pot: PotentialModel) -> EquilibriumRecord:
    """The equal-mass radial equilibrium with arbitrary rotation rate s3.

    Both particles sit at distance 1/2 on opposite sides of the center:
    s = (s3, -1/2, 0, 0, -s3/2).
    """
    if abs(params.m1 - params.m2) > _MASS_EQUAL_TOL * params.total:
        raise NotApplicable("equal-mass family requires m1 = m2")
    sign = 0 if s3 == 0.0 else (1 if s3 > 0 else -1)
    s = ReducedState(s3, -0.5, 0.0, 0.0, -0.5 * s3)
    return _build_record(BRANCH_EQUAL_MASS, s, sign, params, pot, parameter=s3)


def chi_hat_equal_mass(s3: float, pot: PotentialModel) -> tuple[float, float, float]:
    """Closed-form (C1, C2, D) for the equal-mass family.

    Evaluated at squared radius 1/4: C1 = 2 s3^2 + K with K = U'' + 4 U',
    C2 = s3^4 - s3^2 K + 2 U'' U' + 4 U'^2, D = 8 s3^2 K + U''^2.
    """
    up = eval_uprime(pot, 0.25)
    upp = eval_udoubleprime(pot, 0.25)
    k = upp + 4.0 * up
    c1 = 2.0 * s3 * s3 + k
    c2 = s3**4 - s3 * s3 * k + 2.0 * upp * up + 4.0 * up * up
    d = 8.0 * s3 * s3 * k + upp * upp
    return c1, c2, d


# ---------------------------------------------------------------------------
# Branch scanning


_BRANCH_FREE = {
    # indices of the variables Newton may move and of the equations it solves
    BRANCH_RADIAL: ((0, 3, 4), (1, 2, 3)),
    BRANCH_EQUAL_DISTANCE: ((0, 3, 4), (1, 2, 4)),
    BRANCH_EQUAL_MASS: ((3, 4), (1, 2)),
}


def _newton_polish(
    s: ReducedState,
    branch: str,
    params: Params,
    pot: PotentialModel,
    tol: float = 1e-13,
    max_iter: int = 20,
) -> ReducedState:
    """Refine a closed-form equilibrium in the branch's free coordinates.

    The closed forms are exact for the built-in laws, so this is a no-op
    guard that matters only for custom potentials.
    """
    free, eqs = _BRANCH_FREE[branch]
    vec = s.as_vector()

    def residual(x):
        full = vec.copy()
        full[list(free)] = x
        return reduced_rhs(full, params, pot)[list(eqs)]

    def jac(x):
        full = vec.copy()
        full[list(free)] = x
        return jacobian_reduced(full, params, pot)[np.ix_(list(eqs), list(free))]

    solution = numerics.newton_solve(residual, jac, vec[list(free)], tol=tol, max_iter=max_iter)
    vec[list(free)] = solution
    return ReducedState.from_vector(vec)


_GRAV_POLE_RADIUS = 1e-6


def _grid_exclusions(branch: str, params: Params, pot: PotentialModel) -> list:
    if branch == BRANCH_RADIAL and pot.kind == "gravitational2d":
        return [0.0, -1.0, -params.mass_fraction_1, -params.mass_fraction_2]
    if branch == BRANCH_RADIAL:
        return [-params.mass_fraction_1]
    if branch == BRANCH_EQUAL_DISTANCE:
        return [0.0]
    return []


def scan_branch(
    branch: str,
    grid,
    params: Params,
    pot: PotentialModel,
    polish: bool = True,
) -> BranchScan:
    """Evaluate one equilibrium branch over a parameter grid.

    The grid parameter is s4 on the radial branch, s5 on the equal-distance
    branch, and s3 for the equal-mass family.  Per-point failures (domain
    errors, singular denominators, excluded pole neighborhoods) are
    collected without aborting the scan.  Each record is re-polished by a
    Newton iteration restricted to the branch's free coordinates.
    """
    if branch not in _BRANCH_FREE:
        raise ValueError(f"unknown branch {branch!r}")
    grid = np.asarray(grid, dtype=float)
    exclusions = _grid_exclusions(branch, params, pot)
    records: list = []
    failures: list = []
    masses_equal = abs(params.m1 - params.m2) <= _MASS_EQUAL_TOL * params.total
    produced = np.zeros(len(grid), dtype=bool)

    for idx, value in enumerate(grid):
        near_pole = any(abs(value - p) < _GRAV_POLE_RADIUS for p in exclusions)
        if near_pole and branch == BRANCH_RADIAL and abs(
            value + params.mass_fraction_1
        ) < _GRAV_POLE_RADIUS:
            kind = "singular_denominator"
            message = (
                "radial formula singular at s4 = -m1/(m1+m2); "
                + (
                    "the equal-mass family covers this point (scan branch "
                    "'equal_mass' over s3)"
                    if masses_equal
                    else "no radial equilibrium exists here for unequal masses"
                )
            )
            failures.append((float(value), kind, message))
            continue
        if near_pole:
            failures.append(
                (float(value), "excluded", "grid point inside an excluded pole neighborhood")
            )
            continue
        try:
            if branch == BRANCH_RADIAL:
                recs = equilibria_radial(float(value), params, pot)
            elif branch == BRANCH_EQUAL_DISTANCE:
                recs = equilibria_equal_distance(float(value), params, pot)
            else:
                recs = [equilibria_equal_mass(float(value), params, pot)]
        except SingularDenominator as exc:
            failures.append((float(value), "singular_denominator", str(exc)))
            continue
        except DomainError as exc:
            failures.append((float(value), "domain_error", str(exc)))
            continue
        if polish:
            polished = []
            for rec in recs:
                try:
                    s_ref = _newton_polish(rec.s, branch, params, pot)
                except Exception as exc:  # keep scanning; report the point
                    failures.append((float(value), "polish_failure", str(exc)))
                    continue
                polished.append(
                    _build_record(branch, s_ref, rec.s3_sign, params, pot, rec.parameter)
                )
            recs = polished
        if recs:
            produced[idx] = True
            records.extend(recs)

    intervals = _merge_runs(grid, produced)
    return BranchScan(
        branch=branch,
        parameter_grid=grid,
        records=records,
        failures=failures,
        admissible_intervals=intervals,
    )


def _merge_runs(grid: np.ndarray, flags: np.ndarray) -> list:
    """Consecutive grid runs where records exist, as (lo, hi) pairs."""
    runs = []
    start = None
    for value, ok in zip(grid, flags):
        if ok and start is None:
            start = value
        if not ok and start is not None:
            runs.append((float(start), float(prev)))
            start = None
        if ok:
            prev = value
    if start is not None:
        runs.append((float(start), float(prev)))
    return runs
