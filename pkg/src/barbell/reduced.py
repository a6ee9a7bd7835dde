"""The reduced five-dimensional dynamics in invariant coordinates.

Coordinates (s3, s4, s5, s6, s7) are the last five localized invariant
generators restricted to the constraint manifold (where the first two are
pinned to 1 and 0).  The squared radii of the two particles become
r1 = (1+s4)^2 + s5^2 and r0 = s4^2 + s5^2.

The system is Hamiltonian for an induced Poisson bracket whose structure
matrix has constant rank four; the reduced angular momentum j is a first
integral and allows one further reduction onto its level sets.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import numerics
from .full_system import Params
from .potentials import PotentialModel, eval_energy, eval_uprime

__all__ = [
    "ReducedState",
    "LevelSetState",
    "reduced_rhs",
    "structure_matrix",
    "structure_matrix_gradient",
    "jacobi_residual",
    "reduced_hamiltonian",
    "grad_reduced_hamiltonian",
    "first_integral_j",
    "grad_first_integral_j",
    "bracket_consistency_check",
    "levelset_from_reduced",
    "reduced_from_levelset",
    "levelset_rhs",
    "integrate_reduced",
]


@dataclass(frozen=True)
class ReducedState:
    """Point of the reduced phase space."""

    s3: float
    s4: float
    s5: float
    s6: float
    s7: float

    def as_vector(self) -> np.ndarray:
        return np.array([self.s3, self.s4, self.s5, self.s6, self.s7])

    @classmethod
    def from_vector(cls, vec) -> "ReducedState":
        return cls(*(float(x) for x in np.asarray(vec, dtype=float).reshape(5)))

    def squared_radii(self) -> tuple[float, float]:
        """Squared radii (r1, r0) of the first and second particle."""
        r0 = self.s4 * self.s4 + self.s5 * self.s5
        r1 = (1.0 + self.s4) ** 2 + self.s5 * self.s5
        return r1, r0


def _coords(s) -> tuple[float, float, float, float, float]:
    if isinstance(s, ReducedState):
        return s.s3, s.s4, s.s5, s.s6, s.s7
    return tuple(float(x) for x in np.asarray(s, dtype=float).reshape(5))


def reduced_rhs(s, params: Params, pot: PotentialModel) -> np.ndarray:
    """Right-hand side (ds3 .. ds7) of the reduced equations of motion."""
    s3, s4, s5, s6, s7 = _coords(s)
    r1 = (1.0 + s4) ** 2 + s5 * s5
    r0 = s4 * s4 + s5 * s5
    up1 = eval_uprime(pot, r1)
    up0 = eval_uprime(pot, r0)
    f1 = params.mass_fraction_1
    f2 = params.mass_fraction_2
    return np.array(
        [
            -2.0 * (up1 - up0) * s5,
            s3 * s5 + s6,
            -s3 * s4 + s7,
            -2.0 * f1 * up1 * (1.0 + s4) - 2.0 * f2 * up0 * s4 + f1 * s3 * s3 + s3 * s7,
            -2.0 * up0 * s5 - s3 * s6,
        ]
    )


def structure_matrix(s, params: Params) -> np.ndarray:
    """Antisymmetric structure matrix of the induced Poisson bracket.

    Entries are the pairwise brackets of the coordinates, computed from the
    Dirac brackets of the invariant generators on the constraint manifold.
    """
    s3, s4, s5, s6, s7 = _coords(s)
    m2 = params.m2
    inv2m = 1.0 / (2.0 * params.half_reduced_mass)  # = (m1+m2)/(m1*m2)
    twom = 2.0 * params.half_reduced_mass
    p = np.zeros((5, 5))
    p[0, 1] = -s5 * inv2m
    p[0, 2] = 1.0 / m2 + s4 * inv2m
    p[0, 3] = -s3 / m2 - s7 * inv2m
    p[0, 4] = s6 * inv2m
    p[1, 3] = 1.0 / (params.m1 + m2)
    p[1, 4] = -s5 / m2
    p[2, 4] = (1.0 + s4) / m2
    p[3, 4] = -twom * s3 / (m2 * m2) - s7 / m2
    return p - p.T


def structure_matrix_gradient(params: Params) -> np.ndarray:
    """Constant tensor G[l, i, j] = d(structure_matrix[i, j]) / d s_{l+3}.

    The entries are affine in the coordinates, so the gradient does not
    depend on the evaluation point.
    """
    m2 = params.m2
    inv2m = 1.0 / (2.0 * params.half_reduced_mass)
    twom = 2.0 * params.half_reduced_mass
    g = np.zeros((5, 5, 5))
    g[0, 0, 3] = -1.0 / m2
    g[0, 3, 4] = -twom / (m2 * m2)
    g[1, 0, 2] = inv2m
    g[1, 2, 4] = 1.0 / m2
    g[2, 0, 1] = -inv2m
    g[2, 1, 4] = -1.0 / m2
    g[3, 0, 4] = inv2m
    g[4, 0, 3] = -inv2m
    g[4, 3, 4] = -1.0 / m2
    for l in range(5):
        g[l] = g[l] - g[l].T
    return g


def jacobi_residual(s, params: Params) -> float:
    """Max cyclic-sum residual of the Jacobi identity at a point."""
    p = structure_matrix(s, params)
    g = structure_matrix_gradient(params)
    t = np.einsum("il,ljk->ijk", p, g)
    resid = t + t.transpose(1, 2, 0) + t.transpose(2, 0, 1)
    return float(np.max(np.abs(resid)))


def reduced_hamiltonian(s, params: Params, pot: PotentialModel) -> float:
    """Reduced energy; requires the model to register U itself."""
    s3, s4, s5, s6, s7 = _coords(s)
    r1 = (1.0 + s4) ** 2 + s5 * s5
    r0 = s4 * s4 + s5 * s5
    kinetic = 0.5 * params.m1 * (s3 * s3 + 2.0 * s3 * s7 + s6 * s6 + s7 * s7)
    kinetic += 0.5 * params.m2 * (s6 * s6 + s7 * s7)
    return kinetic + params.m1 * eval_energy(pot, r1) + params.m2 * eval_energy(pot, r0)


def grad_reduced_hamiltonian(s, params: Params, pot: PotentialModel) -> np.ndarray:
    """Analytic gradient of the reduced energy."""
    s3, s4, s5, s6, s7 = _coords(s)
    r1 = (1.0 + s4) ** 2 + s5 * s5
    r0 = s4 * s4 + s5 * s5
    up1 = eval_uprime(pot, r1)
    up0 = eval_uprime(pot, r0)
    m1, m2 = params.m1, params.m2
    return np.array(
        [
            m1 * (s3 + s7),
            2.0 * m1 * up1 * (1.0 + s4) + 2.0 * m2 * up0 * s4,
            2.0 * s5 * (m1 * up1 + m2 * up0),
            (m1 + m2) * s6,
            m1 * s3 + (m1 + m2) * s7,
        ]
    )


def first_integral_j(s, params: Params) -> float:
    """Reduced angular momentum, constant along the reduced flow."""
    s3, s4, s5, s6, s7 = _coords(s)
    return params.m1 * (s3 + s7 + s3 * s4) + params.total * (s4 * s7 - s5 * s6)


def grad_first_integral_j(s, params: Params) -> np.ndarray:
    s3, s4, s5, s6, s7 = _coords(s)
    m1, mt = params.m1, params.total
    return np.array(
        [
            m1 * (1.0 + s4),
            m1 * s3 + mt * s7,
            -mt * s6,
            -mt * s5,
            m1 + mt * s4,
        ]
    )


def bracket_consistency_check(s, params: Params, pot: PotentialModel) -> float:
    """Max-norm of reduced_rhs minus structure_matrix times grad of energy."""
    f = reduced_rhs(s, params, pot)
    pg = structure_matrix(s, params) @ grad_reduced_hamiltonian(s, params, pot)
    return float(np.max(np.abs(f - pg)))


# ---------------------------------------------------------------------------
# Level-set reduction to four dimensions


@dataclass(frozen=True)
class LevelSetState:
    """Point of the four-dimensional system on a level set j = j0.

    s3tilde = s3 + ((m1+m2)/m1) s7 completes the square in j, after which
    j = m1*s3tilde*(1+s4) - m2*s7 - (m1+m2)*s5*s6 and s7 can be recovered
    from the remaining coordinates on the level set.
    """

    s3tilde: float
    s4: float
    s5: float
    s6: float
    j0: float

    def as_vector(self) -> np.ndarray:
        return np.array([self.s3tilde, self.s4, self.s5, self.s6])


def levelset_from_reduced(s, params: Params) -> LevelSetState:
    """Map a reduced state onto the level set of its own j value."""
    s3, s4, s5, s6, s7 = _coords(s)
    s3t = s3 + (params.total / params.m1) * s7
    return LevelSetState(s3t, s4, s5, s6, first_integral_j(s, params))


def _recover_s7(ls: LevelSetState, params: Params) -> float:
    return (
        params.m1 * ls.s3tilde * (1.0 + ls.s4)
        - params.total * ls.s5 * ls.s6
        - ls.j0
    ) / params.m2


def reduced_from_levelset(ls: LevelSetState, params: Params) -> ReducedState:
    """Lift a level-set point back to the five-dimensional system."""
    s7 = _recover_s7(ls, params)
    s3 = ls.s3tilde - (params.total / params.m1) * s7
    return ReducedState(s3, ls.s4, ls.s5, ls.s6, s7)


def levelset_rhs(ls: LevelSetState, params: Params, pot: PotentialModel) -> np.ndarray:
    """Vector field (ds3tilde, ds4, ds5, ds6) induced on the level set."""
    s = reduced_from_levelset(ls, params)
    f = reduced_rhs(s, params, pot)
    ratio = params.total / params.m1
    return np.array([f[0] + ratio * f[4], f[1], f[2], f[3]])


def integrate_reduced(
    s0, params: Params, pot: PotentialModel, cfg: numerics.IntegratorConfig
) -> numerics.Trajectory:
    """Integrate the reduced equations of motion (no constraints remain)."""
    vec0 = s0.as_vector() if isinstance(s0, ReducedState) else np.asarray(s0, float)

    def rhs(t, y):
        return reduced_rhs(y, params, pot)

    return numerics.integrate(rhs, vec0, cfg)
