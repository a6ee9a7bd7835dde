"""The constrained two-mass system in the plane.

State variables are the relative coordinates (u, v, z, w): u = x - z is the
link vector between the particles (constrained to unit length), v = y - w
the relative velocity, and (z, w) position and velocity of the second
particle.  The constraints are c1 = <u,u> - 1 = 0 and c2 = <u,v> = 0.

The constrained equations of motion come from the Poisson-Dirac bracket
built on the canonical bracket weighted by the particle masses.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import numerics
from .errors import DegenerateInput
from .potentials import PotentialModel, eval_energy, eval_uprime

__all__ = [
    "Params",
    "FullState",
    "constraints",
    "hamiltonian",
    "atilde",
    "dirac_rhs",
    "angular_momentum",
    "project_to_constraints",
    "rotate_state",
    "random_constrained_state",
    "Observable",
    "coordinate_observable",
    "c1_observable",
    "c2_observable",
    "hamiltonian_observable",
    "angular_momentum_observable",
    "canonical_bracket",
    "dirac_bracket",
    "integrate_full",
]


@dataclass(frozen=True)
class Params:
    """Particle masses; every derived constant is a property."""

    m1: float
    m2: float

    def __post_init__(self):
        if self.m1 <= 0 or self.m2 <= 0:
            raise ValueError(f"masses must be positive, got {self.m1}, {self.m2}")

    @property
    def total(self) -> float:
        return self.m1 + self.m2

    @property
    def half_reduced_mass(self) -> float:
        """m1*m2 / (2*(m1+m2)); the inverse of the constraint-pair bracket."""
        return self.m1 * self.m2 / (2.0 * (self.m1 + self.m2))

    @property
    def mass_fraction_1(self) -> float:
        return self.m1 / (self.m1 + self.m2)

    @property
    def mass_fraction_2(self) -> float:
        return self.m2 / (self.m1 + self.m2)


@dataclass(frozen=True)
class FullState:
    """Phase point (u, v, z, w), each a 2-vector."""

    u: np.ndarray
    v: np.ndarray
    z: np.ndarray
    w: np.ndarray

    def __post_init__(self):
        for name in ("u", "v", "z", "w"):
            vec = np.array(getattr(self, name), dtype=float).reshape(2)
            object.__setattr__(self, name, vec)

    @property
    def x(self) -> np.ndarray:
        """Position of the first particle, u + z."""
        return self.u + self.z

    @property
    def y(self) -> np.ndarray:
        """Velocity of the first particle, v + w."""
        return self.v + self.w

    def as_vector(self) -> np.ndarray:
        return np.concatenate([self.u, self.v, self.z, self.w])

    @classmethod
    def from_vector(cls, vec) -> "FullState":
        vec = np.asarray(vec, dtype=float).reshape(8)
        return cls(vec[0:2], vec[2:4], vec[4:6], vec[6:8])


def _state(st) -> FullState:
    if isinstance(st, FullState):
        return st
    return FullState.from_vector(st)


def constraints(st) -> tuple[float, float]:
    """The pair (c1, c2) = (<u,u> - 1, <u,v>)."""
    st = _state(st)
    return float(st.u @ st.u - 1.0), float(st.u @ st.v)


def hamiltonian(st, params: Params, pot: PotentialModel) -> float:
    """Total energy; requires the model to register U itself."""
    st = _state(st)
    x, y = st.x, st.y
    kinetic = 0.5 * params.m1 * float(y @ y) + 0.5 * params.m2 * float(st.w @ st.w)
    potential = params.m1 * eval_energy(pot, float(x @ x)) + params.m2 * eval_energy(
        pot, float(st.z @ st.z)
    )
    return kinetic + potential


def atilde(st, pot: PotentialModel) -> float:
    """The constraint-force scalar of the equations of motion.

    <v,v> - 2 <u, U'(<u+z,u+z>)(u+z) - U'(<z,z>) z>.
    """
    st = _state(st)
    x = st.x
    up_x = eval_uprime(pot, float(x @ x))
    up_z = eval_uprime(pot, float(st.z @ st.z))
    return float(st.v @ st.v) - 2.0 * (up_x * float(st.u @ x) - up_z * float(st.u @ st.z))


def _rhs_flat(y, m1, m2, pot):
    """Equations of motion on a flat 8-vector; hot path for integration."""
    u1, u2, v1, v2, z1, z2, w1, w2 = y
    x1 = u1 + z1
    x2 = u2 + z2
    rx = x1 * x1 + x2 * x2
    rz = z1 * z1 + z2 * z2
    up_x = eval_uprime(pot, rx)
    up_z = eval_uprime(pot, rz)
    a = (v1 * v1 + v2 * v2) - 2.0 * (
        up_x * (u1 * x1 + u2 * x2) - up_z * (u1 * z1 + u2 * z2)
    )
    frac1 = m1 / (m1 + m2)
    return np.array(
        [
            v1,
            v2,
            -2.0 * up_x * x1 + 2.0 * up_z * z1 - a * u1,
            -2.0 * up_x * x2 + 2.0 * up_z * z2 - a * u2,
            w1,
            w2,
            -2.0 * up_z * z1 + frac1 * a * u1,
            -2.0 * up_z * z2 + frac1 * a * u2,
        ]
    )


def dirac_rhs(st, params: Params, pot: PotentialModel) -> np.ndarray:
    """Right-hand side (du, dv, dz, dw) of the constrained equations of motion."""
    return _rhs_flat(_state(st).as_vector(), params.m1, params.m2, pot)


def angular_momentum(st, params: Params) -> float:
    """Total angular momentum m1*det(y,x) + m2*det(w,z) with x = u+z, y = v+w."""
    st = _state(st)
    x, y = st.x, st.y
    return params.m1 * float(y[0] * x[1] - x[0] * y[1]) + params.m2 * float(
        st.w[0] * st.z[1] - st.z[0] * st.w[1]
    )


def project_to_constraints(st) -> FullState:
    """Return the state with u normalized and v orthogonalized against u."""
    st = _state(st)
    nsq = float(st.u @ st.u)
    if nsq < 1e-12:
        raise DegenerateInput("link vector is numerically zero; cannot project")
    u = st.u / math.sqrt(nsq)
    v = st.v - float(u @ st.v) * u
    return FullState(u, v, st.z, st.w)


def rotate_state(st, theta: float) -> FullState:
    """Apply the diagonal planar rotation to all four blocks."""
    st = _state(st)
    c, s = math.cos(theta), math.sin(theta)
    rot = np.array([[c, -s], [s, c]])
    return FullState(rot @ st.u, rot @ st.v, rot @ st.z, rot @ st.w)


def random_constrained_state(
    rng, position_scale: float = 1.0, velocity_scale: float = 1.0
) -> FullState:
    """Sample u on the unit circle, v orthogonal to u, z and w Gaussian."""
    ang = rng.uniform(0.0, 2.0 * math.pi)
    u = np.array([math.cos(ang), math.sin(ang)])
    v = velocity_scale * rng.standard_normal() * np.array([u[1], -u[0]])
    z = position_scale * rng.standard_normal(2)
    w = velocity_scale * rng.standard_normal(2)
    return project_to_constraints(FullState(u, v, z, w))


# ---------------------------------------------------------------------------
# Brackets


class Observable:
    """Scalar function of the full state, with an optional analytic gradient.

    Gradients are taken with respect to the flat (u, v, z, w) coordinates.
    Without an analytic gradient, central differences with step
    1e-6 * max(1, |coordinate|) are used.
    """

    def __init__(self, fn, gradient=None, name: str | None = None):
        self._fn = fn
        self._grad = gradient
        self.name = name or getattr(fn, "__name__", "observable")

    def __call__(self, st) -> float:
        return float(self._fn(_state(st)))

    def gradient_at(self, st) -> np.ndarray:
        st = _state(st)
        if self._grad is not None:
            return np.asarray(self._grad(st), dtype=float).reshape(8)
        vec = st.as_vector()
        grad = np.empty(8)
        for i in range(8):
            h = 1e-6 * max(1.0, abs(vec[i]))
            up = vec.copy()
            dn = vec.copy()
            up[i] += h
            dn[i] -= h
            grad[i] = (self._fn(FullState.from_vector(up)) - self._fn(FullState.from_vector(dn))) / (
                2.0 * h
            )
        return grad


def _as_observable(f) -> Observable:
    return f if isinstance(f, Observable) else Observable(f)


def coordinate_observable(index: int) -> Observable:
    grad = np.zeros(8)
    grad[index] = 1.0
    return Observable(
        lambda st: st.as_vector()[index], gradient=lambda st: grad, name=f"coord_{index}"
    )


def c1_observable() -> Observable:
    def grad(st):
        return np.concatenate([2.0 * st.u, np.zeros(6)])

    return Observable(lambda st: st.u @ st.u - 1.0, gradient=grad, name="c1")


def c2_observable() -> Observable:
    def grad(st):
        return np.concatenate([st.v, st.u, np.zeros(4)])

    return Observable(lambda st: st.u @ st.v, gradient=grad, name="c2")


def hamiltonian_observable(params: Params, pot: PotentialModel) -> Observable:
    def value(st):
        return hamiltonian(st, params, pot)

    def grad(st):
        x, y = st.x, st.y
        up_x = eval_uprime(pot, float(x @ x))
        up_z = eval_uprime(pot, float(st.z @ st.z))
        gu = 2.0 * params.m1 * up_x * x
        gv = params.m1 * y
        gz = 2.0 * params.m1 * up_x * x + 2.0 * params.m2 * up_z * st.z
        gw = params.m1 * y + params.m2 * st.w
        return np.concatenate([gu, gv, gz, gw])

    return Observable(value, gradient=grad, name="H")


def angular_momentum_observable(params: Params) -> Observable:
    def value(st):
        return angular_momentum(st, params)

    def grad(st):
        x, y = st.x, st.y
        rot = lambda a: np.array([-a[1], a[0]])  # 90 degree rotation
        gu = params.m1 * rot(y)
        gv = -params.m1 * rot(x)
        gz = params.m1 * rot(y) + params.m2 * rot(st.w)
        gw = -params.m1 * rot(x) - params.m2 * rot(st.z)
        return np.concatenate([gu, gv, gz, gw])

    return Observable(value, gradient=grad, name="J")


def canonical_bracket(f, g, st, params: Params) -> float:
    """Mass-weighted canonical bracket of two observables at a state.

    In the relative coordinates the bracket of gradients (fu, fv, fz, fw)
    and (gu, gv, gz, gw) reads

        k (<fu,gv> - <fv,gu>)
        + (1/m2) (<fv,gz> - <fz,gv> + <fz,gw> - <fw,gz> + <fw,gu> - <fu,gw>)

    with k = 1/m1 + 1/m2.
    """
    st = _state(st)
    gf = _as_observable(f).gradient_at(st)
    gg = _as_observable(g).gradient_at(st)
    fu, fv, fz, fw = gf[0:2], gf[2:4], gf[4:6], gf[6:8]
    gu, gv, gz, gw = gg[0:2], gg[2:4], gg[4:6], gg[6:8]
    kappa = 1.0 / params.m1 + 1.0 / params.m2
    out = kappa * (fu @ gv - fv @ gu)
    out += (fv @ gz - fz @ gv + fz @ gw - fw @ gz + fw @ gu - fu @ gw) / params.m2
    return float(out)


def dirac_bracket(f, g, st, params: Params) -> float:
    """Poisson-Dirac bracket: canonical bracket plus the constraint correction."""
    st = _state(st)
    f = _as_observable(f)
    g = _as_observable(g)
    c1 = c1_observable()
    c2 = c2_observable()
    base = canonical_bracket(f, g, st, params)
    f_c1 = canonical_bracket(f, c1, st, params)
    f_c2 = canonical_bracket(f, c2, st, params)
    c1_g = canonical_bracket(c1, g, st, params)
    c2_g = canonical_bracket(c2, g, st, params)
    m = params.half_reduced_mass
    return base + m * (f_c1 * c2_g - f_c2 * c1_g)


# ---------------------------------------------------------------------------
# Integration


def integrate_full(
    st0,
    params: Params,
    pot: PotentialModel,
    cfg: numerics.IntegratorConfig,
    project: bool = True,
    drift_tol: float = 1e-10,
) -> numerics.Trajectory:
    """Integrate the constrained equations of motion from a full state.

    When project is true, the constraint projection is applied after any
    accepted step whose constraint drift exceeds drift_tol.  The vector
    field preserves the constraints exactly only in exact arithmetic.
    """
    m1, m2 = params.m1, params.m2

    def rhs(t, y):
        return _rhs_flat(y, m1, m2, pot)

    post = None
    if project:

        def post(t, y):
            c1 = y[0] * y[0] + y[1] * y[1] - 1.0
            c2 = y[0] * y[2] + y[1] * y[3]
            if max(abs(c1), abs(c2)) <= drift_tol:
                return None
            return project_to_constraints(FullState.from_vector(y)).as_vector()

    return numerics.integrate(rhs, _state(st0).as_vector(), cfg, post_step=post)
