"""Polynomial invariants of the diagonal planar rotation action.

The invariant algebra of the simultaneous rotation of (u, v, z, w) is
generated by sixteen quadratics: the four squared norms, the six pairwise
scalar products and six pairwise determinants.  On the chart where
<u,u> is invertible, the seven "localized" generators

    e1 = <u,u>,  e2 = <u,v>,  e3 = det(v,u),  e4 = <u,z>,
    e5 = det(z,u),  e6 = <u,w>,  e7 = det(w,u)

generate everything else rationally, with only powers of e1 in
denominators.  On the constraint manifold e1 = 1 and e2 = 0, so the last
five components (e3..e7) serve as coordinates of the reduced system.
"""

from __future__ import annotations

import numpy as np

from .errors import ConstraintViolation, LocalizationError
from .full_system import FullState

__all__ = [
    "rho_map",
    "eta_map",
    "eta_jacobian",
    "reconstruct_rho",
    "reduced_coordinates",
    "constrained_representative",
    "DOT_PAIRS",
    "DET_PAIRS",
]

# Single source of truth for index order and determinant orientation.
# rho_1..rho_4 are <u,u>, <v,v>, <z,z>, <w,w>; then the scalar products in
# DOT_PAIRS order (rho_5..rho_10) and determinants det(a,b) = a1*b2 - a2*b1
# in DET_PAIRS order (rho_11..rho_16).  Note the final determinant is
# det(z,w), anchored differently from the five u/v-anchored ones.
DOT_PAIRS = (("u", "v"), ("u", "z"), ("u", "w"), ("v", "z"), ("v", "w"), ("z", "w"))
DET_PAIRS = (("v", "u"), ("z", "u"), ("w", "u"), ("z", "v"), ("w", "v"), ("z", "w"))


def _det(a, b) -> float:
    return float(a[0] * b[1] - a[1] * b[0])


def rho_map(st) -> np.ndarray:
    """All sixteen generators, as a vector indexed rho_1..rho_16 at [0..15]."""
    st = st if isinstance(st, FullState) else FullState.from_vector(st)
    blocks = {"u": st.u, "v": st.v, "z": st.z, "w": st.w}
    out = np.empty(16)
    for i, name in enumerate(("u", "v", "z", "w")):
        out[i] = blocks[name] @ blocks[name]
    for i, (a, b) in enumerate(DOT_PAIRS):
        out[4 + i] = blocks[a] @ blocks[b]
    for i, (a, b) in enumerate(DET_PAIRS):
        out[10 + i] = _det(blocks[a], blocks[b])
    return out


def eta_map(st, require_constrained: bool = False, tol: float = 1e-8) -> np.ndarray:
    """The seven localized generators (e1..e7) at a state.

    With require_constrained, raises ConstraintViolation unless e1 is 1
    and e2 is 0 within tol.
    """
    st = st if isinstance(st, FullState) else FullState.from_vector(st)
    u, v, z, w = st.u, st.v, st.z, st.w
    eta = np.array(
        [
            u @ u,
            u @ v,
            _det(v, u),
            u @ z,
            _det(z, u),
            u @ w,
            _det(w, u),
        ]
    )
    if require_constrained and (abs(eta[0] - 1.0) > tol or abs(eta[1]) > tol):
        raise ConstraintViolation(
            f"state is off the constraint manifold: <u,u>-1={eta[0]-1.0:.3e}, "
            f"<u,v>={eta[1]:.3e}"
        )
    return eta


def eta_jacobian(st) -> np.ndarray:
    """Jacobian (7 x 8) of eta_map with respect to (u, v, z, w)."""
    st = st if isinstance(st, FullState) else FullState.from_vector(st)
    u, v, z, w = st.u, st.v, st.z, st.w
    jac = np.zeros((7, 8))
    jac[0, 0:2] = 2.0 * u
    jac[1, 0:2] = v
    jac[1, 2:4] = u
    jac[2, 0:2] = (-v[1], v[0])
    jac[2, 2:4] = (u[1], -u[0])
    jac[3, 0:2] = z
    jac[3, 4:6] = u
    jac[4, 0:2] = (-z[1], z[0])
    jac[4, 4:6] = (u[1], -u[0])
    jac[5, 0:2] = w
    jac[5, 6:8] = u
    jac[6, 0:2] = (-w[1], w[0])
    jac[6, 6:8] = (u[1], -u[0])
    return jac


def reconstruct_rho(eta) -> np.ndarray:
    """Rebuild all sixteen generators from the seven localized ones.

    Valid on the chart e1 != 0; raises LocalizationError otherwise.  The
    nine reconstructed components are rational with denominator e1.
    """
    e1, e2, e3, e4, e5, e6, e7 = (float(x) for x in np.asarray(eta).reshape(7))
    if abs(e1) < 1e-12:
        raise LocalizationError("first generator <u,u> vanishes; outside the chart")
    rho = np.empty(16)
    rho[0] = e1
    rho[4] = e2
    rho[10] = e3
    rho[5] = e4
    rho[11] = e5
    rho[6] = e6
    rho[12] = e7
    rho[1] = (e2 * e2 + e3 * e3) / e1  # <v,v>
    rho[2] = (e4 * e4 + e5 * e5) / e1  # <z,z>
    rho[3] = (e6 * e6 + e7 * e7) / e1  # <w,w>
    rho[7] = (e2 * e4 + e3 * e5) / e1  # <v,z>
    rho[8] = (e2 * e6 + e3 * e7) / e1  # <v,w>
    rho[9] = (e4 * e6 + e5 * e7) / e1  # <z,w>
    rho[13] = (e2 * e5 - e3 * e4) / e1  # det(z,v)
    rho[14] = (e2 * e7 - e3 * e6) / e1  # det(w,v)
    rho[15] = (e5 * e6 - e4 * e7) / e1  # det(z,w); sign fixed by DET_PAIRS order
    return rho


def reduced_coordinates(st, tol: float = 1e-8) -> np.ndarray:
    """The five reduced coordinates (e3..e7) of a constrained state."""
    return eta_map(st, require_constrained=True, tol=tol)[2:]


def constrained_representative(s) -> FullState:
    """A full state on the constraint manifold mapping to given coordinates.

    The section fixes the rotational freedom by u = (1, 0); then
    v = (0, -s3), z = (s4, -s5), w = (s6, -s7) reproduce (e3..e7) = s
    with e1 = 1 and e2 = 0.
    """
    s3, s4, s5, s6, s7 = (float(x) for x in np.asarray(s).reshape(5))
    return FullState(
        u=np.array([1.0, 0.0]),
        v=np.array([0.0, -s3]),
        z=np.array([s4, -s5]),
        w=np.array([s6, -s7]),
    )
