"""CSV and JSON emission with deterministic formatting.

Floats are written with 17 significant digits so identical runs produce
byte-identical files.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from . import full_system as fs
from . import invariants as inv
from . import reduced as red
from .full_system import Params
from .numerics import Trajectory
from .potentials import PotentialModel

__all__ = [
    "fmt",
    "write_json",
    "write_full_trajectory_csv",
    "write_reduced_trajectory_csv",
    "write_equilibria_csv",
]

FULL_HEADER = "t,u1,u2,v1,v2,z1,z2,w1,w2,c1,c2,H,J"
REDUCED_HEADER = "t,s3,s4,s5,s6,s7,h,j"
EQUILIBRIA_HEADER = "branch,parameter,s3,s4,s5,s6,s7,C1,C2,D,verdict,residual"


def fmt(x: float) -> str:
    return f"{float(x):.17g}"


def write_json(path, payload: dict) -> None:
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def write_full_trajectory_csv(
    path, traj: Trajectory, params: Params, pot: PotentialModel
) -> None:
    """One row per sample with constraints and conserved quantities appended."""
    lines = [FULL_HEADER]
    for t, y in zip(traj.t, traj.y):
        st = fs.FullState.from_vector(y)
        c1, c2 = fs.constraints(st)
        h = fs.hamiltonian(st, params, pot)
        j = fs.angular_momentum(st, params)
        cells = [t, *y, c1, c2, h, j]
        lines.append(",".join(fmt(c) for c in cells))
    Path(path).write_text("\n".join(lines) + "\n")


def write_reduced_trajectory_csv(
    path, traj: Trajectory, params: Params, pot: PotentialModel
) -> None:
    lines = [REDUCED_HEADER]
    for t, y in zip(traj.t, traj.y):
        h = red.reduced_hamiltonian(y, params, pot)
        j = red.first_integral_j(y, params)
        cells = [t, *y, h, j]
        lines.append(",".join(fmt(c) for c in cells))
    Path(path).write_text("\n".join(lines) + "\n")


def write_equilibria_csv(path, records) -> None:
    lines = [EQUILIBRIA_HEADER]
    for rec in records:
        s = rec.s.as_vector()
        cells = [
            rec.branch,
            "" if rec.parameter is None else fmt(rec.parameter),
            *(fmt(x) for x in s),
            fmt(rec.c1),
            fmt(rec.c2),
            fmt(rec.discriminant),
            rec.verdict,
            fmt(rec.residual),
        ]
        lines.append(",".join(cells))
    Path(path).write_text("\n".join(lines) + "\n")


def commutation_report(
    full_traj: Trajectory, reduced_traj: Trajectory, tol: float = 1e-6
) -> dict:
    """Sup-norm over time of the invariant image of the full trajectory
    against the independently integrated reduced trajectory."""
    sup = 0.0
    for y_full, y_red in zip(full_traj.y, reduced_traj.y):
        image = inv.eta_map(fs.FullState.from_vector(y_full))[2:]
        sup = max(sup, float(np.max(np.abs(image - y_red))))
    return {"sup_norm": sup, "samples": len(full_traj.t), "tolerance": tol, "passed": sup <= tol}
