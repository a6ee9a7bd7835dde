"""Runtime verification suites behind the command-line "check" command.

Each check draws deterministic random points, measures a residual that the
theory says vanishes (or a rank the theory pins), and reports pass/fail
with the worst residual observed.
"""

from __future__ import annotations

import numpy as np

from . import full_system as fs
from . import invariants as inv
from . import numerics, reduced
from .full_system import Params
from .potentials import PotentialModel

__all__ = ["run_all_checks"]


def _random_reduced_points(rng, pot, count, span=1.4, min_radius=0.05):
    """Admissible reduced states, resampled away from the potential's domain edge."""
    points = []
    while len(points) < count:
        s = rng.uniform(-span, span, 5)
        r1 = (1.0 + s[1]) ** 2 + s[2] ** 2
        r0 = s[1] ** 2 + s[2] ** 2
        if pot.admissible(r1) and pot.admissible(r0) and min(r1, r0) >= min_radius:
            points.append(s)
    return points


def _check_generator_roundtrip(rng, count=1000, tol=1e-12):
    worst = 0.0
    for _ in range(count):
        vec = rng.uniform(-2.0, 2.0, 8)
        norm = np.hypot(vec[0], vec[1])
        if norm < 0.3:  # keep <u,u> inside the chart
            vec[0:2] *= 0.3 / max(norm, 1e-9)
        st = fs.FullState.from_vector(vec)
        direct = inv.rho_map(st)
        rebuilt = inv.reconstruct_rho(inv.eta_map(st))
        err = np.max(np.abs(rebuilt - direct) / np.maximum(1.0, np.abs(direct)))
        worst = max(worst, float(err))
    return {"passed": worst <= tol, "max_residual": worst, "points": count, "tol": tol}


def _check_structure_antisymmetry(rng, params, count=200, corrupt=False):
    worst = 0.0
    for _ in range(count):
        s = rng.uniform(-1.5, 1.5, 5)
        p = reduced.structure_matrix(s, params)
        if corrupt:
            p = p.copy()
            p[0, 1] += 1e-3
        worst = max(worst, float(np.max(np.abs(p + p.T))))
    return {"passed": worst == 0.0, "max_residual": worst, "points": count, "tol": 0.0}


def _check_structure_rank(rng, params, count=1000, corrupt=False):
    histogram: dict[int, int] = {}
    for i in range(count):
        s = rng.uniform(-1.5, 1.5, 5)
        if i % 10 == 0:
            s[1] = -1.0  # exercise the slice where one bracket entry vanishes
        p = reduced.structure_matrix(s, params)
        if corrupt:
            p = p.copy()
            p[:, 4] = 0.0
            p[4, :] = 0.0
        rank = numerics.matrix_rank(p)
        histogram[rank] = histogram.get(rank, 0) + 1
    passed = set(histogram) == {4}
    return {
        "passed": passed,
        "max_residual": 0.0 if passed else 1.0,
        "points": count,
        "rank_histogram": {str(k): v for k, v in sorted(histogram.items())},
    }


def _check_induced_jacobi(rng, params, count=200, tol=1e-9, corrupt=False):
    worst = 0.0
    grad = reduced.structure_matrix_gradient(params)
    for _ in range(count):
        s = rng.uniform(-1.5, 1.5, 5)
        p = reduced.structure_matrix(s, params)
        if corrupt:
            p = p.copy()
            p[0, 1] += 1e-3
            p[1, 0] -= 1e-3
        t = np.einsum("il,ljk->ijk", p, grad)
        resid = t + t.transpose(1, 2, 0) + t.transpose(2, 0, 1)
        worst = max(worst, float(np.max(np.abs(resid))))
    return {"passed": worst <= tol, "max_residual": worst, "points": count, "tol": tol}


def _check_constraint_brackets(rng, params, pot, count=200, tol=1e-10):
    h_obs = fs.hamiltonian_observable(params, pot)
    c1 = fs.c1_observable()
    c2 = fs.c2_observable()
    expected_c1c2 = 2.0 * params.total / (params.m1 * params.m2)
    worst = 0.0
    worst_pair = 0.0
    for _ in range(count):
        st = fs.random_constrained_state(rng)
        worst = max(worst, abs(fs.dirac_bracket(c1, h_obs, st, params)))
        worst = max(worst, abs(fs.dirac_bracket(c2, h_obs, st, params)))
        pair = fs.canonical_bracket(c1, c2, st, params)
        worst_pair = max(worst_pair, abs(pair - expected_c1c2))
    passed = worst <= tol and worst_pair <= 1e-12
    return {
        "passed": passed,
        "max_residual": worst,
        "constraint_pair_residual": worst_pair,
        "points": count,
        "tol": tol,
    }


def _check_momentum_energy_bracket(rng, params, pot, count=200, tol=1e-10):
    worst = 0.0
    for s in _random_reduced_points(rng, pot, count):
        gj = reduced.grad_first_integral_j(s, params)
        gh = reduced.grad_reduced_hamiltonian(s, params, pot)
        p = reduced.structure_matrix(s, params)
        worst = max(worst, abs(float(gj @ (p @ gh))))
    return {"passed": worst <= tol, "max_residual": worst, "points": count, "tol": tol}


def _check_rhs_consistency(rng, params, pot, count=200, tol=1e-12, corrupt=False):
    worst = 0.0
    for s in _random_reduced_points(rng, pot, count):
        if corrupt:
            p = reduced.structure_matrix(s, params).copy()
            p[0, 1] += 1e-3
            gh = reduced.grad_reduced_hamiltonian(s, params, pot)
            resid = float(np.max(np.abs(reduced.reduced_rhs(s, params, pot) - p @ gh)))
        else:
            resid = reduced.bracket_consistency_check(s, params, pot)
        worst = max(worst, resid)
    return {"passed": worst <= tol, "max_residual": worst, "points": count, "tol": tol}


def run_all_checks(
    params: Params,
    pot: PotentialModel,
    seed: int = 0,
    corrupt_structure: bool = False,
) -> dict:
    """Run every verification suite and report per-check residuals.

    corrupt_structure is a testing hook: it perturbs the structure matrix
    inside the structure-based checks, which must then fail.
    """
    rng = np.random.default_rng(seed)
    checks = {
        "generator_roundtrip": _check_generator_roundtrip(rng),
        "structure_antisymmetry": _check_structure_antisymmetry(
            rng, params, corrupt=corrupt_structure
        ),
        "structure_rank": _check_structure_rank(rng, params, corrupt=corrupt_structure),
        "induced_jacobi": _check_induced_jacobi(rng, params, corrupt=corrupt_structure),
        "constraint_brackets": _check_constraint_brackets(rng, params, pot),
        "momentum_energy_bracket": _check_momentum_energy_bracket(rng, params, pot),
        "rhs_consistency": _check_rhs_consistency(
            rng, params, pot, corrupt=corrupt_structure
        ),
    }
    return {
        "seed": seed,
        "corrupt_structure": corrupt_structure,
        "checks": checks,
        "all_pass": all(c["passed"] for c in checks.values()),
    }
