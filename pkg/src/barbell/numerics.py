"""Shared numerical engine.

Adaptive embedded Runge-Kutta integration (Dormand-Prince 5(4)) with an
optional post-step hook, dense eigenvalue computation for small matrices,
numerically stable quadratic roots, SVD-based rank, and Newton refinement.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConvergenceFailure, DomainError, StepSizeUnderflow

__all__ = [
    "IntegratorConfig",
    "Trajectory",
    "integrate",
    "eigenvalues",
    "quadratic_roots",
    "matrix_rank",
    "newton_solve",
]


@dataclass
class IntegratorConfig:
    """Settings for one integration run.

    sample_count equally spaced output times are produced on t_span,
    including both endpoints (a single sample falls on t0).
    """

    t_span: tuple[float, float]
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    max_step: float = math.inf
    sample_count: int = 201

    def __post_init__(self):
        t0, t1 = self.t_span
        if not t1 > t0:
            raise ValueError(f"t_span must be increasing, got {self.t_span}")
        if self.rel_tol <= 0 or self.abs_tol <= 0:
            raise ValueError("tolerances must be positive")
        if self.max_step <= 0:
            raise ValueError("max_step must be positive")
        if self.sample_count < 1:
            raise ValueError("sample_count must be at least 1")


@dataclass
class Trajectory:
    """Sampled solution: times t (n,) and states y (n, dim)."""

    t: np.ndarray
    y: np.ndarray
    stats: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.t)


# Dormand-Prince 5(4) tableau.  The seventh stage is the first stage of the
# next step (FSAL), so an accepted step costs six new evaluations.
_DP_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_DP_A = [
    np.array([]),
    np.array([1 / 5]),
    np.array([3 / 40, 9 / 40]),
    np.array([44 / 45, -56 / 15, 32 / 9]),
    np.array([19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729]),
    np.array([9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656]),
    np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84]),
]
_DP_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
# b5 - b4: weights of the embedded error estimate.
_DP_E = np.array(
    [71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40]
)

_MIN_FACTOR = 0.2
_MAX_FACTOR = 10.0
_SAFETY = 0.9


def _error_norm(err, y_old, y_new, rtol, atol):
    scale = atol + rtol * np.maximum(np.abs(y_old), np.abs(y_new))
    return math.sqrt(float(np.mean((err / scale) ** 2)))


def _initial_step(f0, y0, t0, t1, rtol, atol, max_step):
    scale = atol + rtol * np.abs(y0)
    d0 = math.sqrt(float(np.mean((y0 / scale) ** 2)))
    d1 = math.sqrt(float(np.mean((f0 / scale) ** 2)))
    if d0 < 1e-5 or d1 < 1e-5:
        h = 1e-6 * (t1 - t0)
    else:
        h = 0.01 * d0 / d1
    return min(h, t1 - t0, max_step)


def integrate(rhs, y0, cfg: IntegratorConfig, post_step=None) -> Trajectory:
    """Integrate dy/dt = rhs(t, y) and sample at equally spaced times.

    Parameters
    ----------
    rhs : callable(t, y) -> array
        Vector field.  Exceptions raised on the very first evaluation
        propagate; exceptions inside trial stages shrink the step instead
        (the solver may be probing outside the domain).
    y0 : array_like
        Initial state.
    cfg : IntegratorConfig
    post_step : callable(t, y) -> array or None, optional
        Invoked after every accepted step.  Return a new array to replace
        the state (e.g. a constraint projection); return None or the same
        object to leave it untouched.

    Returns
    -------
    Trajectory
        Samples at the requested times.  Sample times are hit exactly by
        clamping the step size, so no interpolation error is introduced.
    """
    t0, t1 = map(float, cfg.t_span)
    y = np.asarray(y0, dtype=float).copy()
    if y.ndim != 1:
        raise ValueError("y0 must be one-dimensional")
    span = t1 - t0

    f = np.asarray(rhs(t0, y), dtype=float)  # propagate domain errors at t0
    n_evals = 1

    samples = (
        np.linspace(t0, t1, cfg.sample_count)
        if cfg.sample_count > 1
        else np.array([t0])
    )
    out = np.empty((len(samples), y.size))
    out[0] = y
    next_sample = 1
    if next_sample >= len(samples):
        return Trajectory(samples, out, {"n_steps": 0, "n_rejected": 0, "n_rhs": n_evals})

    h = _initial_step(f, y, t0, t1, cfg.rel_tol, cfg.abs_tol, cfg.max_step)
    t = t0
    n_steps = n_rejected = 0
    k = np.empty((7, y.size))

    while t < t1 and next_sample < len(samples):
        if h < 1e-14 * max(abs(t), abs(span), 1.0):
            raise StepSizeUnderflow(f"step size underflow at t={t!r}")
        target = samples[next_sample]
        clamped = t + h >= target
        h_try = (target - t) if clamped else min(h, cfg.max_step)
        if h_try <= 0:  # numerical corner: sample time already reached
            h_try = 1e-15 * max(abs(t), 1.0)

        try:
            k[0] = f
            for i in range(1, 6):
                yi = y + h_try * (k[:i].T @ _DP_A[i])
                k[i] = rhs(t + _DP_C[i] * h_try, yi)
            y_new = y + h_try * (k[:6].T @ _DP_A[6])
            k[6] = rhs(t + h_try, y_new)
            n_evals += 6
        except DomainError:
            # Trial stage left the admissible domain; retry with a smaller step.
            h = h_try * _MIN_FACTOR
            n_rejected += 1
            continue

        err = h_try * (k.T @ _DP_E)
        err_norm = _error_norm(err, y, y_new, cfg.rel_tol, cfg.abs_tol)

        if err_norm <= 1.0:
            n_steps += 1
            t = target if clamped else t + h_try
            y = y_new
            f = k[6]
            if post_step is not None:
                replaced = post_step(t, y)
                if replaced is not None and replaced is not y:
                    y = np.asarray(replaced, dtype=float)
                    f = np.asarray(rhs(t, y), dtype=float)
                    n_evals += 1
            while next_sample < len(samples) and t >= samples[next_sample] - 1e-14 * max(
                1.0, abs(t)
            ):
                out[next_sample] = y
                next_sample += 1
            factor = _MAX_FACTOR if err_norm == 0.0 else _SAFETY * err_norm ** (-0.2)
            h = h_try * min(_MAX_FACTOR, max(_MIN_FACTOR, factor))
        else:
            n_rejected += 1
            h = h_try * max(_MIN_FACTOR, _SAFETY * err_norm ** (-0.2))
        h = min(h, cfg.max_step)

    return Trajectory(
        samples, out, {"n_steps": n_steps, "n_rejected": n_rejected, "n_rhs": n_evals}
    )


def eigenvalues(a) -> np.ndarray:
    """All eigenvalues (with multiplicity) of a small dense matrix, n <= 8."""
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("matrix must be square")
    if a.shape[0] > 8:
        raise ValueError("eigenvalue routine is restricted to n <= 8")
    try:
        return np.linalg.eigvals(a)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK rarely fails here
        raise ConvergenceFailure(str(exc)) from exc


def quadratic_roots(c1: float, c2: float):
    """Roots of tau^2 + c1*tau + c2 and the discriminant c1^2 - 4*c2.

    The real-root branch uses the sign-matched formula to avoid
    cancellation between -c1 and the square root.
    """
    disc = c1 * c1 - 4.0 * c2
    if disc >= 0.0:
        s = math.sqrt(disc)
        q = -0.5 * (c1 + math.copysign(s, c1)) if c1 != 0.0 else -0.5 * s
        if q != 0.0:
            roots = (complex(q), complex(c2 / q))
        else:
            roots = (0j, complex(-c1))
    else:
        s = 0.5 * math.sqrt(-disc)
        roots = (complex(-0.5 * c1, s), complex(-0.5 * c1, -s))
    return roots, disc


def matrix_rank(a, rel_threshold: float = 1e-10) -> int:
    """Number of singular values above rel_threshold times the largest one."""
    sv = np.linalg.svd(np.asarray(a, dtype=float), compute_uv=False)
    if sv.size == 0 or sv[0] == 0.0:
        return 0
    return int(np.sum(sv > rel_threshold * sv[0]))


def newton_solve(fun, jac, x0, tol: float = 1e-13, max_iter: int = 20) -> np.ndarray:
    """Newton iteration for fun(x) = 0 with analytic Jacobian jac(x)."""
    x = np.asarray(x0, dtype=float).copy()
    for _ in range(max_iter):
        r = np.asarray(fun(x), dtype=float)
        if float(np.max(np.abs(r))) <= tol:
            return x
        x = x - np.linalg.solve(np.asarray(jac(x), dtype=float), r)
    r = np.asarray(fun(x), dtype=float)
    if float(np.max(np.abs(r))) <= tol:
        return x
    raise ConvergenceFailure(
        f"Newton iteration stalled with residual {float(np.max(np.abs(r))):.3e}"
    )
