"""Gradient-based solution of the deterministic optimisation problems."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import EvaluationError, InvalidArgumentError, OptimisationFailedError


@dataclass
class OptimResult:
    theta_star: np.ndarray
    d_star: float
    success: bool
    n_evals: int
    gradient_at_star: np.ndarray
    n_iters: int = 0
    trace: list = field(default_factory=list, repr=False)

    def __post_init__(self):
        if self.n_evals < 1:
            raise InvalidArgumentError("n_evals must be >= 1")


@dataclass(frozen=True)
class GradOpts:
    max_iters: int = 200
    grad_tol: float = 1e-5
    step_tol: float = 1e-8
    init_step: float = 1.0
    barzilai_borwein: bool = True
    shrink: float = 0.5
    armijo_c: float = 1e-4
    max_backtracks: int = 60


def fd_steps(theta) -> np.ndarray:
    """Default per-coordinate step ``1e-5 * max(1, |theta_d|)``."""
    return 1e-5 * np.maximum(1.0, np.abs(np.asarray(theta, dtype=float)))


def finite_diff_gradient(f: Callable, theta, h=None) -> np.ndarray:
    """Central-difference gradient of ``f`` at ``theta``.

    ``h`` may be a scalar, a per-coordinate array, or ``None`` for
    :func:`fd_steps`. Uses exactly ``2 * D`` evaluations of ``f``.
    """
    theta = np.asarray(theta, dtype=float).reshape(-1)
    steps = fd_steps(theta) if h is None else np.broadcast_to(np.asarray(h, dtype=float), theta.shape)
    if np.any(steps <= 0):
        raise InvalidArgumentError("finite-difference step must be positive")
    grad = np.empty_like(theta)
    for d in range(theta.size):
        e = np.zeros_like(theta)
        e[d] = steps[d]
        fp = f(theta + e)
        fm = f(theta - e)
        if not (np.isfinite(fp) and np.isfinite(fm)):
            raise EvaluationError("non-finite value in finite differences", theta=theta)
        grad[d] = (fp - fm) / (2.0 * steps[d])
    return grad


def solve_gradients(problem, start, opts: GradOpts = GradOpts()) -> OptimResult:
    """Minimise ``problem.objective`` from ``start`` by projected gradient descent.

    Each iteration takes a finite-difference gradient, then backtracks until
    the Armijo condition holds. The first trial step is ``opts.init_step``;
    later ones use the Barzilai-Borwein estimate of the inverse curvature,
    which keeps progress fast in flat valleys such as ``theta**4``. Iterates are clipped
    to ``problem.bounds``. Converged means the projected gradient norm fell
    below ``grad_tol`` or the accepted step below ``step_tol``.
    """
    if opts.max_iters < 1:
        raise InvalidArgumentError("max_iters must be >= 1")
    g = problem.objective
    lo, hi = problem.bounds[:, 0], problem.bounds[:, 1]
    n_evals = 0

    def f(theta):
        nonlocal n_evals
        n_evals += 1
        try:
            return g(theta)
        except EvaluationError:
            return math.inf

    x = np.clip(np.asarray(start, dtype=float).reshape(-1), lo, hi)
    fx = f(x)
    if not np.isfinite(fx):
        raise OptimisationFailedError("objective is not finite at the starting point", problem.index)
    trace = [fx]
    success = False
    it = 0
    prev_x = prev_grad = None
    for it in range(1, opts.max_iters + 1):
        try:
            grad = finite_diff_gradient(f, x)
        except EvaluationError:
            break
        projected = x - np.clip(x - grad, lo, hi)
        if np.linalg.norm(projected) < opts.grad_tol:
            success = True
            break
        alpha = opts.init_step
        if opts.barzilai_borwein and prev_x is not None:
            s_k, y_k = x - prev_x, grad - prev_grad
            sy = float(s_k @ y_k)
            if sy > 0:
                alpha = min(max(float(s_k @ s_k) / sy, 1e-10), 1e10)
        prev_x, prev_grad = x, grad
        accepted = False
        for _ in range(opts.max_backtracks):
            x_new = np.clip(x - alpha * grad, lo, hi)
            step = x_new - x
            if np.linalg.norm(step) < opts.step_tol:
                break
            f_new = f(x_new)
            if f_new <= fx + opts.armijo_c * float(grad @ step):
                accepted = True
                break
            alpha *= opts.shrink
        if not accepted:
            success = True  # no descent step longer than step_tol exists
            break
        x, fx = x_new, f_new
        trace.append(fx)
        if np.linalg.norm(step) < opts.step_tol:
            success = True
            break

    d_star = g(x)
    n_evals += 1
    try:
        grad_star = finite_diff_gradient(f, x)
    except EvaluationError:
        grad_star = np.zeros_like(x)
    return OptimResult(
        theta_star=x, d_star=float(d_star), success=success, n_evals=n_evals,
        gradient_at_star=grad_star, n_iters=it, trace=trace,
    )


def filter_solutions(results: Sequence[Optional[OptimResult]], eps_filter: float) -> list[int]:
    if eps_filter < 0:
        raise InvalidArgumentError("eps_filter must be nonnegative")
    return [i for i, r in enumerate(results) if r is not None and r.success and r.d_star <= eps_filter]


def compute_eps(d_stars: Sequence[float], quantile: float) -> float:
    """Empirical ``quantile`` of the optimal distances (lower order statistic at ``ceil(q * n)``)."""
    values = np.sort(np.asarray(d_stars, dtype=float))
    n = values.size
    if n == 0:
        raise InvalidArgumentError("compute_eps needs at least one distance")
    if not 0.0 <= quantile <= 1.0:
        raise InvalidArgumentError(f"quantile must lie in [0, 1], got {quantile}")
    # round before ceil so that e.g. 0.3 * 10 does not become 4
    k = math.ceil(round(quantile * n, 9)) - 1
    return float(values[min(n - 1, max(k, 0))])
