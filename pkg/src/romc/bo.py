"""Bayesian optimisation of an objective with a Gaussian-process surrogate.

The GP uses a squared-exponential ARD kernel on mean-centred targets.
Hyperparameters are picked by maximising the log marginal likelihood over
a fixed grid, which keeps fitting deterministic and dependency-free.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_solve, cholesky, solve_triangular

from . import seeding
from .errors import FitError, InvalidArgumentError, OptimisationFailedError
from .optimize import OptimResult, finite_diff_gradient

LENGTHSCALE_FACTORS = (0.05, 0.1, 0.2, 0.4, 0.8)
SIGNAL_FACTORS = (0.25, 1.0, 4.0)
_MAX_JITTER_TRIES = 8


def _sq_dists(A, B, lengthscales):
    diff = (A[:, None, :] - B[None, :, :]) / lengthscales
    return np.einsum("ijk,ijk->ij", diff, diff)


@dataclass(eq=False)
class GPModel:
    inputs: np.ndarray
    targets: np.ndarray
    lengthscales: np.ndarray
    signal_var: float
    noise_var: float
    mean_const: float
    chol: np.ndarray
    alpha: np.ndarray
    log_marginal_likelihood: float

    def predict(self, theta):
        """Posterior mean and variance. ``theta`` may be ``(D,)`` or ``(N, D)``."""
        theta = np.asarray(theta, dtype=float)
        single = theta.ndim == 1
        Xs = np.atleast_2d(theta)
        ks = self.signal_var * np.exp(-0.5 * _sq_dists(Xs, self.inputs, self.lengthscales))
        mean = self.mean_const + ks @ self.alpha
        v = solve_triangular(self.chol, ks.T, lower=True)
        var = np.maximum(self.signal_var - np.sum(v * v, axis=0), 0.0)
        if single:
            return float(mean[0]), float(var[0])
        return mean, var

    # the GP mean is used directly as a distance model
    def __call__(self, theta) -> float:
        return self.predict(np.asarray(theta, dtype=float).reshape(-1))[0]

    def batch(self, thetas) -> np.ndarray:
        return self.predict(np.atleast_2d(thetas))[0]


def _factorize(K, noise):
    n = K.shape[0]
    jitter = noise
    for _ in range(_MAX_JITTER_TRIES):
        try:
            return cholesky(K + jitter * np.eye(n), lower=True), jitter
        except np.linalg.LinAlgError:
            jitter = max(jitter * 10.0, 1e-10)
    return None, jitter


def gp_fit(X, y, ranges=None) -> GPModel:
    """Fit a GP to ``(X, y)`` choosing hyperparameters by grid-search ML-II.

    Lengthscale candidates are fractions of ``ranges`` (default: the spread
    of ``X`` per dimension), signal variances are multiples of ``var(y)``.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    y = np.asarray(y, dtype=float).reshape(-1)
    n, dim = X.shape
    if n < 2 or y.size != n:
        raise InvalidArgumentError("gp_fit needs at least two (x, y) pairs")
    if not np.all(np.isfinite(X)) or not np.all(np.isfinite(y)):
        raise InvalidArgumentError("gp_fit inputs must be finite")
    if np.all(X == X[0]):
        raise FitError("all GP inputs are identical")
    spread = np.ptp(X, axis=0)
    ranges = spread if ranges is None else np.asarray(ranges, dtype=float)
    ranges = np.where(ranges > 0, ranges, np.max(spread))

    mean_const = float(np.mean(y))
    yc = y - mean_const
    var_y = float(np.var(y))
    scale = var_y if var_y > 1e-300 else 1.0
    noise = 1e-6 * var_y + 1e-10

    diffs2 = (X[:, None, :] - X[None, :, :]) ** 2
    best = None
    for factors in itertools.product(LENGTHSCALE_FACTORS, repeat=dim):
        ls = np.asarray(factors) * ranges
        base = np.exp(-0.5 * np.einsum("ijk,k->ij", diffs2, 1.0 / ls**2))
        for sf in SIGNAL_FACTORS:
            sig = sf * scale
            L, jitter = _factorize(sig * base, noise)
            if L is None:
                continue
            alpha = cho_solve((L, True), yc)
            lml = -0.5 * yc @ alpha - np.sum(np.log(np.diag(L))) - 0.5 * n * np.log(2 * np.pi)
            if best is None or lml > best[0]:
                best = (lml, ls, sig, jitter, L, alpha)
    if best is None:
        raise FitError("kernel matrix is not positive definite for any hyperparameter setting")
    lml, ls, sig, jitter, L, alpha = best
    return GPModel(X.copy(), y.copy(), ls, sig, jitter, mean_const, L, alpha, float(lml))


def gp_predict(model: GPModel, theta):
    return model.predict(theta)


@dataclass(frozen=True)
class BoOpts:
    n_init: int = 10
    n_iters: int = 40
    n_candidates: int = 512
    n_local: int = 64
    local_scale: float = 0.05
    kappa: float = 2.0


def solve_bo(problem, opts: BoOpts = BoOpts(), seed: int = 0):
    """Minimise ``problem.objective`` by GP-LCB Bayesian optimisation.

    Returns ``(OptimResult, surrogate)`` where the surrogate is the final
    GP (callable; evaluates the posterior mean). The objective is called
    exactly ``n_init + n_iters`` times.
    """
    if opts.n_init < 2 or opts.n_iters < 0:
        raise InvalidArgumentError("need n_init >= 2 and n_iters >= 0")
    bounds = problem.bounds
    lo, hi = bounds[:, 0], bounds[:, 1]
    width = hi - lo
    rng = np.random.default_rng(seed)
    g = problem.objective

    X = rng.uniform(lo, hi, size=(opts.n_init, problem.dim))
    y = []
    for x in X:
        try:
            y.append(g(x))
        except Exception:
            y.append(np.inf)
    y = np.asarray(y, dtype=float)
    if not np.any(np.isfinite(y)):
        raise OptimisationFailedError("objective is not finite at any initial design point", problem.index)
    trace = [float(np.min(y))]

    for _ in range(opts.n_iters):
        finite = np.isfinite(y)
        gp = gp_fit(X[finite], y[finite], ranges=width)
        best = X[finite][np.argmin(y[finite])]
        cand = np.vstack([
            rng.uniform(lo, hi, size=(opts.n_candidates, problem.dim)),
            np.clip(best + opts.local_scale * width * rng.standard_normal((opts.n_local, problem.dim)), lo, hi),
        ])
        mean, var = gp.predict(cand)
        x_next = cand[np.argmin(mean - opts.kappa * np.sqrt(var))]
        try:
            y_next = g(x_next)
        except Exception:
            y_next = np.inf
        X = np.vstack([X, x_next])
        y = np.append(y, y_next)
        trace.append(float(np.min(y[np.isfinite(y)])))

    finite = np.isfinite(y)
    gp = gp_fit(X[finite], y[finite], ranges=width)
    i_best = int(np.argmin(np.where(finite, y, np.inf)))
    theta_star = X[i_best].copy()
    result = OptimResult(
        theta_star=theta_star,
        d_star=float(y[i_best]),
        success=True,
        n_evals=len(y),
        gradient_at_star=finite_diff_gradient(gp, theta_star),
        n_iters=opts.n_iters,
        trace=trace,
    )
    return result, gp


def bo_seed(master_seed: int, index: int) -> int:
    return seeding.derive_seed(master_seed, seeding.BO, index)
