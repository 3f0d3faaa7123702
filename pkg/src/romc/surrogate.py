"""Quadratic local surrogates of the objective inside a bounding box."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import FitError, InvalidArgumentError
from .regions import BoundingBox


def n_quadratic_terms(dim: int) -> int:
    return 1 + dim + dim * (dim + 1) // 2


def quadratic_features(z) -> np.ndarray:
    """Full degree-2 basis ``[1, z_d, z_d * z_e (d <= e)]`` for rows of ``z``."""
    z = np.atleast_2d(np.asarray(z, dtype=float))
    n, dim = z.shape
    iu, ju = np.triu_indices(dim)
    return np.hstack([np.ones((n, 1)), z, z[:, iu] * z[:, ju]])


@dataclass(frozen=True, eq=False)
class QuadraticModel:
    """Least-squares quadratic fit expressed in the box's own coordinates.

    Inputs are rotated onto the box directions and divided by the box
    widths before the basis is applied, which keeps the design matrix well
    conditioned for very small or very elongated boxes. When used as a
    distance (``__call__``/``batch``) the model returns ``inf`` outside its
    box, where it was never trained.
    """

    box: BoundingBox
    coef: np.ndarray
    rmse: float

    def __post_init__(self):
        # Precompute z = (theta - center) @ M and f(z) = c + b.z + z'Az so
        # that a scalar call costs a few tiny array operations.
        dim = self.box.dim
        w = self.box.widths
        iu, ju = np.triu_indices(dim)
        A = np.zeros((dim, dim))
        A[iu, ju] = self.coef[1 + dim:]
        tol = 1e-12 * np.maximum(1.0, w)
        fast = dict(
            M=self.box.directions.T / w,
            lo=-(self.box.neg_extent + tol) / w,
            hi=(self.box.pos_extent + tol) / w,
            c=float(self.coef[0]),
            b=np.asarray(self.coef[1:1 + dim], dtype=float),
            A=A,
        )
        object.__setattr__(self, "_fast", fast)

    def _z(self, theta):
        return self.box.coefficients(np.atleast_2d(theta)) / self.box.widths

    def predict(self, theta):
        theta = np.asarray(theta, dtype=float)
        out = quadratic_features(self._z(theta)) @ self.coef
        return float(out[0]) if theta.ndim == 1 else out

    def batch(self, thetas) -> np.ndarray:
        thetas = np.atleast_2d(thetas)
        return np.where(self.box.contains(thetas), self.predict(thetas), np.inf)

    def __call__(self, theta) -> float:
        f = self._fast
        if not isinstance(theta, np.ndarray) or theta.ndim != 1:
            theta = np.asarray(theta, dtype=float).reshape(-1)
        z = (theta - self.box.center) @ f["M"]
        if (z < f["lo"]).any() or (z > f["hi"]).any():
            return np.inf
        return f["c"] + float(z @ f["b"] + z @ f["A"] @ z)


def fit_quadratic(box: BoundingBox, X, y) -> QuadraticModel:
    X = np.atleast_2d(np.asarray(X, dtype=float))
    y = np.asarray(y, dtype=float).reshape(-1)
    A = quadratic_features(box.coefficients(X) / box.widths)
    if A.shape[0] < A.shape[1]:
        raise FitError(f"need at least {A.shape[1]} training points, got {A.shape[0]}")
    coef, _, rank, _ = np.linalg.lstsq(A, y, rcond=None)
    if rank < A.shape[1]:
        raise FitError(f"quadratic design matrix is rank deficient ({rank} < {A.shape[1]})")
    rmse = float(np.sqrt(np.mean((A @ coef - y) ** 2)))
    return QuadraticModel(box, coef, rmse)


def fit_local_surrogate(problem, box: Optional[BoundingBox] = None, n_train: int = 30, seed=0) -> QuadraticModel:
    """Fit a quadratic to the true objective on ``n_train`` uniform draws from ``box``.

    Stores the model as ``problem.local_surrogate`` and returns it.
    """
    if box is None:
        if not problem.regions:
            raise InvalidArgumentError(f"problem {problem.index} has no region")
        box = problem.regions[0]
    if n_train < n_quadratic_terms(box.dim):
        raise InvalidArgumentError(f"n_train must be >= {n_quadratic_terms(box.dim)}")
    X = box.sample(n_train, seed)
    y = problem.objective.batch(X)
    model = fit_quadratic(box, X, y)
    problem.local_surrogate = model
    return model
