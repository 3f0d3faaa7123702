"""Bounding-box proposal regions around accepted optimal points."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import InvalidArgumentError

SINGULAR_GRADIENT_NORM = 1e-8


@dataclass(frozen=True, eq=False)
class BoundingBox:
    """A box with arbitrary orientation acting as a uniform proposal.

    ``directions`` holds orthonormal row vectors. Along row ``d`` the box
    spans ``[-neg_extent[d], pos_extent[d]]`` around ``center``.
    """

    center: np.ndarray
    directions: np.ndarray
    neg_extent: np.ndarray
    pos_extent: np.ndarray

    def __post_init__(self):
        for name in ("center", "directions", "neg_extent", "pos_extent"):
            object.__setattr__(self, name, np.array(getattr(self, name), dtype=float))
        D = self.center.size
        if self.directions.shape != (D, D):
            raise InvalidArgumentError(f"directions must be {D}x{D}")
        if not np.allclose(self.directions @ self.directions.T, np.eye(D), atol=1e-8):
            raise InvalidArgumentError("directions must be orthonormal")
        if np.any(self.neg_extent <= 0) or np.any(self.pos_extent <= 0):
            raise InvalidArgumentError("extents must be positive")

    @property
    def dim(self) -> int:
        return self.center.size

    @property
    def widths(self) -> np.ndarray:
        return self.neg_extent + self.pos_extent

    @property
    def volume(self) -> float:
        return float(np.prod(self.widths))

    def coefficients(self, theta) -> np.ndarray:
        """Coordinates of ``theta`` (``(D,)`` or ``(N, D)``) along the box directions."""
        return (np.asarray(theta, dtype=float) - self.center) @ self.directions.T

    def contains(self, theta):
        c = self.coefficients(theta)
        tol = 1e-12 * np.maximum(1.0, self.widths)
        inside = np.all((c >= -self.neg_extent - tol) & (c <= self.pos_extent + tol), axis=-1)
        return bool(inside) if np.ndim(inside) == 0 else inside

    def pdf(self, theta):
        out = np.where(self.contains(theta), 1.0 / self.volume, 0.0)
        return float(out) if out.ndim == 0 else out

    def sample(self, n: int, seed) -> np.ndarray:
        if n < 1:
            raise InvalidArgumentError("n must be >= 1")
        rng = np.random.default_rng(seed)
        c = rng.uniform(-self.neg_extent, self.pos_extent, size=(n, self.dim))
        return self.center + c @ self.directions

    def corners(self) -> np.ndarray:
        """All ``2**D`` vertices (for plotting and enclosing-box checks)."""
        signs = np.array(np.meshgrid(*[[0, 1]] * self.dim, indexing="ij")).reshape(self.dim, -1).T
        coeffs = np.where(signs == 1, self.pos_extent, -self.neg_extent)
        return self.center + coeffs @ self.directions

    def to_dict(self) -> dict:
        return {
            "center": self.center.tolist(),
            "directions": self.directions.tolist(),
            "neg_extent": self.neg_extent.tolist(),
            "pos_extent": self.pos_extent.tolist(),
            "volume": self.volume,
        }


def box_sample(box: BoundingBox, n: int, seed) -> np.ndarray:
    return box.sample(n, seed)


def box_pdf(box: BoundingBox, theta):
    return box.pdf(theta)


def curvature_directions(gradient) -> np.ndarray:
    """Eigenvectors (as rows) of the Gauss-Newton curvature ``J^T J``.

    ``J`` is the gradient, so the matrix has rank one; the gradient
    direction comes first and the remaining rows complete an orthonormal
    basis. A (near) zero gradient makes the matrix singular and the
    standard basis is returned instead.
    """
    g = np.asarray(gradient, dtype=float).reshape(-1)
    if not np.all(np.isfinite(g)):
        raise InvalidArgumentError("gradient must be finite")
    D = g.size
    if np.linalg.norm(g) < SINGULAR_GRADIENT_NORM:
        return np.eye(D)
    _, vecs = np.linalg.eigh(np.outer(g, g))
    rows = vecs[:, ::-1].T.copy()
    # fix the sign so results do not depend on LAPACK conventions
    for r in rows:
        if r[np.argmax(np.abs(r))] < 0:
            r *= -1
    return rows


def _line_extent(dist, center, v, eps, eta0, K, lo, hi):
    offset = 0.0
    eta = eta0
    for _ in range(K):
        while True:
            trial = offset + eta
            point = center + trial * v
            if np.any(point < lo) or np.any(point > hi) or not dist(point) <= eps:
                break
            offset = trial
        eta /= 2.0
    return offset


def build_box(problem, eps_region: float, eta0: float = 0.5, K: int = 10,
              distance: Optional[Callable] = None) -> BoundingBox:
    """Fit a box around ``problem.result.theta_star`` by line search along curvature directions.

    Along each of ``+v_d`` and ``-v_d`` the search walks out in steps of
    ``eta`` while the distance stays within ``eps_region``, then halves
    ``eta`` and resumes from the last inside point, ``K`` times in total.
    Leaving ``problem.bounds`` counts as leaving the region. Extents are
    floored at ``eta0 / 2**K``.

    ``distance`` defaults to ``problem.distance`` (the GP surrogate on the
    Bayesian-optimisation path, the objective otherwise).
    """
    if problem.result is None:
        raise InvalidArgumentError(f"problem {problem.index} has not been solved")
    if K < 1 or eta0 <= 0:
        raise InvalidArgumentError("need K >= 1 and eta0 > 0")
    dist = problem.distance if distance is None else distance
    center = np.asarray(problem.result.theta_star, dtype=float)
    directions = curvature_directions(problem.result.gradient_at_star)
    lo, hi = problem.bounds[:, 0], problem.bounds[:, 1]
    floor = eta0 / 2**K
    pos = np.empty(center.size)
    neg = np.empty(center.size)
    for d, v in enumerate(directions):
        pos[d] = max(_line_extent(dist, center, v, eps_region, eta0, K, lo, hi), floor)
        neg[d] = max(_line_extent(dist, center, -v, eps_region, eta0, K, lo, hi), floor)
    box = BoundingBox(center, directions, neg, pos)
    problem.regions = [box]
    return box
