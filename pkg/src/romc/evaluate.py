"""Grid tabulation of densities and divergences between them.

Low-dimensional only: grids grow as ``(width / step) ** D``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import EvaluationError, InvalidArgumentError

MAX_GRID_DIM = 3


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def grid_axes(bounds, step: float) -> list[np.ndarray]:
    """Cell centres per axis for cells of side ``step`` starting at each lower bound."""
    if not step > 0:
        raise InvalidArgumentError("step must be positive")
    bounds = np.asarray(bounds, dtype=float)
    if not np.all(np.isfinite(bounds)):
        raise InvalidArgumentError("grid bounds must be finite")
    axes = []
    for lo, hi in bounds:
        n = max(1, math.ceil((hi - lo) / step - 1e-9))
        axes.append(lo + (np.arange(n) + 0.5) * step)
    return axes


def grid_points(bounds, step: float) -> np.ndarray:
    axes = grid_axes(bounds, step)
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.reshape(-1) for m in mesh], axis=1)


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Nonnegative values at the cell centres of a regular grid (C order, first axis slowest)."""

    bounds: np.ndarray
    step: float
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "bounds", np.asarray(self.bounds, dtype=float))
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float).reshape(-1))
        if self.values.size != int(np.prod(self.shape)):
            raise InvalidArgumentError("value count does not match the grid")
        if not np.all(np.isfinite(self.values)) or np.any(self.values < 0):
            raise InvalidArgumentError("grid values must be finite and nonnegative")

    @property
    def dim(self) -> int:
        return self.bounds.shape[0]

    @property
    def axes(self) -> list[np.ndarray]:
        return grid_axes(self.bounds, self.step)

    @property
    def shape(self) -> tuple:
        return tuple(a.size for a in self.axes)

    @property
    def points(self) -> np.ndarray:
        return grid_points(self.bounds, self.step)

    @property
    def cell_volume(self) -> float:
        return self.step**self.dim

    def integral(self) -> float:
        return float(np.sum(self.values) * self.cell_volume)

    def masses(self) -> np.ndarray:
        total = np.sum(self.values)
        if not total > 0:
            raise InvalidArgumentError("grid function has no mass")
        return self.values / total

    def normalized(self) -> "GridFunction":
        return GridFunction(self.bounds, self.step, self.values / self.integral())

    def marginal_moments(self):
        """Per-axis mean and standard deviation of the normalised grid density."""
        m = self.masses()
        pts = self.points
        mean = m @ pts
        std = np.sqrt(m @ (pts - mean) ** 2)
        return mean, std

    def same_grid(self, other: "GridFunction") -> bool:
        return (self.step == other.step and self.bounds.shape == other.bounds.shape
                and np.array_equal(self.bounds, other.bounds))

    def to_csv(self, path, value_name: str = "value") -> None:
        header = [f"theta_{d + 1}" for d in range(self.dim)] + [value_name]
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(header)
            for p, v in zip(self.points, self.values):
                writer.writerow([_fmt(x) for x in p] + [_fmt(v)])

    @classmethod
    def from_csv(cls, path, bounds, step) -> "GridFunction":
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        return cls(bounds, step, data[:, -1])


def tabulate(f: Callable, bounds, step: float, batch: bool = False) -> GridFunction:
    """Evaluate ``f`` at every cell centre.

    With ``batch=True``, ``f`` receives the ``(N, D)`` array of centres in
    one call; otherwise it is called per centre.
    """
    bounds = np.asarray(bounds, dtype=float)
    pts = grid_points(bounds, step)
    if batch:
        values = np.asarray(f(pts), dtype=float).reshape(-1)
    else:
        values = np.array([f(p) for p in pts], dtype=float)
    bad = ~np.isfinite(values)
    if np.any(bad):
        raise EvaluationError("non-finite value on grid", theta=pts[np.argmax(bad)])
    return GridFunction(bounds, step, values)


def _kl(p, q):
    support = p > 0
    if np.any(q[support] == 0):
        return math.inf
    return float(np.sum(p[support] * np.log(p[support] / q[support])))


def divergence(p: GridFunction, q: GridFunction, kind: str = "JS") -> float:
    """Jensen-Shannon (``"JS"``) or Kullback-Leibler (``"KL"``) divergence in nats.

    Both grid functions are normalised to cell masses first, so the result
    does not depend on the density scale.
    """
    if not p.same_grid(q):
        raise InvalidArgumentError("divergence needs both functions on the same grid")
    pm, qm = p.masses(), q.masses()
    kind = kind.upper().replace("-", "").replace("_", "")
    if kind in ("KL", "KLDIVERGENCE", "KULLBACKLEIBLER"):
        return _kl(pm, qm)
    if kind in ("JS", "JENSENSHANNON"):
        m = 0.5 * (pm + qm)
        return max(0.0, 0.5 * _kl(pm, m) + 0.5 * _kl(qm, m))
    raise InvalidArgumentError(f"unknown divergence kind {kind!r}")
