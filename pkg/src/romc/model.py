"""Simulator-based model definition and the deterministic objectives built from it.

A :class:`ModelSpec` bundles a prior, a seeded simulator, a summary map, a
distance and the observed data. Fixing the simulator seed to a nuisance
value ``u_i`` turns the stochastic model into a deterministic map, and
:func:`make_objective` wraps the resulting distance-to-observation as an
:class:`ObjectiveProblem`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import EvaluationError, InvalidArgumentError

NUISANCE_LOW = 1
NUISANCE_HIGH = 2**32 - 1


def euclidean(a, b):
    return np.sqrt(np.sum((np.asarray(a) - np.asarray(b)) ** 2, axis=-1))


def squared_euclidean(a, b):
    return np.sum((np.asarray(a) - np.asarray(b)) ** 2, axis=-1)


def identity(x):
    return x


def _as_bounds(bounds) -> np.ndarray:
    arr = np.asarray(bounds, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise InvalidArgumentError(f"bounds must be a list of (lo, hi) pairs, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidArgumentError("bounds must be finite")
    if np.any(arr[:, 0] >= arr[:, 1]):
        raise InvalidArgumentError(f"every bound needs lo < hi, got {arr.tolist()}")
    return arr


class UniformPrior:
    """Uniform prior on an axis-aligned box.

    ``pdf`` and ``log_pdf`` accept a single point of shape ``(D,)`` or a
    batch of shape ``(N, D)``.
    """

    def __init__(self, bounds):
        self.bounds = _as_bounds(bounds)
        self.dim = self.bounds.shape[0]
        self._density = 1.0 / float(np.prod(self.bounds[:, 1] - self.bounds[:, 0]))

    def sample(self, rng: np.random.Generator, size: Optional[int] = None) -> np.ndarray:
        lo, hi = self.bounds[:, 0], self.bounds[:, 1]
        shape = (self.dim,) if size is None else (size, self.dim)
        return rng.uniform(lo, hi, size=shape)

    def pdf(self, theta):
        theta = np.asarray(theta, dtype=float)
        inside = np.all((theta >= self.bounds[:, 0]) & (theta <= self.bounds[:, 1]), axis=-1)
        out = np.where(inside, self._density, 0.0)
        return float(out) if out.ndim == 0 else out

    def log_pdf(self, theta):
        with np.errstate(divide="ignore"):
            return np.log(self.pdf(theta))

    def __repr__(self):
        return f"UniformPrior(bounds={self.bounds.tolist()})"


@dataclass(frozen=True, eq=False)
class ModelSpec:
    """The inference problem.

    Parameters
    ----------
    prior
        Object with ``sample(rng, size=None)``, ``pdf(theta)`` and ``log_pdf(theta)``.
    simulator
        ``simulator(theta, seed) -> data``. Must be a pure function of its
        arguments. When ``vectorized`` is true it receives ``theta`` of shape
        ``(N, D)`` and returns ``(N, M)``.
    summary
        Maps simulator output to summary statistics (row-wise when vectorized).
    distance
        ``distance(s, s_obs)`` reducing over the last axis.
    observed
        The observed data ``y0``.
    bounds
        ``D`` pairs ``(lo, hi)`` enclosing the prior mass.
    """

    prior: object
    simulator: Callable
    observed: np.ndarray
    bounds: np.ndarray
    summary: Callable = identity
    distance: Callable = euclidean
    vectorized: bool = False
    name: str = "model"

    def __post_init__(self):
        object.__setattr__(self, "bounds", _as_bounds(self.bounds))
        object.__setattr__(self, "observed", np.atleast_1d(np.asarray(self.observed, dtype=float)))

    @property
    def dim(self) -> int:
        return self.bounds.shape[0]

    @cached_property
    def observed_summary(self) -> np.ndarray:
        return np.atleast_1d(np.asarray(self.summary(self.observed), dtype=float))

    def discrepancy_batch(self, thetas, seed: int) -> np.ndarray:
        """Distance to the observation for each row of ``thetas`` under one seed."""
        thetas = np.atleast_2d(np.asarray(thetas, dtype=float))
        if self.vectorized:
            sims = self.simulator(thetas, seed)
            return np.asarray(self.distance(self.summary(sims), self.observed_summary), dtype=float).reshape(-1)
        return np.array([self._scalar(t, seed) for t in thetas], dtype=float)

    def discrepancy(self, theta, seed: int) -> float:
        theta = np.asarray(theta, dtype=float).reshape(self.dim)
        if self.vectorized:
            return float(self.discrepancy_batch(theta[None, :], seed)[0])
        return self._scalar(theta, seed)

    def _scalar(self, theta, seed):
        sim = self.simulator(theta, seed)
        return float(self.distance(self.summary(sim), self.observed_summary))


class Objective:
    """The deterministic function ``g_i(theta) = d(T(M(theta, u_i)), T(y0))``.

    Picklable, so problems can be shipped to worker processes.
    """

    def __init__(self, model: ModelSpec, seed: int):
        self.model = model
        self.seed = int(seed)

    def __call__(self, theta) -> float:
        try:
            value = self.model.discrepancy(theta, self.seed)
        except EvaluationError:
            raise
        except Exception as exc:
            raise EvaluationError(f"simulator failed: {exc!r}", theta=theta, seed=self.seed) from exc
        if not np.isfinite(value):
            raise EvaluationError("objective is not finite", theta=theta, seed=self.seed)
        return value

    def batch(self, thetas) -> np.ndarray:
        try:
            values = self.model.discrepancy_batch(thetas, self.seed)
        except EvaluationError:
            raise
        except Exception as exc:
            raise EvaluationError(f"simulator failed: {exc!r}", seed=self.seed) from exc
        if not np.all(np.isfinite(values)):
            bad = np.atleast_2d(thetas)[~np.isfinite(values)][0]
            raise EvaluationError("objective is not finite", theta=bad, seed=self.seed)
        return values

    def __repr__(self):
        return f"Objective(model={self.model.name!r}, seed={self.seed})"


_MONOTONE_FIELDS = frozenset({"result", "surrogate", "local_surrogate"})


@dataclass(eq=False)
class ObjectiveProblem:
    """One optimisation problem ``min g_i(theta)`` and everything learnt about it.

    ``result``, ``surrogate`` and ``local_surrogate`` start as ``None`` and
    may only ever be set, never cleared.
    """

    index: int
    seed: int
    objective: Objective
    bounds: np.ndarray
    result: Optional[object] = None
    regions: list = field(default_factory=list)
    surrogate: Optional[Callable] = None
    local_surrogate: Optional[Callable] = None

    def __setattr__(self, name, value):
        if name in _MONOTONE_FIELDS and value is None and getattr(self, name, None) is not None:
            raise InvalidArgumentError(f"{name} of problem {self.index} cannot be reset")
        if name == "regions" and not value and getattr(self, "regions", None):
            raise InvalidArgumentError(f"regions of problem {self.index} cannot be reset")
        super().__setattr__(name, value)

    @property
    def dim(self) -> int:
        return self.bounds.shape[0]

    @property
    def distance(self) -> Callable:
        """Best available distance model: local surrogate, then GP surrogate, then the objective."""
        if self.local_surrogate is not None:
            return self.local_surrogate
        if self.surrogate is not None:
            return self.surrogate
        return self.objective

    def distance_batch(self, thetas) -> np.ndarray:
        fn = self.distance
        if hasattr(fn, "batch"):
            return fn.batch(thetas)
        return np.array([fn(t) for t in np.atleast_2d(thetas)], dtype=float)


@dataclass(frozen=True)
class EpsilonConfig:
    """Thresholds for filtering solutions, sizing regions and the posterior indicator."""

    eps_filter: float
    eps_region: float
    eps_cutoff: float

    def __post_init__(self):
        for name in ("eps_filter", "eps_region", "eps_cutoff"):
            if not getattr(self, name) >= 0:
                raise InvalidArgumentError(f"{name} must be nonnegative")

    @classmethod
    def single(cls, eps: float) -> "EpsilonConfig":
        return cls(eps, eps, eps)


def sample_nuisance(n1: int, master_seed: int) -> list[int]:
    """Draw ``n1`` simulator seeds from U{1, 2^32 - 1}.

    Uses a Philox (counter-based) generator keyed by ``master_seed``.
    """
    if n1 < 1:
        raise InvalidArgumentError(f"n1 must be >= 1, got {n1}")
    rng = np.random.Generator(np.random.Philox(key=int(master_seed)))
    draws = rng.integers(NUISANCE_LOW, NUISANCE_HIGH, size=n1, endpoint=True, dtype=np.uint64)
    return [int(u) for u in draws]


def make_objective(model: ModelSpec, u_i: int, index: int = 0) -> ObjectiveProblem:
    return ObjectiveProblem(index=index, seed=int(u_i), objective=Objective(model, u_i), bounds=model.bounds.copy())


def make_problems(model: ModelSpec, seeds: Sequence[int]) -> list[ObjectiveProblem]:
    return [make_objective(model, u, index=i) for i, u in enumerate(seeds)]


def indicator(d_value, eps):
    """1 if ``d_value <= eps`` else 0. Works elementwise on arrays."""
    out = (np.asarray(d_value) <= eps).astype(int)
    return int(out) if out.ndim == 0 else out
