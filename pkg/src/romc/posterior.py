"""The approximate posterior built from accepted optimisation problems.

Unnormalised density::

    p(theta) * sum_i 1[dist_i(theta) <= eps_cutoff]

where ``dist_i`` is the best available distance model for problem ``i``.
Weighted samples are drawn per bounding box with importance weights
``prior(theta) / q_i(theta)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import partial
from typing import Callable, Optional, Sequence

import numpy as np

from . import seeding
from .errors import DegeneratePosteriorError, InvalidArgumentError
from .evaluate import MAX_GRID_DIM, GridFunction, grid_points
from .parallel import ordered_map
from .surrogate import QuadraticModel

DEFAULT_STEP = 0.05


@dataclass
class WeightedSampleSet:
    problem_index: np.ndarray
    thetas: np.ndarray
    weights: np.ndarray
    n_requested_per_region: int
    n_rejected: int = 0
    distances: Optional[np.ndarray] = field(default=None, repr=False)

    def __post_init__(self):
        self.problem_index = np.asarray(self.problem_index, dtype=int)
        self.thetas = np.atleast_2d(np.asarray(self.thetas, dtype=float))
        self.weights = np.asarray(self.weights, dtype=float)
        n = self.weights.size
        if self.problem_index.size != n or self.thetas.shape[0] != n:
            raise InvalidArgumentError("sample arrays must share one length")
        if not np.all(np.isfinite(self.weights)) or np.any(self.weights < 0):
            raise InvalidArgumentError("weights must be finite and nonnegative")

    def __len__(self):
        return self.weights.size

    @property
    def n_kept(self) -> int:
        return len(self)

    def mean(self) -> np.ndarray:
        return self.weights @ self.thetas / np.sum(self.weights)

    def var(self) -> np.ndarray:
        mu = self.mean()
        return self.weights @ (self.thetas - mu) ** 2 / np.sum(self.weights)

    def std(self) -> np.ndarray:
        return np.sqrt(self.var())

    def ess(self) -> float:
        return compute_ess(self.weights)


def compute_ess(weights) -> float:
    w = np.asarray(weights, dtype=float).reshape(-1)
    if w.size == 0:
        raise InvalidArgumentError("compute_ess needs at least one weight")
    if np.any(w < 0) or not np.all(np.isfinite(w)):
        raise InvalidArgumentError("weights must be finite and nonnegative")
    s = np.sum(w)
    if not s > 0:
        raise InvalidArgumentError("all weights are zero")
    return float(s * s / np.sum(w * w))


def compute_expectation(samples: WeightedSampleSet, h: Callable) -> float:
    """Self-normalised importance estimate of ``E[h(theta)]``.

    ``h`` may return a scalar (result is a float) or a fixed-length vector.
    """
    total = np.sum(samples.weights)
    if not total > 0:
        raise InvalidArgumentError("sum of weights is zero")
    values = np.array([h(t) for t in samples.thetas], dtype=float)
    out = samples.weights @ values / total
    return float(out) if np.ndim(out) == 0 else out


def _sample_region(job, n2, seed, eps, prior, use_true_distance):
    problem, box = job
    thetas = box.sample(n2, seeding.derive_seed(seed, seeding.SAMPLE, problem.index))
    dist = problem.objective.batch(thetas) if use_true_distance else problem.distance_batch(thetas)
    keep = dist <= eps
    kept = thetas[keep]
    weights = np.asarray(prior.pdf(kept), dtype=float).reshape(-1) / box.pdf(kept) if kept.size else np.empty(0)
    return problem.index, kept, weights, dist[keep], int(n2 - keep.sum())


def _count_accepting(problems, thetas, eps, use_true_distance):
    counts = np.zeros(thetas.shape[0], dtype=np.int64)
    for p in problems:
        d = p.objective.batch(thetas) if use_true_distance else p.distance_batch(thetas)
        counts += d <= eps
    return counts


class RomcPosterior:
    """Immutable approximate posterior.

    Parameters
    ----------
    problems
        Accepted problems, each with at least one region.
    prior
        The model prior.
    eps_cutoff
        Threshold of the indicator.
    bounds
        Finite box containing the prior mass; used for normalisation.
    use_true_distance
        Ignore surrogates and evaluate the simulator-backed objectives.
    """

    def __init__(self, problems: Sequence, prior, eps_cutoff: float, bounds, use_true_distance: bool = False):
        self.problems = tuple(p for p in problems if p.regions)
        if not self.problems:
            raise DegeneratePosteriorError("the posterior needs at least one accepted region")
        if eps_cutoff < 0:
            raise InvalidArgumentError("eps_cutoff must be nonnegative")
        self.prior = prior
        self.eps_cutoff = float(eps_cutoff)
        self.bounds = np.asarray(bounds, dtype=float)
        self.use_true_distance = use_true_distance
        self._z_cache: dict = {}
        self._gate = None

    @property
    def dim(self) -> int:
        return self.bounds.shape[0]

    @property
    def regions(self) -> list:
        return [box for p in self.problems for box in p.regions]

    def distance_functions(self) -> list:
        return [p.objective if self.use_true_distance else p.distance for p in self.problems]

    def _surrogate_gate(self):
        """Stacked box coordinates of all local surrogates, built once.

        A local surrogate is infinite outside its box, so a single vectorised
        containment test decides which of them need evaluating at all.
        """
        if self._gate is None:
            gated = [i for i, p in enumerate(self.problems) if isinstance(p.local_surrogate, QuadraticModel)]
            others = [i for i in range(len(self.problems)) if i not in set(gated)]
            if gated:
                fast = [self.problems[i].local_surrogate._fast for i in gated]
                self._gate = dict(
                    index=np.array(gated),
                    center=np.stack([self.problems[i].local_surrogate.box.center for i in gated]),
                    M=np.stack([f["M"] for f in fast]),
                    lo=np.stack([f["lo"] for f in fast]),
                    hi=np.stack([f["hi"] for f in fast]),
                    others=others,
                )
            else:
                self._gate = dict(index=np.array([], dtype=int), others=others)
        return self._gate

    def eval_unnorm_posterior(self, theta) -> float:
        theta = np.asarray(theta, dtype=float).reshape(self.dim)
        prior = float(self.prior.pdf(theta))
        if prior == 0.0:
            return 0.0
        eps = self.eps_cutoff
        if self.use_true_distance:
            return prior * sum(1 for p in self.problems if p.objective(theta) <= eps)
        gate = self._surrogate_gate()
        count = sum(1 for i in gate["others"] if self.problems[i].distance(theta) <= eps)
        if gate["index"].size:
            z = np.einsum("pd,pde->pe", theta - gate["center"], gate["M"])
            inside = np.all((z >= gate["lo"]) & (z <= gate["hi"]), axis=1)
            for i in gate["index"][inside]:
                count += self.problems[i].local_surrogate(theta) <= eps
        return prior * int(count)

    def eval_unnorm_batch(self, thetas, workers: int = 1) -> np.ndarray:
        """Vectorised :meth:`eval_unnorm_posterior` over the rows of ``thetas``."""
        thetas = np.atleast_2d(np.asarray(thetas, dtype=float))
        prior = np.asarray(self.prior.pdf(thetas), dtype=float).reshape(-1)
        out = np.zeros(thetas.shape[0])
        support = prior > 0
        if not np.any(support):
            return out
        pts = thetas[support]
        chunks = [self.problems[i::max(workers, 1)] for i in range(max(workers, 1))]
        fn = partial(_count_accepting, thetas=pts, eps=self.eps_cutoff, use_true_distance=self.use_true_distance)
        counts = sum(ordered_map(fn, [c for c in chunks if c], workers))
        out[support] = prior[support] * counts
        return out

    def tabulate(self, step: float = DEFAULT_STEP, workers: int = 1) -> GridFunction:
        if self.dim > MAX_GRID_DIM:
            raise InvalidArgumentError(f"grid evaluation supports D <= {MAX_GRID_DIM}")
        pts = grid_points(self.bounds, step)
        return GridFunction(self.bounds, step, self.eval_unnorm_batch(pts, workers))

    def partition_function(self, step: float = DEFAULT_STEP, workers: int = 1) -> float:
        key = float(step)
        if key not in self._z_cache:
            self._z_cache[key] = self.tabulate(step, workers).integral()
        return self._z_cache[key]

    def eval_posterior(self, theta, step: float = DEFAULT_STEP, workers: int = 1):
        """Normalised density; ``theta`` may be one point or an ``(N, D)`` batch."""
        z = self.partition_function(step, workers)
        if not z > 0:
            raise DegeneratePosteriorError("partition function is zero on the grid")
        theta = np.asarray(theta, dtype=float)
        if theta.ndim == 2:
            return self.eval_unnorm_batch(theta, workers) / z
        return self.eval_unnorm_posterior(theta) / z

    def sample(self, n2: int, seed: int, workers: int = 1) -> WeightedSampleSet:
        """Draw ``n2`` proposals per region, drop those outside ``eps_cutoff``, weight the rest."""
        if n2 < 1:
            raise InvalidArgumentError("n2 must be >= 1")
        jobs = [(p, box) for p in self.problems for box in p.regions]
        fn = partial(_sample_region, n2=n2, seed=seed, eps=self.eps_cutoff, prior=self.prior,
                     use_true_distance=self.use_true_distance)
        parts = ordered_map(fn, jobs, workers)
        n_kept = sum(len(w) for _, _, w, _, _ in parts)
        if n_kept == 0:
            raise DegeneratePosteriorError("no proposal fell inside eps_cutoff; increase eps")
        return WeightedSampleSet(
            problem_index=np.concatenate([np.full(len(w), i) for i, _, w, _, _ in parts]),
            thetas=np.vstack([t.reshape(-1, self.dim) for _, t, _, _, _ in parts]),
            weights=np.concatenate([w for _, _, w, _, _ in parts]),
            n_requested_per_region=n2,
            n_rejected=sum(r for *_, r in parts),
            distances=np.concatenate([d for _, _, _, d, _ in parts]),
        )


def eval_unnorm_posterior(post: RomcPosterior, theta) -> float:
    return post.eval_unnorm_posterior(theta)


def eval_posterior(post: RomcPosterior, theta, step: float = DEFAULT_STEP) -> float:
    return post.eval_posterior(theta, step)


def sample(post: RomcPosterior, n2: int, seed: int, workers: int = 1) -> WeightedSampleSet:
    return post.sample(n2, seed, workers)
