"""High-level driver mirroring the training / inference / evaluation workflow.

    romc = ROMC(model, workers=4)
    romc.solve_problems(n1=500, seed=21)
    romc.estimate_regions(eps_filter=0.75)
    samples = romc.sample(n2=50, seed=21)

Each phase is a map over problem indices; with ``workers > 1`` the map
runs in a process pool, and results are identical to the sequential run.
"""

from __future__ import annotations

import logging
import time
from functools import partial
from typing import Callable, Optional

import numpy as np

from . import seeding
from .bo import BoOpts, solve_bo
from .errors import DegeneratePosteriorError, InvalidArgumentError
from .evaluate import GridFunction, divergence, grid_points, tabulate
from .model import EpsilonConfig, ModelSpec, make_problems, sample_nuisance
from .optimize import GradOpts, compute_eps, filter_solutions, solve_gradients
from .parallel import ordered_map
from .posterior import DEFAULT_STEP, RomcPosterior, WeightedSampleSet, compute_expectation
from .regions import build_box
from .surrogate import fit_local_surrogate

logger = logging.getLogger(__name__)


def _solve_job(problem, use_bo, grad_opts, bo_opts, seed, prior):
    if use_bo:
        result, gp = solve_bo(problem, bo_opts, seed=seeding.derive_seed(seed, seeding.BO, problem.index))
        return result, gp
    start = prior.sample(seeding.derive_rng(seed, seeding.START, problem.index))
    return solve_gradients(problem, start, grad_opts), None


def _region_job(problem, eps_region, eta0, K, use_surrogate, fit_models, n_train, seed):
    dist = problem.distance if use_surrogate else problem.objective
    box = build_box(problem, eps_region, eta0, K, distance=dist)
    local = None
    if fit_models:
        local = fit_local_surrogate(problem, box, n_train, seeding.derive_seed(seed, seeding.SURROGATE, problem.index))
    return [box], local


class ROMC:
    """Robust optimisation Monte Carlo on a :class:`~romc.model.ModelSpec`.

    Parameters
    ----------
    model
        The inference problem.
    bounds
        Box enclosing the prior mass; defaults to ``model.bounds``.
    workers
        Number of worker processes for each phase (1 = sequential).
    """

    def __init__(self, model: ModelSpec, bounds=None, workers: int = 1,
                 grad_opts: GradOpts = GradOpts(), bo_opts: BoOpts = BoOpts()):
        self.model = model
        self.bounds = model.bounds if bounds is None else np.asarray(bounds, dtype=float)
        self.workers = workers
        self.grad_opts = grad_opts
        self.bo_opts = bo_opts
        self.problems: Optional[list] = None
        self.accepted: Optional[list[int]] = None
        self.eps: Optional[EpsilonConfig] = None
        self.posterior: Optional[RomcPosterior] = None
        self.samples: Optional[WeightedSampleSet] = None
        self.use_bo = False
        self.seed = None
        self.timings: dict[str, float] = {}

    def _map(self, fn, items):
        return ordered_map(fn, items, self.workers)

    # ------------------------------------------------------------ training

    def solve_problems(self, n1: int, use_bo: bool = False, seed: int = 0) -> None:
        t0 = time.perf_counter()
        self.seed = seed
        self.use_bo = use_bo
        problems = make_problems(self.model, sample_nuisance(n1, seed))
        fn = partial(_solve_job, use_bo=use_bo, grad_opts=self.grad_opts, bo_opts=self.bo_opts,
                     seed=seed, prior=self.model.prior)
        for p, (result, gp) in zip(problems, self._map(fn, problems)):
            p.result = result
            if gp is not None:
                p.surrogate = gp
        self.problems = problems
        self.timings["solve"] = time.perf_counter() - t0
        logger.info("solved %d problems in %.2fs", n1, self.timings["solve"])

    def _require_solved(self):
        if self.problems is None:
            raise InvalidArgumentError("call solve_problems first")

    @property
    def d_stars(self) -> np.ndarray:
        self._require_solved()
        return np.array([p.result.d_star for p in self.problems])

    def distance_hist(self, bins: int = 50, range=None):
        """Histogram data (counts, bin edges) of the optimal distances."""
        return np.histogram(self.d_stars, bins=bins, range=range)

    def compute_eps(self, quantile: float) -> float:
        self._require_solved()
        ok = [p.result.d_star for p in self.problems if p.result.success]
        return compute_eps(ok if ok else self.d_stars, quantile)

    def estimate_regions(self, eps_filter: float, eps_region: Optional[float] = None,
                         eps_cutoff: Optional[float] = None, use_surrogate: Optional[bool] = None,
                         fit_models: bool = False, n_train: int = 30, eta0: float = 0.5, K: int = 10,
                         use_true_distance: bool = False) -> None:
        """Filter solutions, build one box per accepted problem and define the posterior."""
        self._require_solved()
        t0 = time.perf_counter()
        self.eps = EpsilonConfig(eps_filter,
                                 eps_filter if eps_region is None else eps_region,
                                 eps_filter if eps_cutoff is None else eps_cutoff)
        self.accepted = filter_solutions([p.result for p in self.problems], self.eps.eps_filter)
        if not self.accepted:
            raise DegeneratePosteriorError(
                f"no solution within eps_filter={eps_filter:g}; smallest d* is {np.min(self.d_stars):.4g}; increase eps")
        if use_surrogate is None:
            use_surrogate = self.use_bo
        accepted = [self.problems[i] for i in self.accepted]
        fn = partial(_region_job, eps_region=self.eps.eps_region, eta0=eta0, K=K, use_surrogate=use_surrogate,
                     fit_models=fit_models, n_train=n_train, seed=self.seed)
        for p, (regions, local) in zip(accepted, self._map(fn, accepted)):
            p.regions = regions
            if local is not None:
                p.local_surrogate = local
        self.timings["regions"] = time.perf_counter() - t0
        self.posterior = RomcPosterior(accepted, self.model.prior, self.eps.eps_cutoff, self.bounds,
                                       use_true_distance=use_true_distance)

    def fit_posterior(self, n1: int, eps_filter="auto", quantile: float = 0.9, use_bo: bool = False,
                      seed: int = 0, **region_kwargs) -> None:
        """Solve, pick ``eps`` (possibly automatically) and estimate regions in one call."""
        self.solve_problems(n1, use_bo=use_bo, seed=seed)
        if eps_filter == "auto":
            eps_filter = self.compute_eps(quantile)
        self.estimate_regions(float(eps_filter), **region_kwargs)

    # ------------------------------------------------------------ inference

    def _require_posterior(self):
        if self.posterior is None:
            raise InvalidArgumentError("call estimate_regions or fit_posterior first")

    def sample(self, n2: int, seed: int = 0) -> WeightedSampleSet:
        self._require_posterior()
        t0 = time.perf_counter()
        self.samples = self.posterior.sample(n2, seed, self.workers)
        self.timings["sample"] = time.perf_counter() - t0
        return self.samples

    def compute_expectation(self, h: Callable) -> float:
        if self.samples is None:
            raise InvalidArgumentError("call sample first")
        return compute_expectation(self.samples, h)

    def eval_unnorm_posterior(self, theta):
        self._require_posterior()
        theta = np.asarray(theta, dtype=float)
        if theta.ndim == 2:
            return self.posterior.eval_unnorm_batch(theta, self.workers)
        return self.posterior.eval_unnorm_posterior(theta)

    def eval_posterior(self, theta, step: float = DEFAULT_STEP):
        self._require_posterior()
        return self.posterior.eval_posterior(theta, step, self.workers)

    # ------------------------------------------------------------ evaluation

    def posterior_grid(self, step: float = DEFAULT_STEP) -> GridFunction:
        self._require_posterior()
        t0 = time.perf_counter()
        grid = self.posterior.tabulate(step, self.workers)
        self.timings["posterior_eval"] = time.perf_counter() - t0
        return grid

    def compute_divergence(self, gt_posterior: Callable, step: float = 0.1, distance: str = "Jensen-Shannon",
                           bounds=None) -> float:
        """Divergence between the approximate posterior and ``gt_posterior`` on a shared grid."""
        self._require_posterior()
        bounds = self.bounds if bounds is None else np.asarray(bounds, dtype=float)
        approx = GridFunction(bounds, step, self.posterior.eval_unnorm_batch(grid_points(bounds, step), self.workers))
        truth = tabulate(gt_posterior, bounds, step, batch=True)
        kind = "JS" if "jensen" in distance.lower() or distance.upper() == "JS" else "KL"
        return divergence(approx, truth, kind)

    def compute_ess(self) -> float:
        if self.samples is None:
            raise InvalidArgumentError("call sample first")
        return self.samples.ess()
