"""Rejection ABC, used as a reference sampler."""

from __future__ import annotations

from dataclasses import dataclass
from functools import partial

import numpy as np

from . import seeding
from .errors import BudgetExceededError, InvalidArgumentError
from .parallel import ordered_map

BATCH_SIZE = 2000


@dataclass
class ABCResult:
    samples: np.ndarray
    distances: np.ndarray
    n_trials: int

    @property
    def acceptance_rate(self) -> float:
        return len(self.samples) / self.n_trials


def _run_batch(b, model, seed, start, stop):
    """Simulate trials ``start..stop-1``; their randomness depends only on ``(seed, b)``."""
    rng = seeding.derive_rng(seed, seeding.ABC_PRIOR, b)
    n = stop - start
    # always draw a full batch so a trial's values never depend on max_trials
    thetas = np.atleast_2d(model.prior.sample(rng, size=BATCH_SIZE))[:n]
    sim_seeds = rng.integers(0, 2**63 - 1, size=BATCH_SIZE)[:n]
    dist = np.array([model.discrepancy(t, int(s)) for t, s in zip(thetas, sim_seeds)])
    return thetas, dist


def rejection_abc_run(model, n_accept: int, eps: float, max_trials: int, seed: int, workers: int = 1) -> ABCResult:
    """Accept prior draws whose simulated summaries lie within ``eps``.

    Trials are grouped in fixed batches evaluated ``workers`` at a time;
    the first ``n_accept`` acceptances by trial index are returned, so the
    result is identical for any worker count.
    """
    if n_accept < 1 or eps < 0 or max_trials < n_accept:
        raise InvalidArgumentError("need n_accept >= 1, eps >= 0 and max_trials >= n_accept")
    thetas, dists = [], []
    n_acc = 0
    b = 0
    wave = max(1, workers)
    while True:
        starts = [(b + k) * BATCH_SIZE for k in range(wave)]
        spans = [(s, min(s + BATCH_SIZE, max_trials)) for s in starts if s < max_trials]
        if not spans:
            break
        jobs = [(b + k, s, e) for k, (s, e) in enumerate(spans)]
        fn = partial(_abc_job, model=model, seed=seed)
        for (bi, s, e), (th, d) in zip(jobs, ordered_map(fn, jobs, workers)):
            acc = np.flatnonzero(d <= eps)
            need = n_accept - n_acc
            if acc.size >= need:
                last = acc[need - 1]
                thetas.append(th[acc[:need]])
                dists.append(d[acc[:need]])
                return ABCResult(np.vstack(thetas), np.concatenate(dists), int(s + last + 1))
            thetas.append(th[acc])
            dists.append(d[acc])
            n_acc += acc.size
        b += len(spans)
    raise BudgetExceededError("rejection ABC ran out of trials", n_accepted=n_acc, n_trials=max_trials)


def _abc_job(job, model, seed):
    b, start, stop = job
    return _run_batch(b, model, seed, start, stop)


def rejection_abc(model, n_accept: int, eps: float, max_trials: int, seed: int, workers: int = 1) -> np.ndarray:
    return rejection_abc_run(model, n_accept, eps, max_trials, seed, workers).samples
