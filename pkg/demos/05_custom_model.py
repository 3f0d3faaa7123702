"""Plugging in your own simulator.

Any ``simulator(theta, seed)`` that is a pure function of its arguments
works. Here a queue's service rate and arrival rate are inferred from the
mean and spread of simulated waiting times. The simulator is written for
one theta at a time (``vectorized=False``).
"""

import numpy as np

from romc import ROMC, ModelSpec, UniformPrior


def waiting_times(theta, seed, n=50):
    """Lindley recursion for an M/M/1 queue driven by seeded exponentials."""
    arrival, service = theta
    rng = np.random.default_rng(seed)
    e_a, e_s = rng.exponential(size=(2, n))
    gaps, jobs = e_a / arrival, e_s / service
    w = np.zeros(n)
    for k in range(1, n):
        w[k] = max(0.0, w[k - 1] + jobs[k - 1] - gaps[k])
    return w


def summary(w):
    return np.array([w.mean(), w.std()])


bounds = [(0.2, 1.0), (1.0, 3.0)]
true_theta = np.array([0.6, 1.5])
model = ModelSpec(
    prior=UniformPrior(bounds),
    simulator=waiting_times,
    observed=waiting_times(true_theta, seed=2024),
    bounds=bounds,
    summary=summary,
    name="mm1",
)

romc = ROMC(model)
romc.solve_problems(n1=200, seed=1)
eps = romc.compute_eps(quantile=0.5)
print(f"eps from the median optimal distance: {eps:.3f}")
romc.estimate_regions(eps)
s = romc.sample(n2=40, seed=1)
print(f"{len(romc.accepted)} regions, {len(s)} samples, ESS {s.ess():.0f}")
print(f"posterior mean (arrival, service): {np.round(s.mean(), 3)}  true {true_theta}")
print(f"posterior std: {np.round(s.std(), 3)}")
