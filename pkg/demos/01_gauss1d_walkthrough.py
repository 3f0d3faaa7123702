"""A first ROMC run on a one-dimensional toy problem.

The simulator is ``y = m(theta) + u`` with ``u ~ N(0, 1)``, where ``m`` is
``theta**4`` near the origin and ``|theta| - c`` further out. Fixing the
seed of ``u`` turns each simulator into a deterministic function of theta,
and every such function becomes one optimisation problem.

Run with ``python3 demos/01_gauss1d_walkthrough.py``.
"""

import numpy as np

from romc import ROMC, example_1d

ex = example_1d()
romc = ROMC(ex.model)

# Training part 1: draw n1 seeds and minimise each distance function.
romc.solve_problems(n1=500, seed=21)
d = romc.d_stars
print(f"solved {d.size} problems in {romc.timings['solve']:.2f}s")
print(f"optimal distances: median {np.median(d):.2e}, 90% quantile {np.quantile(d, 0.9):.2e}")

# A coarse text histogram stands in for the distance plot.
counts, edges = romc.distance_hist(bins=8, range=(0, 2))
for c, lo, hi in zip(counts, edges[:-1], edges[1:]):
    print(f"  [{lo:4.2f}, {hi:4.2f})  {'#' * int(60 * c / max(counts.max(), 1))}")

# Training part 2: keep solutions within eps and build a proposal box around each.
romc.estimate_regions(eps_filter=0.75)
widths = np.array([b.widths[0] for b in romc.posterior.regions])
print(f"\n{len(romc.accepted)} accepted; box widths from {widths.min():.3f} to {widths.max():.3f}")

# Inference: 50 proposals per box, weighted by prior / proposal.
samples = romc.sample(n2=50, seed=21)
mu = romc.compute_expectation(lambda t: t[0])
var = romc.compute_expectation(lambda t: (t[0] - mu) ** 2)
print(f"kept {len(samples)} samples, ESS {samples.ess():.1f}")
print(f"posterior mean {mu:.3f}, variance {var:.3f}")

# Evaluation: the posterior density against the exact one on a grid.
for theta in (-1.5, 0.0, 1.5):
    print(f"  p(theta={theta:+.1f} | y0) = {romc.eval_posterior(np.array([theta])):.3f}")
js = romc.compute_divergence(ex.ground_truth_unnorm, step=0.05)
print(f"Jensen-Shannon divergence to the exact posterior: {js:.5f}")
