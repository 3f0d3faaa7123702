"""Seed derivation helpers.

Every random stream in the package is keyed by a master seed plus the
integer coordinates of the task that consumes it (problem index, trial
index, ...). Workers therefore never share generator state, and results
do not depend on scheduling.
"""

from __future__ import annotations

import numpy as np

# stream tags, so that different phases never reuse a stream for the same index
START = 0
BO = 1
SURROGATE = 2
SAMPLE = 3
ABC_PRIOR = 4
ABC_SIM = 5
GRID = 6


def derive_seed(master_seed: int, *keys: int) -> int:
    """Return a 64-bit seed that is a deterministic function of ``(master_seed, *keys)``."""
    ss = np.random.SeedSequence([int(master_seed), *(int(k) for k in keys)])
    lo, hi = ss.generate_state(2, dtype=np.uint32)
    return int(hi) << 32 | int(lo)


def derive_rng(master_seed: int, *keys: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(master_seed), *(int(k) for k in keys)]))
