"""Exception hierarchy used across the package."""

from __future__ import annotations

import numpy as np


class RomcError(Exception):
    """Base class for all errors raised by :mod:`romc`."""


class InvalidArgumentError(RomcError, ValueError):
    pass


class EvaluationError(RomcError):
    """A simulator or objective evaluation failed or returned a non-finite value."""

    def __init__(self, message, theta=None, seed=None):
        self.theta = None if theta is None else np.array(theta, dtype=float, copy=True)
        self.seed = seed
        details = []
        if theta is not None:
            details.append(f"theta={self.theta.tolist()}")
        if seed is not None:
            details.append(f"seed={seed}")
        if details:
            message = f"{message} ({', '.join(details)})"
        super().__init__(message)


class OptimisationFailedError(RomcError):
    def __init__(self, message, problem_index=None):
        self.problem_index = problem_index
        if problem_index is not None:
            message = f"problem {problem_index}: {message}"
        super().__init__(message)


class FitError(RomcError):
    """A surrogate (GP or quadratic) could not be fitted."""


class DegeneratePosteriorError(RomcError):
    """Raised when the posterior has no mass: no accepted region, zero partition function, no kept samples."""


class BudgetExceededError(RomcError):
    def __init__(self, message, n_accepted=0, n_trials=0):
        self.n_accepted = n_accepted
        self.n_trials = n_trials
        rate = n_accepted / n_trials if n_trials else 0.0
        self.acceptance_rate = rate
        super().__init__(f"{message} (accepted {n_accepted} of {n_trials} trials, rate {rate:.3g})")
