"""Benchmark models: a 1D toy with kinked mean, a 2D Gaussian and MA(2).

All simulators are vectorised over ``theta`` (shape ``(N, D)``) and draw
their noise from ``numpy.random.default_rng(seed)``, so one seed fixes the
noise for every row.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import InvalidArgumentError
from .model import ModelSpec, UniformPrior, euclidean, identity, squared_euclidean

# continuity of the 1D mean function at |theta| = 0.5
C_1D = 0.5 - 0.5**4

MA2_T = 100
MA2_TRUE_THETA = (0.6, 0.2)
# Fixed so that every MA(2) run shares one observation: the smallest seed
# whose observed autocovariances are within 0.05 of (0.552, 0.07).
MA2_DATA_SEED = 21


@dataclass
class ExampleModel:
    name: str
    model: ModelSpec
    ground_truth_unnorm: Optional[Callable] = None
    generating_theta: Optional[np.ndarray] = None
    data_seed: Optional[int] = None
    defaults: dict = field(default_factory=dict)


# ---------------------------------------------------------------- 1D example

def mean_1d(theta):
    theta = np.asarray(theta, dtype=float)
    return np.where(np.abs(theta) <= 0.5, theta**4, np.abs(theta) - C_1D)


def simulator_1d(theta, seed):
    u = np.random.default_rng(seed).standard_normal()
    return mean_1d(theta) + u


def _normal_pdf(x, mu):
    return np.exp(-0.5 * (x - mu) ** 2) / np.sqrt(2 * np.pi)


class GroundTruth1D:
    def __init__(self, prior, y0):
        self.prior = prior
        self.y0 = y0

    def __call__(self, theta):
        theta = np.asarray(theta, dtype=float)
        lik = _normal_pdf(self.y0, mean_1d(theta[..., 0]))
        out = self.prior.pdf(theta) * lik
        return float(out) if np.ndim(out) == 0 else out


def example_1d() -> ExampleModel:
    bounds = [(-2.5, 2.5)]
    prior = UniformPrior(bounds)
    model = ModelSpec(prior=prior, simulator=simulator_1d, observed=np.array([0.0]), bounds=bounds,
                      summary=identity, distance=euclidean, vectorized=True, name="gauss1d")
    return ExampleModel("gauss1d", model, GroundTruth1D(prior, 0.0),
                        defaults=dict(n1=500, n2=50, eps=0.75, seed=21))


# ---------------------------------------------------------------- 2D Gaussian

Y0_2D = (-0.5, 0.5)


def simulator_2d(theta, seed):
    z = np.random.default_rng(seed).standard_normal(2)
    return np.asarray(theta, dtype=float) + z


class GroundTruth2D:
    def __init__(self, prior, y0):
        self.prior = prior
        self.y0 = np.asarray(y0, dtype=float)

    def __call__(self, theta):
        theta = np.asarray(theta, dtype=float)
        r2 = np.sum((theta - self.y0) ** 2, axis=-1)
        out = self.prior.pdf(theta) * np.exp(-0.5 * r2) / (2 * np.pi)
        return float(out) if np.ndim(out) == 0 else out


def example_2d() -> ExampleModel:
    bounds = [(-2.5, 2.5), (-2.5, 2.5)]
    prior = UniformPrior(bounds)
    model = ModelSpec(prior=prior, simulator=simulator_2d, observed=np.array(Y0_2D), bounds=bounds,
                      summary=identity, distance=euclidean, vectorized=True, name="gauss2d")
    return ExampleModel("gauss2d", model, GroundTruth2D(prior, Y0_2D),
                        defaults=dict(n1=500, n2=30, eps=0.4, seed=21))


# ---------------------------------------------------------------- MA(2)

class MA2Prior:
    """theta1 ~ U(-2, 2), theta2 | theta1 ~ U(theta1 - 1, theta1 + 1).

    Support is a parallelogram. It does not restrict MA(2) to its
    identifiable region; :class:`MA2TrianglePrior` does.
    """

    bounds = np.array([(-2.0, 2.0), (-3.0, 3.0)])
    dim = 2

    def sample(self, rng, size=None):
        n = 1 if size is None else size
        t1 = rng.uniform(-2.0, 2.0, size=n)
        t2 = t1 + rng.uniform(-1.0, 1.0, size=n)
        out = np.stack([t1, t2], axis=1)
        return out[0] if size is None else out

    def pdf(self, theta):
        theta = np.asarray(theta, dtype=float)
        t1, t2 = theta[..., 0], theta[..., 1]
        inside = (np.abs(t1) <= 2.0) & (np.abs(t2 - t1) <= 1.0)
        out = np.where(inside, 1.0 / 8.0, 0.0)
        return float(out) if out.ndim == 0 else out

    def log_pdf(self, theta):
        with np.errstate(divide="ignore"):
            return np.log(self.pdf(theta))


class MA2TrianglePrior(MA2Prior):
    """Uniform on the triangle ``-2 < theta1 < 2``, ``|theta1| - 1 < theta2 < 1``.

    This is the invertibility region of MA(2). theta1 has a triangular
    marginal on (-2, 2) and theta2 | theta1 ~ U(|theta1| - 1, 1); the
    joint density is 1/4.
    """

    bounds = np.array([(-2.0, 2.0), (-1.0, 1.0)])

    def sample(self, rng, size=None):
        n = 1 if size is None else size
        t1 = rng.triangular(-2.0, 0.0, 2.0, size=n)
        t2 = rng.uniform(np.abs(t1) - 1.0, 1.0)
        out = np.stack([t1, t2], axis=1)
        return out[0] if size is None else out

    def pdf(self, theta):
        theta = np.asarray(theta, dtype=float)
        t1, t2 = theta[..., 0], theta[..., 1]
        inside = (np.abs(t1) <= 2.0) & (t2 >= np.abs(t1) - 1.0) & (t2 <= 1.0)
        out = np.where(inside, 0.25, 0.0)
        return float(out) if out.ndim == 0 else out


def ma2_from_noise(theta, w):
    """MA(2) series from explicit noise ``w = (w_-1, w_0, w_1, ..., w_T)``.

    ``theta`` may be ``(2,)`` or ``(N, 2)``; returns ``(T,)`` or ``(N, T)``.
    """
    theta = np.asarray(theta, dtype=float)
    w = np.asarray(w, dtype=float)
    t1, t2 = theta[..., 0:1], theta[..., 1:2]
    return w[2:] + t1 * w[1:-1] + t2 * w[:-2]


def simulator_ma2(theta, seed, T=MA2_T):
    w = np.random.default_rng(seed).standard_normal(T + 2)
    return ma2_from_noise(theta, w)


def autocov_summary(y):
    """Lag-1 and lag-2 autocovariance summaries (no mean removal)."""
    y = np.asarray(y, dtype=float)
    T = y.shape[-1]
    s1 = np.sum(y[..., 1:] * y[..., :-1], axis=-1) / (T - 1)
    s2 = np.sum(y[..., 2:] * y[..., :-2], axis=-1) / (T - 2)
    return np.stack([s1, s2], axis=-1)


def example_ma2(data_seed: int = MA2_DATA_SEED, prior: str = "triangle", distance: str = "euclidean") -> ExampleModel:
    """MA(2) with T = 100 and lag-1/lag-2 autocovariance summaries.

    ``prior`` is ``"triangle"`` (identifiable region) or ``"parallelogram"``;
    ``distance`` is ``"euclidean"`` or ``"squared"``.
    """
    priors = {"triangle": MA2TrianglePrior, "parallelogram": MA2Prior}
    distances = {"euclidean": euclidean, "squared": squared_euclidean}
    if prior not in priors or distance not in distances:
        raise InvalidArgumentError(f"unknown MA(2) variant prior={prior!r} distance={distance!r}")
    prior_obj = priors[prior]()
    theta0 = np.array(MA2_TRUE_THETA)
    y0 = simulator_ma2(theta0, data_seed)
    model = ModelSpec(prior=prior_obj, simulator=simulator_ma2, observed=y0, bounds=prior_obj.bounds,
                      summary=autocov_summary, distance=distances[distance], vectorized=True, name="ma2")
    return ExampleModel("ma2", model, None, generating_theta=theta0, data_seed=data_seed,
                        defaults=dict(n1=500, n2=50, eps=0.1, seed=21))


EXAMPLES = {
    "gauss1d": example_1d,
    "gauss2d": example_2d,
    "ma2": example_ma2,
}


def register_example(name: str, factory: Callable[[], ExampleModel]) -> None:
    """Make ``factory`` available under ``name`` to :func:`get_example` and the runner."""
    EXAMPLES[name] = factory


def get_example(name: str) -> ExampleModel:
    try:
        return EXAMPLES[name]()
    except KeyError:
        raise InvalidArgumentError(f"unknown model {name!r}; choose from {sorted(EXAMPLES)}") from None
