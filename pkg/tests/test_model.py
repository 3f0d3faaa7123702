import pickle

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from romc import (
    EpsilonConfig,
    EvaluationError,
    InvalidArgumentError,
    ModelSpec,
    UniformPrior,
    example_1d,
    example_2d,
    indicator,
    make_objective,
    sample_nuisance,
)
from romc.model import ObjectiveProblem
from romc.seeding import derive_seed


# ---------------------------------------------------------------- nuisance seeds

def test_sample_nuisance_is_deterministic():
    assert sample_nuisance(3, 21) == sample_nuisance(3, 21)


def test_sample_nuisance_range():
    seeds = sample_nuisance(500, 21)
    assert len(seeds) == 500
    assert all(1 <= u <= 2**32 - 1 for u in seeds)
    assert all(isinstance(u, int) for u in seeds)


def test_sample_nuisance_seed_changes_values():
    assert sample_nuisance(1, 0) != sample_nuisance(1, 1)


def test_sample_nuisance_prefix_stable():
    # the i-th seed does not depend on how many are drawn
    assert sample_nuisance(10, 7)[:4] == sample_nuisance(4, 7)


def test_sample_nuisance_rejects_empty():
    with pytest.raises(InvalidArgumentError):
        sample_nuisance(0, 1)


@given(st.integers(min_value=0, max_value=2**64 - 1))
@settings(max_examples=30, deadline=None)
def test_sample_nuisance_any_uint64_seed(seed):
    u = sample_nuisance(5, seed)
    assert all(1 <= v <= 2**32 - 1 for v in u)


# ---------------------------------------------------------------- objectives

def test_gauss2d_objective_nonnegative():
    model = example_2d().model
    prob = make_objective(model, 12345)
    rng = np.random.default_rng(0)
    for theta in rng.uniform(-2.5, 2.5, size=(100, 2)):
        assert prob.objective(theta) >= 0


def test_gauss1d_objective_deterministic():
    prob = make_objective(example_1d().model, 987)
    assert prob.objective(np.array([0.0])) == prob.objective(np.array([0.0]))


def test_gauss2d_objective_matches_recomputed_noise():
    # oracle: redraw the noise from the seed independently of the library
    u = 424242
    prob = make_objective(example_2d().model, u)
    z = np.random.Generator(np.random.PCG64(u)).standard_normal(2)
    for theta in [np.array([0.3, -1.2]), np.array([-0.5, 0.5]), np.array([2.0, 2.0])]:
        expected = np.sqrt(np.sum((theta + z - np.array([-0.5, 0.5])) ** 2))
        assert prob.objective(theta) == pytest.approx(expected, abs=1e-12)


def test_objective_batch_equals_scalar():
    prob = make_objective(example_2d().model, 99)
    X = np.random.default_rng(1).uniform(-2, 2, size=(20, 2))
    np.testing.assert_allclose(prob.objective.batch(X), [prob.objective(x) for x in X], rtol=0, atol=1e-14)


def test_objective_is_picklable():
    prob = make_objective(example_1d().model, 5)
    clone = pickle.loads(pickle.dumps(prob.objective))
    assert clone(np.array([0.3])) == prob.objective(np.array([0.3]))


def _model(simulator):
    return ModelSpec(prior=UniformPrior([(-1, 1)]), simulator=simulator, observed=np.array([0.0]), bounds=[(-1, 1)])


def test_nonfinite_simulator_output_raises_evaluation_error():
    prob = make_objective(_model(lambda theta, seed: np.array([np.nan])), 3)
    with pytest.raises(EvaluationError) as info:
        prob.objective(np.array([0.1]))
    assert info.value.seed == 3


def test_simulator_exception_is_wrapped():
    def broken(theta, seed):
        raise RuntimeError("boom")

    with pytest.raises(EvaluationError):
        make_objective(_model(broken), 1).objective(np.array([0.0]))


# ---------------------------------------------------------------- problems

def test_problem_fields_cannot_be_reset(problem_factory):
    p = problem_factory(lambda t: t @ t, [(-1, 1)])
    p.surrogate = lambda t: 0.0
    with pytest.raises(InvalidArgumentError):
        p.surrogate = None
    p.regions = ["box"]
    with pytest.raises(InvalidArgumentError):
        p.regions = []


def test_distance_precedence(problem_factory):
    p = problem_factory(lambda t: 3.0, [(-1, 1)])
    x = np.array([0.0])
    assert p.distance(x) == 3.0
    p.surrogate = lambda t: 2.0
    assert p.distance(x) == 2.0
    p.local_surrogate = lambda t: 1.0
    assert p.distance(x) == 1.0


# ---------------------------------------------------------------- indicator, eps

@pytest.mark.parametrize("d, eps, expected", [(0.0, 0.4, 1), (0.5, 0.4, 0), (0.4, 0.4, 1)])
def test_indicator(d, eps, expected):
    assert indicator(d, eps) == expected


def test_indicator_elementwise():
    np.testing.assert_array_equal(indicator(np.array([0.1, 0.5, 0.4]), 0.4), [1, 0, 1])


def test_epsilon_config():
    cfg = EpsilonConfig.single(0.3)
    assert cfg.eps_filter == cfg.eps_region == cfg.eps_cutoff == 0.3
    with pytest.raises(InvalidArgumentError):
        EpsilonConfig(-1.0, 0.1, 0.1)


# ---------------------------------------------------------------- prior

def test_uniform_prior_pdf_and_sampling():
    prior = UniformPrior([(-2.5, 2.5), (0, 1)])
    assert prior.pdf(np.array([0.0, 0.5])) == pytest.approx(1 / 5)
    assert prior.pdf(np.array([3.0, 0.5])) == 0.0
    draws = prior.sample(np.random.default_rng(0), size=1000)
    assert draws.shape == (1000, 2)
    assert np.all(prior.pdf(draws) > 0)
    assert prior.log_pdf(np.array([9.0, 0.0])) == -np.inf


def test_uniform_prior_rejects_bad_bounds():
    with pytest.raises(InvalidArgumentError):
        UniformPrior([(1.0, 1.0)])


# ---------------------------------------------------------------- seeding

def test_derive_seed_distinct_and_stable():
    seeds = {derive_seed(21, tag, i) for tag in range(3) for i in range(50)}
    assert len(seeds) == 150
    assert derive_seed(21, 1, 2) == derive_seed(21, 1, 2)
