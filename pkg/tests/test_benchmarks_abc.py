import numpy as np
import pytest

from romc import (
    BudgetExceededError,
    InvalidArgumentError,
    ModelSpec,
    UniformPrior,
    example_1d,
    example_2d,
    example_ma2,
    get_example,
    rejection_abc,
    rejection_abc_run,
)
from romc.abc import BATCH_SIZE
from romc.benchmarks import (
    C_1D,
    MA2_DATA_SEED,
    MA2Prior,
    MA2TrianglePrior,
    autocov_summary,
    ma2_from_noise,
    mean_1d,
    simulator_ma2,
)
from romc.evaluate import tabulate

# ---------------------------------------------------------------- 1D


def test_1d_mean_function_is_continuous():
    assert mean_1d(0.5) == pytest.approx(0.0625)
    assert C_1D == 0.4375
    assert mean_1d(0.5 + 1e-12) == pytest.approx(0.0625, abs=1e-9)


def test_1d_ground_truth_symmetric():
    gt = example_1d().ground_truth_unnorm
    for t in np.linspace(0, 2.5, 40):
        assert gt(np.array([t])) == pytest.approx(gt(np.array([-t])), abs=1e-12)


# ---------------------------------------------------------------- 2D


def test_2d_ground_truth_moments():
    ex = example_2d()
    g = tabulate(ex.ground_truth_unnorm, ex.model.bounds, 0.01, batch=True)
    mean, std = g.marginal_moments()
    np.testing.assert_allclose(mean, [-0.45, 0.45], atol=0.01)
    np.testing.assert_allclose(std, [0.935, 0.935], atol=0.01)
    best = g.points[np.argmax(g.values)]
    np.testing.assert_allclose(best, [-0.5, 0.5], atol=0.01)


# ---------------------------------------------------------------- MA(2)


def test_parallelogram_prior_pdf():
    prior = MA2Prior()
    assert prior.pdf(np.array([0.0, 0.0])) == 1 / 8
    assert prior.pdf(np.array([0.0, 1.5])) == 0.0
    draws = prior.sample(np.random.default_rng(0), 5000)
    assert np.all(prior.pdf(draws) > 0)


def test_triangle_prior_pdf_and_samples():
    prior = MA2TrianglePrior()
    assert prior.pdf(np.array([0.0, 0.0])) == 0.25
    assert prior.pdf(np.array([1.5, 0.0])) == 0.0  # theta2 < |theta1| - 1
    draws = prior.sample(np.random.default_rng(0), 20_000)
    assert np.all(prior.pdf(draws) > 0)
    # a uniform triangle with vertices (-2,1), (2,1), (0,-1) has centroid (0, 1/3)
    np.testing.assert_allclose(draws.mean(axis=0), [0.0, 1 / 3], atol=0.02)


def test_ma2_hand_computed_series():
    w = np.array([0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0])  # zero presample, then (1,0,0,0,0)
    y = ma2_from_noise(np.array([0.0, 0.0]), w)
    np.testing.assert_array_equal(y, [1, 0, 0, 0, 0])
    np.testing.assert_array_equal(autocov_summary(y), [0.0, 0.0])


def test_ma2_series_recurrence():
    w = np.random.default_rng(1).standard_normal(12)
    y = ma2_from_noise(np.array([0.6, 0.2]), w)
    for t in range(10):
        assert y[t] == pytest.approx(w[t + 2] + 0.6 * w[t + 1] + 0.2 * w[t])


def test_ma2_summary_matches_theoretical_autocovariance():
    s = np.array([autocov_summary(simulator_ma2(np.array([0.6, 0.2]), seed)) for seed in range(1000)])
    np.testing.assert_allclose(s.mean(axis=0), [0.72, 0.2], atol=0.05)


def test_ma2_vectorised_simulator_matches_rows():
    thetas = np.array([[0.6, 0.2], [-0.3, 0.1]])
    both = simulator_ma2(thetas, 77)
    for t, row in zip(thetas, both):
        np.testing.assert_array_equal(simulator_ma2(t, 77), row)


def test_ma2_observation_seed_rule():
    # smallest seed whose summaries are within 0.05 of (0.552, 0.07)
    target = np.array([0.516 * 1.07, 0.07])
    theta0 = np.array([0.6, 0.2])
    ok = [s for s in range(MA2_DATA_SEED + 1)
          if np.max(np.abs(autocov_summary(simulator_ma2(theta0, s)) - target)) <= 0.05]
    assert ok[0] == MA2_DATA_SEED


def test_ma2_variants():
    assert isinstance(example_ma2().model.prior, MA2TrianglePrior)
    assert isinstance(example_ma2(prior="parallelogram").model.prior, MA2Prior)
    with pytest.raises(InvalidArgumentError):
        example_ma2(distance="manhattan")


def test_registry():
    for name in ("gauss1d", "gauss2d", "ma2"):
        assert get_example(name).name == name
    with pytest.raises(InvalidArgumentError):
        get_example("tb")


# ---------------------------------------------------------------- rejection ABC


def zero_distance_model():
    return ModelSpec(prior=UniformPrior([(0, 1)]), simulator=lambda t, s: np.zeros(1), observed=np.zeros(1),
                     bounds=[(0, 1)])


def test_abc_zero_distance_accepts_everything():
    res = rejection_abc_run(zero_distance_model(), 50, 0.1, 1000, seed=3)
    assert res.acceptance_rate == 1.0
    assert res.samples.shape == (50, 1)
    assert np.all((res.samples >= 0) & (res.samples <= 1))


def test_abc_eps_zero_exhausts_budget():
    with pytest.raises(BudgetExceededError) as info:
        rejection_abc(example_1d().model, 5, 0.0, 500, seed=1)
    assert info.value.n_accepted == 0
    assert info.value.acceptance_rate == 0.0


def test_abc_is_deterministic_and_worker_invariant():
    model = example_2d().model
    a = rejection_abc_run(model, 200, 0.5, 10 * BATCH_SIZE, seed=8, workers=1)
    b = rejection_abc_run(model, 200, 0.5, 10 * BATCH_SIZE, seed=8, workers=3)
    np.testing.assert_array_equal(a.samples, b.samples)
    assert a.n_trials == b.n_trials


def test_abc_budget_does_not_change_draws():
    model = example_2d().model
    a = rejection_abc_run(model, 20, 0.5, BATCH_SIZE + 500, seed=2)
    b = rejection_abc_run(model, 20, 0.5, 10**6, seed=2)
    np.testing.assert_array_equal(a.samples, b.samples)


def test_abc_accepted_distances_within_eps():
    res = rejection_abc_run(example_2d().model, 100, 0.3, 10**6, seed=4)
    assert np.all(res.distances <= 0.3)


def test_abc_validates():
    with pytest.raises(InvalidArgumentError):
        rejection_abc(zero_distance_model(), 10, 0.1, 5, seed=0)
