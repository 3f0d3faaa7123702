"""Acceptance criteria, one test per criterion.

Each test records a single ``[n] PASS|FAIL|SKIP ...`` line with the measured
values next to their tolerances; the lines are collected in the pytest
terminal summary. Seeds are fixed, so every number is reproducible.
"""

import time

import numpy as np
import pytest

from romc import BoundingBox, box_pdf, box_sample, build_box, compute_ess, curvature_directions, divergence, tabulate
from romc.optimize import OptimResult, finite_diff_gradient
from romc.runner import RunConfig, cpu_count, fit_romc, run_inference, run_rejection_abc, run_timing, time_surrogate_eval
from romc.surrogate import fit_quadratic

from .conftest import make_problem

SEED = 21


def _verdict(ok):
    return "PASS" if ok else "FAIL"


def _fmt(v):
    return "(" + ", ".join(f"{x:.3f}" for x in np.atleast_1d(v)) + ")"


def _timed(fn, *args):
    t0 = time.perf_counter()
    out = fn(*args)
    return out, time.perf_counter() - t0


# ---------------------------------------------------------------- 1

def test_criterion_1_gauss1d(record_criterion, tmp_path):
    cfg = RunConfig("gauss1d", n1=500, n2=50, eps=0.75, seed=SEED, output_dir=str(tmp_path))
    report, elapsed = _timed(run_inference, cfg)
    s = report.summary
    mean, var = s["mean"][0], s["std"][0] ** 2
    ess_ratio = s["ess"] / s["n_kept"]
    checks = {
        "mean": abs(mean) <= 0.15,
        "var": 0.85 <= var <= 1.30,
        "ess": ess_ratio >= 0.6,
        "js": report.divergence <= 0.05,
        "time": elapsed <= 120,
    }
    ok = all(checks.values())
    record_criterion(
        f"[1] {_verdict(ok)} gauss1d: mean {mean:.3f} (|.|<=0.15), var {var:.3f} in [0.85,1.30], "
        f"ESS/N {ess_ratio:.3f} >= 0.6, JS {report.divergence:.5f} <= 0.05, {elapsed:.1f}s <= 120s"
    )
    assert ok, checks


# ---------------------------------------------------------------- 2

def _check_2d(report):
    mean, std = np.array(report.summary["mean"]), np.array(report.summary["std"])
    return {
        "mean": np.all(np.abs(mean - [-0.45, 0.45]) <= 0.12),
        "std": np.all(np.abs(std - 0.935) <= 0.15),
    }, mean, std


def test_criterion_2_gauss2d_gradient(record_criterion):
    report, elapsed = _timed(run_inference, RunConfig("gauss2d", n1=500, n2=30, eps=0.4, seed=SEED))
    checks, mean, std = _check_2d(report)
    checks["js"] = report.divergence <= 0.12
    checks["time"] = elapsed <= 300
    # the end-to-end example is stricter about the first coordinate's reference value
    checks["example"] = np.all(np.abs(mean - [-0.474, 0.502]) <= 0.1)
    ok = all(checks.values())
    record_criterion(
        f"[2a] {_verdict(ok)} gauss2d gradient: mean {_fmt(mean)} vs (-0.45, 0.45)+-0.12, "
        f"std {_fmt(std)} vs 0.935+-0.15, JS {report.divergence:.4f} <= 0.12, {elapsed:.1f}s <= 300s"
    )
    assert ok, checks


def test_criterion_2_gauss2d_bo(record_criterion):
    report, elapsed = _timed(run_inference, RunConfig("gauss2d", n1=500, n2=30, eps=0.4, seed=SEED, use_bo=True))
    checks, mean, std = _check_2d(report)
    checks["js"] = report.divergence <= 0.15
    checks["time"] = elapsed <= 1200
    ok = all(checks.values())
    record_criterion(
        f"[2b] {_verdict(ok)} gauss2d BO: mean {_fmt(mean)} vs (-0.45, 0.45)+-0.12, "
        f"std {_fmt(std)} vs 0.935+-0.15, JS {report.divergence:.4f} <= 0.15, {elapsed:.1f}s <= 1200s"
    )
    assert ok, checks


# ---------------------------------------------------------------- 3

def test_criterion_3_ma2(record_criterion):
    t0 = time.perf_counter()
    abc = run_rejection_abc(RunConfig("ma2", eps=0.1, n_accept=10_000, seed=SEED))
    romc = run_inference(RunConfig("ma2", n1=500, n2=50, eps=0.1, seed=SEED))
    elapsed = time.perf_counter() - t0
    abc_mean, abc_std = np.array(abc.summary["mean"]), np.array(abc.summary["std"])
    r_mean, r_std = np.array(romc.summary["mean"]), np.array(romc.summary["std"])
    checks = {
        "abc_mean": np.all(np.abs(abc_mean - [0.516, 0.07]) <= 0.08),
        "abc_std": np.all(np.abs(abc_std - [0.142, 0.172]) <= 0.05),
        "romc_mean": np.all(np.abs(r_mean - abc_mean) <= 0.10),
        "romc_std": np.all(np.abs(r_std - [0.136, 0.178]) <= 0.06),
        "time": elapsed <= 600,
    }
    ok = all(checks.values())
    record_criterion(
        f"[3] {_verdict(ok)} ma2: ABC mean {_fmt(abc_mean)} vs (0.516, 0.070)+-0.08, "
        f"ABC std {_fmt(abc_std)} vs (0.142, 0.172)+-0.05, ROMC mean {_fmt(r_mean)} within 0.10 of ABC, "
        f"ROMC std {_fmt(r_std)} vs (0.136, 0.178)+-0.06, {elapsed:.1f}s <= 600s"
    )
    assert ok, checks


# ---------------------------------------------------------------- 4

@pytest.mark.parametrize("model, eps, n2", [("gauss1d", 0.75, 50), ("gauss2d", 0.4, 30), ("ma2", 0.1, 50)])
def test_criterion_4_determinism(record_criterion, tmp_path, model, eps, n2):
    reports = {}
    for parallel in (False, True):
        out = tmp_path / ("par" if parallel else "seq")
        cfg = RunConfig(model, n1=500, n2=n2, eps=eps, seed=SEED, parallel=parallel, workers=4, output_dir=str(out))
        reports[parallel] = run_inference(cfg)
    same_csv = (tmp_path / "seq" / "samples.csv").read_bytes() == (tmp_path / "par" / "samples.csv").read_bytes()
    same_summary = reports[False].summary == reports[True].summary
    ok = same_csv and same_summary
    record_criterion(f"[4] {_verdict(ok)} determinism {model}: samples.csv identical={same_csv}, "
                     f"summary identical={same_summary} (workers 1 vs 4)")
    assert ok


# ---------------------------------------------------------------- 5

def _properties():
    rng = np.random.default_rng(SEED)
    res = {}

    w = rng.exponential(size=200)
    res["ess"] = (compute_ess(np.ones(50)) == 50 and abs(compute_ess(7.3 * w) - compute_ess(w)) < 1e-9
                  and 1 <= compute_ess(w) <= 200)

    ok_box, ok_rot = True, True
    for k in range(5):
        R = np.linalg.qr(rng.standard_normal((3, 3)))[0]
        neg, pos = rng.uniform(0.1, 2, 3), rng.uniform(0.1, 2, 3)
        box = BoundingBox(rng.standard_normal(3), R, neg, pos)
        x = box_sample(box, 10_000, k)
        ok_box &= bool(np.all(box_pdf(box, x) > 0)) and abs(box_pdf(box, box.center) * box.volume - 1) < 1e-12
        axis = BoundingBox(np.zeros(3), np.eye(3), neg, pos)
        ok_rot &= abs(box.volume - axis.volume) < 1e-12
    res["box"], res["rotation"] = ok_box, ok_rot

    box = BoundingBox(np.zeros(2), np.linalg.qr(rng.standard_normal((2, 2)))[0], np.ones(2), np.ones(2))
    X = box_sample(box, 30, 1)
    f = lambda t: 1 + t[0] - 2 * t[1] + 3 * t[0] * t[1] + t[1] ** 2  # noqa: E731
    res["quadratic"] = fit_quadratic(box, X, np.array([f(x) for x in X])).rmse < 1e-8

    worst = 0.0
    for _ in range(50):
        a, b, c = rng.uniform(-3, 3, 3)
        x = rng.uniform(-2, 2, 2)
        g = np.array([3 * a * x[0] ** 2 + b * x[1], b * x[0] + 2 * c * x[1]])
        fd = finite_diff_gradient(lambda t: a * t[0] ** 3 + b * t[0] * t[1] + c * t[1] ** 2, x)
        worst = max(worst, np.linalg.norm(fd - g) / max(1.0, np.linalg.norm(g)))
    res["fd"] = worst < 1e-5

    gauss = tabulate(lambda t: np.exp(-0.5 * t[:, 0] ** 2) / np.sqrt(2 * np.pi), [(-5, 5)], 0.01, batch=True)
    res["riemann"] = abs(gauss.integral() - 1) <= 1e-3

    p = tabulate(lambda t: (t[:, 0] < 0).astype(float), [(-1, 1)], 0.1, batch=True)
    q = tabulate(lambda t: (t[:, 0] > 0).astype(float), [(-1, 1)], 0.1, batch=True)
    res["js"] = divergence(gauss, gauss) == 0 and abs(divergence(p, q) - np.log(2)) <= 1e-9

    prob = make_problem(lambda t: abs(t[0]), [(-5, 5)])
    prob.result = OptimResult(np.zeros(1), 0.0, True, 1, finite_diff_gradient(prob.objective, np.zeros(1)))
    b = build_box(prob, 1.0, eta0=0.5, K=10)
    res["box_search"] = abs(b.pos_extent[0] - 1) <= 0.01 and abs(b.neg_extent[0] - 1) <= 0.01

    res["singular"] = np.array_equal(curvature_directions(np.zeros(3)), np.eye(3))
    return res


def test_criterion_5_properties(record_criterion):
    res = _properties()
    ok = all(res.values())
    detail = ", ".join(f"{k}={'ok' if v else 'BAD'}" for k, v in res.items())
    record_criterion(f"[5] {_verdict(ok)} property suites: {detail} (full suites in the other test modules)")
    assert ok, res


# ---------------------------------------------------------------- 6

def test_criterion_6_parallel_speedup(record_criterion):
    cores = cpu_count()
    if cores < 4:
        record_criterion(f"[6a] SKIP solve-phase speedup > 1.5x with 4 workers: only {cores} CPU core(s) "
                         f"available, cannot be measured here")
        pytest.skip(f"needs >= 4 cores, have {cores}")
    rows = run_timing(RunConfig("gauss2d", n1=500, n2=30, eps=0.4, seed=SEED, workers=4), ["solve"])
    speedup = rows[0]["speedup"]
    ok = speedup > 1.5
    record_criterion(f"[6a] {_verdict(ok)} gauss2d solve speedup {speedup:.2f}x > 1.5x with 4 workers")
    assert ok


def test_criterion_6_surrogate_speedup(record_criterion):
    romc = fit_romc(RunConfig("gauss1d", n1=500, n2=50, eps=0.75, seed=SEED, fit_models=True))
    t = time_surrogate_eval(romc, n_points=50, seed=SEED)
    ok = t["speedup"] >= 3.0
    record_criterion(f"[6b] {_verdict(ok)} gauss1d local-surrogate posterior eval {t['speedup']:.2f}x faster "
                     f"than simulator-backed (>= 3x); {t['surrogate']:.3f}s vs {t['simulator']:.3f}s for 50 points")
    assert ok
