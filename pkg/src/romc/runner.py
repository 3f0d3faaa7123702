"""End-to-end runs on the registered examples, with file outputs.

Every artifact written here is a function of the configuration alone:
worker count changes wall-clock time and nothing else. The one exception
is the ``timings`` block of ``report.json``.
"""

from __future__ import annotations

import csv
import json
import math
import os
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional, Union

import numpy as np

from .abc import rejection_abc_run
from .benchmarks import get_example
from .errors import InvalidArgumentError
from .evaluate import MAX_GRID_DIM, _fmt, divergence, tabulate
from .inference import ROMC
from .posterior import compute_ess

PHASES = ("solve", "regions", "sample", "posterior_eval")


# ------------------------------------------------------------------ JSON

def _json_float(x: float) -> str:
    if not math.isfinite(x):
        return "null"
    s = _fmt(x)
    if not any(c in s for c in ".en"):
        s += ".0"
    return s


def dumps(obj, indent: int = 1, _level: int = 0) -> str:
    """Serialise ``obj`` as JSON with floats written to 17 significant digits.

    Parsing the output with :func:`json.loads` and calling ``dumps`` again
    gives the same bytes. Non-finite floats become ``null``.
    """
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, (bool, np.bool_)) or obj is None:
        return json.dumps(None if obj is None else bool(obj))
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _json_float(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k), ensure_ascii=False)}: {dumps(v, indent, _level + 1)}"
                 for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(isinstance(v, (int, float, np.integer, np.floating)) and not isinstance(v, bool) for v in obj):
            return "[" + ", ".join(dumps(v) for v in obj) + "]"
        return "[\n" + ",\n".join(pad + dumps(v, indent, _level + 1) for v in obj) + "\n" + end + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


# ------------------------------------------------------------------ config

@dataclass
class RunConfig:
    model_name: str
    n1: int = 500
    n2: int = 50
    eps: Union[float, str] = "auto"
    quantile: float = 0.9
    use_bo: bool = False
    fit_models: bool = False
    seed: int = 21
    parallel: bool = False
    workers: int = 1
    grid_step: float = 0.05
    output_dir: Optional[str] = None
    n_accept: int = 10_000
    max_trials: int = 10_000_000

    def __post_init__(self):
        if self.n1 < 1 or self.n2 < 1:
            raise InvalidArgumentError("n1 and n2 must be >= 1")
        if not 0.0 <= self.quantile <= 1.0:
            raise InvalidArgumentError("quantile must lie in [0, 1]")
        if not self.grid_step > 0:
            raise InvalidArgumentError("grid_step must be positive")
        if self.workers < 1:
            raise InvalidArgumentError("workers must be >= 1")
        if self.seed < 0 or self.seed >= 2**64:
            raise InvalidArgumentError("seed must be a uint64")
        if isinstance(self.eps, str):
            if self.eps != "auto":
                raise InvalidArgumentError(f"eps must be a number or 'auto', got {self.eps!r}")
        elif not self.eps >= 0:
            raise InvalidArgumentError("eps must be nonnegative")

    @property
    def n_workers(self) -> int:
        return self.workers if self.parallel else 1


@dataclass
class RunReport:
    config: dict
    d_star: list
    accepted: int
    eps: Optional[float]
    boxes: list
    problem_index: np.ndarray
    thetas: np.ndarray
    weights: np.ndarray
    summary: dict
    divergence: Optional[float] = None
    timings: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "config": self.config,
            "eps": self.eps,
            "accepted": self.accepted,
            "summary": self.summary,
            "divergence": self.divergence,
            "timings": self.timings,
            "d_star": list(self.d_star),
            "boxes": self.boxes,
            "samples": {
                "problem_index": self.problem_index.tolist(),
                "theta": self.thetas.tolist(),
                "weight": self.weights.tolist(),
            },
        }

    def write(self, out_dir) -> None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "report.json").write_text(dumps(self.to_dict()) + "\n", encoding="utf-8")
        write_samples_csv(out / "samples.csv", self.problem_index, self.thetas, self.weights)


def summarise(thetas, weights, n_rejected: int = 0) -> dict:
    thetas = np.atleast_2d(thetas)
    w = np.asarray(weights, dtype=float)
    total = w.sum()
    mean = w @ thetas / total
    std = np.sqrt(w @ (thetas - mean) ** 2 / total)
    return {"mean": mean.tolist(), "std": std.tolist(), "ess": compute_ess(w),
            "n_kept": int(w.size), "n_rejected": int(n_rejected)}


def write_samples_csv(path, problem_index, thetas, weights) -> None:
    thetas = np.atleast_2d(thetas)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["problem_index"] + [f"theta_{d + 1}" for d in range(thetas.shape[1])] + ["weight"])
        for i, t, w in zip(problem_index, thetas, weights):
            writer.writerow([int(i)] + [_fmt(x) for x in t] + [_fmt(w)])


def read_samples_csv(path):
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return data[:, 0].astype(int), data[:, 1:-1], data[:, -1]


def write_hist_csv(path, counts, edges) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["bin_lo", "bin_hi", "count"])
        for lo, hi, c in zip(edges[:-1], edges[1:], counts):
            writer.writerow([_fmt(lo), _fmt(hi), int(c)])


def _config_echo(config: RunConfig) -> dict:
    echo = asdict(config)
    echo.pop("output_dir")
    echo.pop("parallel")
    echo.pop("workers")  # worker count must not change any artifact
    return echo


# ------------------------------------------------------------------ runs

def fit_romc(config: RunConfig) -> ROMC:
    """Train ROMC on ``config.model_name``; sampling is left to the caller."""
    example = get_example(config.model_name)
    romc = ROMC(example.model, workers=config.n_workers)
    romc.solve_problems(config.n1, use_bo=config.use_bo, seed=config.seed)
    eps = romc.compute_eps(config.quantile) if config.eps == "auto" else float(config.eps)
    romc.estimate_regions(eps, fit_models=config.fit_models)
    return romc


def run_inference(config: RunConfig) -> RunReport:
    """Run the full pipeline and, if ``config.output_dir`` is set, write its artifacts.

    Writes ``report.json``, ``samples.csv`` and ``dstar_hist.csv``. For
    ``D <= 2`` models with a ground truth it also writes
    ``posterior_grid.csv`` and ``ground_truth_grid.csv`` and records the
    Jensen-Shannon divergence between the two.
    """
    example = get_example(config.model_name)
    romc = fit_romc(config)
    samples = romc.sample(config.n2, seed=config.seed)

    div = None
    grids = None
    if example.ground_truth_unnorm is not None and romc.model.dim <= min(2, MAX_GRID_DIM):
        approx = romc.posterior_grid(config.grid_step)
        truth = tabulate(example.ground_truth_unnorm, romc.bounds, config.grid_step, batch=True)
        div = divergence(approx, truth, "JS")
        grids = approx, truth

    report = RunReport(
        config=_config_echo(config),
        d_star=romc.d_stars.tolist(),
        accepted=len(romc.accepted),
        eps=romc.eps.eps_filter,
        boxes=[dict(problem_index=p.index, **box.to_dict()) for p in romc.posterior.problems for box in p.regions],
        problem_index=samples.problem_index,
        thetas=samples.thetas,
        weights=samples.weights,
        summary=summarise(samples.thetas, samples.weights, samples.n_rejected),
        divergence=div,
        timings=dict(romc.timings),
    )
    if config.output_dir is not None:
        out = Path(config.output_dir)
        report.write(out)
        finite = romc.d_stars[np.isfinite(romc.d_stars)]
        counts, edges = np.histogram(finite, bins=50)
        write_hist_csv(out / "dstar_hist.csv", counts, edges)
        if grids is not None:
            grids[0].to_csv(out / "posterior_grid.csv")
            grids[1].to_csv(out / "ground_truth_grid.csv")
    return report


def run_rejection_abc(config: RunConfig) -> RunReport:
    """Rejection ABC with ``config.n_accept`` acceptances at threshold ``config.eps``."""
    if config.eps == "auto":
        raise InvalidArgumentError("rejection ABC needs a numeric eps")
    example = get_example(config.model_name)
    t0 = time.perf_counter()
    res = rejection_abc_run(example.model, config.n_accept, float(config.eps), config.max_trials,
                            config.seed, workers=config.n_workers)
    elapsed = time.perf_counter() - t0
    n = len(res.samples)
    weights = np.ones(n)
    summary = summarise(res.samples, weights, res.n_trials - n)
    summary["acceptance_rate"] = res.acceptance_rate
    summary["n_trials"] = res.n_trials
    report = RunReport(
        config=_config_echo(config), d_star=[], accepted=n, eps=float(config.eps), boxes=[],
        problem_index=np.arange(n), thetas=res.samples, weights=weights, summary=summary,
        timings={"abc": elapsed},
    )
    if config.output_dir is not None:
        report.write(config.output_dir)
    return report


def time_surrogate_eval(romc: ROMC, n_points: int = 50, seed: int = 0) -> dict:
    """Wall-clock of scalar posterior evaluation with local surrogates vs the simulator.

    ``romc`` must have been fitted with ``fit_models=True``.
    """
    post = romc.posterior
    if not all(p.local_surrogate is not None for p in post.problems):
        raise InvalidArgumentError("time_surrogate_eval needs fit_models=True")
    rng = np.random.default_rng(seed)
    lo, hi = romc.bounds[:, 0], romc.bounds[:, 1]
    pts = rng.uniform(lo, hi, size=(n_points, lo.size))
    out = {}
    for label, flag in (("surrogate", False), ("simulator", True)):
        post.use_true_distance = flag
        t0 = time.perf_counter()
        for p in pts:
            post.eval_unnorm_posterior(p)
        out[label] = time.perf_counter() - t0
    post.use_true_distance = False
    out["speedup"] = out["simulator"] / out["surrogate"]
    return out


def _phase_times(config: RunConfig, workers: int) -> dict:
    cfg = RunConfig(**{**asdict(config), "parallel": workers > 1, "workers": workers, "output_dir": None})
    romc = fit_romc(cfg)
    romc.sample(cfg.n2, seed=cfg.seed)
    if romc.model.dim <= MAX_GRID_DIM:
        romc.posterior_grid(cfg.grid_step)
    return {k: romc.timings.get(k, math.nan) for k in PHASES}


def run_timing(config: RunConfig, phases=PHASES) -> list[dict]:
    """Per-phase wall-clock for a sequential run and a run with ``config.workers`` workers.

    Returns one row per phase (``phase, sequential_s, parallel_s, speedup``)
    and writes ``timing.csv`` when ``config.output_dir`` is set.
    """
    unknown = set(phases) - set(PHASES)
    if unknown:
        raise InvalidArgumentError(f"unknown phases {sorted(unknown)}")
    seq = _phase_times(config, 1)
    par = _phase_times(config, config.workers)
    rows = [{"phase": ph, "sequential_s": seq[ph], "parallel_s": par[ph], "speedup": seq[ph] / par[ph]}
            for ph in phases]
    if config.output_dir is not None:
        out = Path(config.output_dir)
        out.mkdir(parents=True, exist_ok=True)
        with open(out / "timing.csv", "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["phase", "workers", "sequential_s", "parallel_s", "speedup"])
            for r in rows:
                writer.writerow([r["phase"], config.workers, _fmt(r["sequential_s"]),
                                 _fmt(r["parallel_s"]), _fmt(r["speedup"])])
    return rows


def cpu_count() -> int:
    try:
        return len(os.sched_getaffinity(0))
    except AttributeError:  # pragma: no cover
        return os.cpu_count() or 1
