"""Robust optimisation Monte Carlo for likelihood-free inference."""

from .abc import ABCResult, rejection_abc, rejection_abc_run
from .benchmarks import EXAMPLES, ExampleModel, example_1d, example_2d, example_ma2, get_example, register_example
from .bo import BoOpts, GPModel, gp_fit, gp_predict, solve_bo
from .errors import (
    BudgetExceededError,
    DegeneratePosteriorError,
    EvaluationError,
    FitError,
    InvalidArgumentError,
    OptimisationFailedError,
    RomcError,
)
from .evaluate import GridFunction, divergence, tabulate
from .inference import ROMC
from .model import (
    EpsilonConfig,
    ModelSpec,
    Objective,
    ObjectiveProblem,
    UniformPrior,
    indicator,
    make_objective,
    sample_nuisance,
)
from .optimize import GradOpts, OptimResult, compute_eps, filter_solutions, finite_diff_gradient, solve_gradients
from .posterior import RomcPosterior, WeightedSampleSet, compute_ess, compute_expectation
from .regions import BoundingBox, box_pdf, box_sample, build_box, curvature_directions
from .runner import RunConfig, RunReport, run_inference, run_rejection_abc, run_timing
from .surrogate import QuadraticModel, fit_local_surrogate

__version__ = "0.1.0"
