"""Scenario discovery toolkit: box refinement on simulation data.

Find axis-aligned regions of input space where a simulated system shows
behavior of interest, either directly from simulation output or through
a forest metamodel that relabels a much larger point set first.
"""

__version__ = "0.1.0"

from .boxes import (
    HyperBox,
    TrajectoryPoint,
    consistency,
    coverage_density,
    pareto_front,
    restricted_dims,
    trajectory_auc,
)
from .dgps import REGISTRY, Dataset, DgpSpec, evaluate, flip_noise, get_dgp, register
from .dsgc import DsgcParams, SimConfig, dsgc_simulate
from .forest import Forest, ForestConfig, fit_forest, predict_label, predict_proba, tune_mtry
from .pipeline import (
    METHODS,
    BenchmarkResult,
    ExperimentConfig,
    MseReport,
    discover,
    mse_experiment,
    run_benchmark,
)
from .prim import BoxSequence, CandidateBox, PeelConfig, bumping, paste, peel
from .sampling import PointMatrix, child_seed, halton_sample, lhs_sample, uniform_sample

__all__ = [
    "__version__",
    "HyperBox",
    "TrajectoryPoint",
    "consistency",
    "coverage_density",
    "pareto_front",
    "restricted_dims",
    "trajectory_auc",
    "REGISTRY",
    "Dataset",
    "DgpSpec",
    "evaluate",
    "flip_noise",
    "get_dgp",
    "register",
    "DsgcParams",
    "SimConfig",
    "dsgc_simulate",
    "Forest",
    "ForestConfig",
    "fit_forest",
    "predict_label",
    "predict_proba",
    "tune_mtry",
    "METHODS",
    "BenchmarkResult",
    "ExperimentConfig",
    "MseReport",
    "discover",
    "mse_experiment",
    "run_benchmark",
    "BoxSequence",
    "CandidateBox",
    "PeelConfig",
    "bumping",
    "paste",
    "peel",
    "PointMatrix",
    "child_seed",
    "halton_sample",
    "lhs_sample",
    "uniform_sample",
]
