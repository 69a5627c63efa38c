"""Discovery methods, the mean-squared-error study, and the benchmark grid.

Six methods sit behind :func:`discover`:

* ``O``     plain peeling;
* ``O.p``   peeling followed by pasting of every box in the sequence;
* ``B``     bumping with t = ceil(sqrt(D)) attributes per iteration;
* ``B.all`` bumping with all attributes;
* ``RF.l``  fit a forest, relabel K fresh uniform points with hard
            labels, then peel the relabeled data;
* ``RF.p``  same with class probabilities instead of labels.

The relabeled dataset serves as both training and validation set for the
peel, mirroring the d = d_val convention used for the simulated data.

:func:`mse_experiment` measures the error of in-box mean estimates with
and without the metamodel: ``reps_outer`` independent training sets each
fit one forest, every forest labels ``reps_inner`` fresh point sets, and
the bias/variance of the resulting estimates are compared against the
variance of the direct estimate, with ground truth taken from a
million-point reference sample.

:func:`run_benchmark` runs a (dgp x size x rep x method) grid with fully
derived seeds, evaluates every run on a shared test set, and aggregates
mean AUC, final-box density, restricted dimensions, pairwise consistency
and box volume, plus best / second-best counts per metric.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from itertools import combinations

import numpy as np

from .boxes import HyperBox, TrajectoryPoint, consistency, coverage_density, restricted_dims, trajectory_auc
from .dgps import Dataset, evaluate, flip_noise, get_dgp
from .errors import InvalidConfigError, UndefinedMuError
from .forest import Forest, ForestConfig, default_mtry_grid, fit_forest, predict_label, predict_proba, tune_mtry
from .prim import BoxSequence, CandidateBox, PeelConfig, box_mean, bumping, paste, peel
from .sampling import PointMatrix, child_seed, halton_sample, lhs_sample, uniform_sample

__all__ = [
    "METHODS",
    "ExperimentConfig",
    "MseReport",
    "BenchmarkResult",
    "CellStats",
    "discover",
    "final_box",
    "trajectory_on",
    "mse_experiment",
    "run_benchmark",
]

METHODS = ("B", "B.all", "O", "O.p", "RF.l", "RF.p")
METRICS = ("auc", "density", "interp", "consistency")

#: Halton skip reserved for test sets, far beyond any training window.
_TEST_SKIP = 10_000_000


@dataclass(frozen=True)
class ExperimentConfig:
    """Hyper-parameters of the experiment harness (defaults are canonical)."""

    methods: tuple = METHODS
    alpha: float = 0.05
    minpts: int = 20
    max_iter: int = 99
    beta: float = 0.01
    T: int = 50
    t: int | None = None  # None: ceil(sqrt(D)) for B, D for B.all
    K: int = 100_000
    n_trees: int = 500
    min_node: int = 1
    mtry: int | None = None  # None: tuned over the default grid
    sizes: tuple = (400, 800, 1600)
    reps: int = 50
    noise_level: float = 0.0
    test_size: int = 10_000
    base_seed: int = 0
    rf_validation: str = "relabeled"  # or "original": validate on the simulated set

    def __post_init__(self):
        object.__setattr__(self, "methods", tuple(self.methods))
        object.__setattr__(self, "sizes", tuple(int(s) for s in self.sizes))
        unknown = [m for m in self.methods if m not in METHODS]
        if unknown:
            raise InvalidConfigError(f"unknown methods {unknown}; valid: {list(METHODS)}")
        if not 0.0 <= self.noise_level <= 0.5:
            raise InvalidConfigError("noise_level must be in [0, 0.5]")
        if self.K < 1 or self.reps < 1 or self.test_size < 1:
            raise InvalidConfigError("K, reps and test_size must be positive")
        if self.rf_validation not in ("relabeled", "original"):
            raise InvalidConfigError("rf_validation must be 'relabeled' or 'original'")

    def peel_config(self, seed: int) -> PeelConfig:
        return PeelConfig(alpha=self.alpha, minpts=self.minpts, max_iter=self.max_iter, seed=seed)


def _seed_int(seed) -> int:
    if isinstance(seed, np.random.SeedSequence):
        return int(seed.generate_state(1)[0])
    return int(seed)


def _fit_metamodel(d: Dataset, cfg: ExperimentConfig, seed) -> Forest:
    fcfg = ForestConfig(
        n_trees=cfg.n_trees, mtry=cfg.mtry, min_node=cfg.min_node, seed=_seed_int(seed)
    )
    if cfg.mtry is None and np.unique(d.y).size > 1:
        fcfg = tune_mtry(d, default_mtry_grid(d.x.dim), fcfg)
    return fit_forest(d, fcfg)


def _relabeled_peel(labeler, d, d_val, box0, cfg: ExperimentConfig, seed) -> BoxSequence:
    points = uniform_sample(cfg.K, box0, child_seed(seed, "rf-points"))
    d_new = Dataset(points, np.asarray(labeler(points), dtype=float))
    pc = cfg.peel_config(_seed_int(child_seed(seed, "peel")))
    validation = d_new if cfg.rf_validation == "relabeled" else d_val
    return peel(d_new, validation, box0, pc)


def discover(
    method: str,
    d: Dataset,
    d_val: Dataset,
    box0: HyperBox,
    cfg: ExperimentConfig = ExperimentConfig(),
    seed=None,
    labeler=None,
    forest: Forest | None = None,
):
    """Run one discovery method; returns a BoxSequence or a candidate list.

    ``labeler`` substitutes the metamodel's labeling function for the RF
    methods (a callable mapping a PointMatrix to labels); ``forest``
    injects an already fitted metamodel so RF.l and RF.p can share one.
    """
    if method not in METHODS:
        raise InvalidConfigError(f"unknown method {method!r}; valid: {list(METHODS)}")
    seed = cfg.base_seed if seed is None else seed
    dim = box0.dim
    pc = cfg.peel_config(_seed_int(child_seed(seed, "peel")))

    if method == "O":
        return peel(d, d_val, box0, pc)

    if method == "O.p":
        seq = peel(d, d_val, box0, pc)
        pasted = [
            paste(d, box, box0, cfg.beta, child_seed(seed, "paste", j))
            for j, box in enumerate(seq.boxes)
        ]
        val_means = [box_mean(box, d_val) for box in pasted]
        train_counts = [int(box.contains(d.x.points).sum()) for box in pasted]
        val_counts = [int(box.contains(d_val.x.points).sum()) for box in pasted]
        return BoxSequence(tuple(pasted), np.asarray(val_means), np.asarray(train_counts), np.asarray(val_counts))

    if method in ("B", "B.all"):
        t = dim if method == "B.all" else (cfg.t if cfg.t is not None else math.ceil(math.sqrt(dim)))
        return bumping(d, d_val, box0, pc, t=t, T=cfg.T)

    # rule-extraction methods
    if labeler is None:
        f = forest if forest is not None else _fit_metamodel(d, cfg, child_seed(seed, "forest"))
        if f.degenerate:
            warnings.warn("degenerate metamodel; falling back to plain peeling")
            return peel(d, d_val, box0, pc)
        labeler = (lambda pts: predict_label(f, pts)) if method == "RF.l" else (
            lambda pts: predict_proba(f, pts)
        )
    return _relabeled_peel(labeler, d, d_val, box0, cfg, seed)


def final_box(result) -> HyperBox:
    """The single box a method reports: the selected box of a sequence, or
    the highest-density candidate (ties: higher coverage) of a bumping set."""
    if isinstance(result, BoxSequence):
        return result.selected
    if not result:
        raise InvalidConfigError("empty candidate set")
    best = max(result, key=lambda cb: (cb.density, cb.coverage))
    return best.box


def _result_boxes(result) -> list[HyperBox]:
    if isinstance(result, BoxSequence):
        return list(result.boxes)
    return [cb.box for cb in result]


def trajectory_on(result, data: Dataset) -> list[TrajectoryPoint]:
    """Evaluate a discovery result's boxes on a dataset, in result order."""
    if isinstance(result, BoxSequence):
        boxes = result.boxes
        counts = list(zip(result.train_counts, result.val_counts))
    else:
        boxes = [cb.box for cb in result]
        counts = [(0, 0)] * len(boxes)
    points = []
    for idx, (box, (n_tr, n_val)) in enumerate(zip(boxes, counts)):
        cov, dens = coverage_density(box, data)
        points.append(TrajectoryPoint(idx, cov, dens, int(n_tr), int(n_val)))
    return points


# --------------------------------------------------------------------------
# mean-squared-error experiment
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class MseReport:
    """Error decomposition for in-box mean estimates.

    ``mse_o`` is the variance of the direct estimates over the outer
    replications; ``mse_am`` averages (bias^2 + variance) of the
    metamodel-based estimates; ``mse_am_literal`` keeps the unsquared,
    unnormalized sum for reference.  ``n`` and ``k`` are the expected
    in-box point counts of the original and relabeled datasets.
    """

    box: HyperBox
    mu_gt: float
    mse_o: float
    mse_am: float
    mse_am_literal: float
    n: int
    k: int
    mu_hat: np.ndarray
    bias: np.ndarray
    variance: np.ndarray


def mse_experiment(
    dgp,
    box_b: HyperBox,
    N: int = 400,
    K: int = 100_000,
    reps_outer: int = 200,
    reps_inner: int = 100,
    seed=0,
    probabilities: bool = True,
    gt_size: int = 1_000_000,
) -> MseReport:
    spec = get_dgp(dgp)
    box0 = spec.input_box
    if not box_b.issubset(box0):
        raise InvalidConfigError("box_b must lie inside the DGP input box")
    vol_frac = box_b.volume(box0)
    if vol_frac <= 0:
        raise UndefinedMuError("box_b has zero volume")

    gt_points = uniform_sample(gt_size, box0, child_seed(seed, "gt"))
    gt_labels = evaluate(spec, gt_points, child_seed(seed, "gt-labels"))
    in_b = box_b.contains(gt_points.points)
    if not in_b.any():
        raise UndefinedMuError("box_b contains no ground-truth points")
    mu_gt = float(gt_labels[in_b].mean())

    mu_hat = np.empty(reps_outer)
    bias = np.empty(reps_outer)
    variance = np.empty(reps_outer)
    for i in range(reps_outer):
        x_i = lhs_sample(N, box0, child_seed(seed, "outer", i, "x"))
        y_i = evaluate(spec, x_i, child_seed(seed, "outer", i, "y"))
        d_i = Dataset(x_i, y_i)
        inside = box_b.contains(x_i.points)
        if not inside.any():
            raise UndefinedMuError(f"training set {i} has no points in box_b")
        mu_hat[i] = float(d_i.y[inside].mean())

        fcfg = ForestConfig(seed=_seed_int(child_seed(seed, "outer", i, "forest")))
        if np.unique(y_i).size > 1:
            fcfg = tune_mtry(d_i, default_mtry_grid(x_i.dim), fcfg)
        f_i = fit_forest(d_i, fcfg)

        # Only points inside box_b enter the estimate, so instead of K
        # uniform points per inner set we draw Binomial(K, vol) counts and
        # sample that many points uniformly inside box_b directly.
        rng = np.random.default_rng(child_seed(seed, "outer", i, "counts"))
        counts = rng.binomial(K, vol_frac, size=reps_inner)
        if np.any(counts == 0):
            raise UndefinedMuError("an inner relabeled set has no points in box_b")
        pts = uniform_sample(int(counts.sum()), box_b, child_seed(seed, "outer", i, "pts"))
        preds = predict_proba(f_i, pts) if probabilities else predict_label(f_i, pts).astype(float)
        splits = np.cumsum(counts)[:-1]
        means = np.array([chunk.mean() for chunk in np.split(preds, splits)])
        bias[i] = mu_gt - float(means.mean())
        variance[i] = float(means.var())

    return MseReport(
        box=box_b,
        mu_gt=mu_gt,
        mse_o=float(mu_hat.var()),
        mse_am=float(np.mean(bias**2 + variance)),
        mse_am_literal=float(np.sum(bias + variance)),
        n=int(round(N * vol_frac)),
        k=int(round(K * vol_frac)),
        mu_hat=mu_hat,
        bias=bias,
        variance=variance,
    )


# --------------------------------------------------------------------------
# benchmark grid
# --------------------------------------------------------------------------


@dataclass
class CellStats:
    """Aggregates for one (dgp, size, method) cell; percentages throughout."""

    auc: float = math.nan
    density: float = math.nan
    interp: float = math.nan
    consistency: float = math.nan
    volume: float = math.nan
    n_runs: int = 0
    errors: tuple = ()


@dataclass
class BenchmarkResult:
    dgps: tuple
    sizes: tuple
    methods: tuple
    cells: dict  # (dgp, size, method) -> CellStats
    counts: dict  # (size, metric) -> {method: [n_best, n_second]}

    def value(self, dgp: str, size: int, method: str, metric: str) -> float:
        return getattr(self.cells[(dgp, size, method)], metric)

    def mean_over_dgps(self, size: int, method: str, metric: str) -> float:
        vals = [self.value(dgp, size, method, metric) for dgp in self.dgps]
        vals = [v for v in vals if not math.isnan(v)]
        return float(np.mean(vals)) if vals else math.nan


def _sample_train(spec, size: int, rep: int, run_seed) -> PointMatrix:
    if spec.name == "dsgc":
        return halton_sample(size, spec.input_box, skip=rep * size)
    return lhs_sample(size, spec.input_box, child_seed(run_seed, "x"))


def make_test_set(spec, cfg: ExperimentConfig) -> Dataset:
    """The shared evaluation set for one DGP (never carries added noise)."""
    spec = get_dgp(spec)
    if spec.name == "dsgc":
        pts = halton_sample(cfg.test_size, spec.input_box, skip=_TEST_SKIP)
    else:
        pts = lhs_sample(cfg.test_size, spec.input_box, child_seed(cfg.base_seed, "test", spec.name))
    labels = evaluate(spec, pts, child_seed(cfg.base_seed, "test-labels", spec.name))
    return Dataset(pts, labels)


@dataclass(frozen=True)
class _RunRecord:
    method: str
    auc: float = math.nan
    density: float = math.nan
    interp: float = math.nan
    volume: float = math.nan
    final_lower: tuple = ()
    final_upper: tuple = ()
    error: str | None = None


def _run_cell(args) -> tuple:
    cfg, dgp_name, size, rep, d_test = args
    spec = get_dgp(dgp_name)
    box0 = spec.input_box
    run_seed = child_seed(cfg.base_seed, "run", dgp_name, size, rep)
    pts = _sample_train(spec, size, rep, run_seed)
    labels = evaluate(spec, pts, child_seed(run_seed, "y"))
    if cfg.noise_level > 0:
        labels = flip_noise(labels, cfg.noise_level, child_seed(run_seed, "flip"))
    d = Dataset(pts, labels)

    base_rate = float(np.mean(d_test.y))
    shared_forest = None
    if ("RF.l" in cfg.methods or "RF.p" in cfg.methods) and np.unique(d.y).size > 1:
        shared_forest = _fit_metamodel(d, cfg, child_seed(run_seed, "forest"))

    records = []
    for method in cfg.methods:
        try:
            result = discover(method, d, d, box0, cfg, seed=run_seed, forest=shared_forest)
            traj = trajectory_on(result, d_test)
            auc = 100.0 * trajectory_auc(traj, base_rate=base_rate)
            fbox = final_box(result)
            _, dens = coverage_density(fbox, d_test)
            if math.isnan(dens):
                records.append(_RunRecord(method=method, error="final box holds no test points"))
                continue
            records.append(
                _RunRecord(
                    method=method,
                    auc=auc,
                    density=100.0 * dens,
                    interp=float(restricted_dims(fbox, box0)),
                    volume=100.0 * fbox.volume(box0),
                    final_lower=tuple(fbox.lower),
                    final_upper=tuple(fbox.upper),
                )
            )
        except Exception as exc:  # record, never abort the grid
            records.append(_RunRecord(method=method, error=f"{type(exc).__name__}: {exc}"))
    return (dgp_name, size, rep), records


def run_benchmark(cfg: ExperimentConfig, dgps, jobs: int = 1, test_sets: dict | None = None) -> BenchmarkResult:
    """Full grid over DGPs, sizes, replications and methods.

    ``test_sets`` may pre-supply {dgp_name: Dataset} evaluation data
    (useful to cache expensive simulator sets across calls); missing
    entries are generated.  Cell failures are recorded per cell and the
    grid always completes.
    """
    dgp_names = tuple(get_dgp(g).name for g in dgps)
    tests = dict(test_sets or {})
    for name in dgp_names:
        if name not in tests:
            tests[name] = make_test_set(name, cfg)

    tasks = [
        (cfg, name, size, rep, tests[name])
        for name in dgp_names
        for size in cfg.sizes
        for rep in range(cfg.reps)
    ]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = dict(pool.map(_run_cell, tasks, chunksize=1))
    else:
        results = dict(map(_run_cell, tasks))

    cells = {}
    for name in dgp_names:
        box0 = get_dgp(name).input_box
        for size in cfg.sizes:
            per_method = {m: [] for m in cfg.methods}
            for rep in range(cfg.reps):
                for rec in results[(name, size, rep)]:
                    per_method[rec.method].append(rec)
            for method, recs in per_method.items():
                ok = [r for r in recs if r.error is None and not math.isnan(r.density)]
                errors = tuple(r.error for r in recs if r.error is not None)
                stats = CellStats(n_runs=len(ok), errors=errors)
                if ok:
                    stats.auc = float(np.mean([r.auc for r in ok]))
                    stats.density = float(np.mean([r.density for r in ok]))
                    stats.interp = float(np.mean([r.interp for r in ok]))
                    stats.volume = float(np.mean([r.volume for r in ok]))
                    finals = [HyperBox(np.array(r.final_lower), np.array(r.final_upper)) for r in ok]
                    if len(finals) >= 2:
                        pairs = [
                            consistency(a, b, box0) for a, b in combinations(finals, 2)
                        ]
                        stats.consistency = 100.0 * float(np.mean(pairs))
                cells[(name, size, method)] = stats

    counts = _best_counts(dgp_names, cfg.sizes, cfg.methods, cells)
    return BenchmarkResult(dgp_names, cfg.sizes, cfg.methods, cells, counts)


def _best_counts(dgps, sizes, methods, cells) -> dict:
    higher_better = {"auc": True, "density": True, "interp": False, "consistency": True}
    counts = {}
    for size in sizes:
        for metric in METRICS:
            tally = {m: [0, 0] for m in methods}
            for dgp in dgps:
                ranked = []
                for m in methods:
                    v = getattr(cells[(dgp, size, m)], metric)
                    if not math.isnan(v):
                        ranked.append((v, m))
                if not ranked:
                    continue
                sign = -1.0 if higher_better[metric] else 1.0
                ranked.sort(key=lambda vm: (sign * vm[0], vm[1]))
                tally[ranked[0][1]][0] += 1
                if len(ranked) > 1:
                    tally[ranked[1][1]][1] += 1
            counts[(size, metric)] = tally
    return counts
