"""Random-forest metamodel: seeded training, labels, class probabilities.

Thin, deterministic wrapper around scikit-learn's RandomForestClassifier
configured the classical way: bootstrap samples of the training size,
Gini-impurity splits over ``mtry`` candidate features per node, trees
grown until pure or the minimum leaf size, out-of-bag error recorded.
Probabilities are means of per-tree leaf fractions, and predicted labels
are exactly ``probability >= 0.5``.  Single-class training data yields a
constant predictor flagged as degenerate rather than an error.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, replace

import numpy as np
from sklearn.ensemble import RandomForestClassifier

from .dgps import Dataset
from .errors import DimensionMismatchError, InvalidConfigError, InvalidLabelsError
from .sampling import PointMatrix

__all__ = ["ForestConfig", "Forest", "fit_forest", "tune_mtry", "predict_proba", "predict_label", "default_mtry_grid"]


@dataclass(frozen=True)
class ForestConfig:
    n_trees: int = 500
    mtry: int | None = None  # None: floor(sqrt(D)) at fit time
    min_node: int = 1
    seed: int = 0
    n_jobs: int = 1

    def __post_init__(self):
        if self.n_trees < 1:
            raise InvalidConfigError("n_trees must be at least 1")
        if self.mtry is not None and self.mtry < 1:
            raise InvalidConfigError("mtry must be at least 1")
        if self.min_node < 1:
            raise InvalidConfigError("min_node must be at least 1")


@dataclass(frozen=True)
class Forest:
    """A fitted metamodel; ``constant`` is set instead of ``model`` when
    the training data carried a single class (degenerate fit)."""

    config: ForestConfig
    n_features: int
    oob_error: float
    model: RandomForestClassifier | None = None
    constant: float | None = None

    @property
    def degenerate(self) -> bool:
        return self.model is None


def default_mtry_grid(dim: int) -> list[int]:
    """The three-point tuning grid: sqrt(D), D/2 and D (deduplicated)."""
    return sorted({max(1, int(np.sqrt(dim))), max(1, dim // 2), dim})


def _binary_labels(d: Dataset) -> np.ndarray:
    y = np.asarray(d.y)
    if not np.all(np.isin(np.unique(y), (0.0, 1.0))):
        raise InvalidLabelsError("forest training requires binary labels")
    return y.astype(np.int64)


def fit_forest(d: Dataset, cfg: ForestConfig = ForestConfig()) -> Forest:
    """Train a seeded forest on a binary-labeled dataset."""
    if d.n < 2:
        raise InvalidConfigError("need at least two training rows")
    y = _binary_labels(d)
    dim = d.x.dim
    if np.unique(y).size < 2:
        warnings.warn("single-class training data: returning a constant predictor")
        return Forest(config=cfg, n_features=dim, oob_error=0.0, constant=float(y[0]))
    mtry = cfg.mtry if cfg.mtry is not None else max(1, int(np.sqrt(dim)))
    if mtry > dim:
        raise InvalidConfigError(f"mtry {mtry} exceeds dimensionality {dim}")
    model = RandomForestClassifier(
        n_estimators=cfg.n_trees,
        criterion="gini",
        max_features=mtry,
        min_samples_leaf=cfg.min_node,
        bootstrap=True,
        oob_score=True,
        random_state=cfg.seed,
        n_jobs=cfg.n_jobs,
    )
    model.fit(d.x.points, y)
    return Forest(
        config=replace(cfg, mtry=mtry),
        n_features=dim,
        oob_error=1.0 - float(model.oob_score_),
        model=model,
    )


def tune_mtry(d: Dataset, grid, cfg: ForestConfig = ForestConfig()) -> ForestConfig:
    """Pick the grid value with the lowest out-of-bag error (ties: smaller)."""
    grid = sorted({int(g) for g in grid})
    if not grid:
        raise InvalidConfigError("mtry grid must be non-empty")
    if grid[0] < 1 or grid[-1] > d.x.dim:
        raise InvalidConfigError("mtry grid values must lie in [1, D]")
    best_mtry, best_err = None, np.inf
    for m in grid:
        err = fit_forest(d, replace(cfg, mtry=m)).oob_error
        if err < best_err:
            best_mtry, best_err = m, err
    return replace(cfg, mtry=best_mtry)


def _as_points(forest: Forest, points) -> np.ndarray:
    pts = points.points if isinstance(points, PointMatrix) else np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != forest.n_features:
        raise DimensionMismatchError(
            f"expected (n, {forest.n_features}) points, got shape {pts.shape}"
        )
    return pts


def predict_proba(forest: Forest, points) -> np.ndarray:
    """Positive-class probability per point: mean of tree leaf fractions."""
    pts = _as_points(forest, points)
    if forest.degenerate:
        return np.full(pts.shape[0], forest.constant)
    proba = forest.model.predict_proba(pts)
    positive = list(forest.model.classes_).index(1)
    return proba[:, positive]


def predict_label(forest: Forest, points) -> np.ndarray:
    """Thresholded labels: 1 exactly when the probability is >= 0.5."""
    return (predict_proba(forest, points) >= 0.5).astype(np.int64)
