"""Hyperbox algebra and scenario quality metrics.

A scenario is an axis-aligned box in input space.  This module provides
the box type plus the four quality measures used to compare discovery
methods: coverage and density of a box on a labeled dataset, the area
under a peeling trajectory in the density-coverage plane, the number of
restricted dimensions (interpretability), and the overlap/union volume
ratio between two boxes (consistency).  A generic non-dominated filter
rounds out the set.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionMismatchError, InvalidBoxError, UndefinedCoverageError

__all__ = [
    "HyperBox",
    "TrajectoryPoint",
    "coverage_density",
    "trajectory_auc",
    "restricted_dims",
    "consistency",
    "pareto_front",
    "trajectory_to_csv",
]

#: Relative tolerance (fraction of the reference-box width) below which a
#: bound is considered unrestricted; float-safe equality only.
BOUND_TOL_FRACTION = 1e-9


@dataclass(frozen=True)
class HyperBox:
    """Axis-aligned box given by per-dimension [lower, upper] bounds."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lo = np.atleast_1d(np.asarray(self.lower, dtype=float)).copy()
        hi = np.atleast_1d(np.asarray(self.upper, dtype=float)).copy()
        if lo.ndim != 1 or hi.ndim != 1 or lo.shape != hi.shape:
            raise DimensionMismatchError("lower and upper must be 1-D and equal length")
        if lo.size < 1:
            raise InvalidBoxError("box needs at least one dimension")
        if np.any(lo > hi):
            raise InvalidBoxError("lower bound exceeds upper bound")
        lo.setflags(write=False)
        hi.setflags(write=False)
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @classmethod
    def unit(cls, dim: int) -> "HyperBox":
        return cls(np.zeros(dim), np.ones(dim))

    @property
    def dim(self) -> int:
        return self.lower.size

    @property
    def widths(self) -> np.ndarray:
        return self.upper - self.lower

    def contains(self, points) -> np.ndarray:
        """Inclusive membership test for a single point or an (n, D) matrix."""
        pts = np.asarray(points, dtype=float)
        single = pts.ndim == 1
        pts = np.atleast_2d(pts)
        if pts.shape[1] != self.dim:
            raise DimensionMismatchError(
                f"points have {pts.shape[1]} coordinates, box has {self.dim}"
            )
        inside = np.all((pts >= self.lower) & (pts <= self.upper), axis=1)
        return bool(inside[0]) if single else inside

    def volume(self, box0: "HyperBox | None" = None) -> float:
        """Volume, optionally in coordinates normalized by box0's widths."""
        widths = self.widths
        if box0 is not None:
            self._check_same_dim(box0)
            ref = box0.widths
            if np.any(ref <= 0):
                raise InvalidBoxError("reference box must have positive widths")
            widths = widths / ref
        return float(np.prod(widths))

    def with_bound(self, dim: int, lower: float | None = None, upper: float | None = None) -> "HyperBox":
        lo = self.lower.copy()
        hi = self.upper.copy()
        if lower is not None:
            lo[dim] = lower
        if upper is not None:
            hi[dim] = upper
        return HyperBox(lo, hi)

    def issubset(self, other: "HyperBox") -> bool:
        self._check_same_dim(other)
        return bool(np.all(self.lower >= other.lower) and np.all(self.upper <= other.upper))

    def _check_same_dim(self, other: "HyperBox") -> None:
        if other.dim != self.dim:
            raise DimensionMismatchError("boxes differ in dimension")


@dataclass(frozen=True)
class TrajectoryPoint:
    """One box of a peeling run evaluated on a fixed dataset."""

    box_index: int
    coverage: float
    density: float
    n_train: int
    n_val: int


def coverage_density(box: HyperBox, data) -> tuple[float, float]:
    """Coverage S1/N1 and density S1/(S1+S0) of a box on a dataset.

    Probabilistic labels are supported by replacing counts with sums of
    y and of (1 - y).  Raises when the dataset has no positive mass; a
    box containing no points reports density as NaN (undefined), not 0.
    """
    y = np.asarray(data.y, dtype=float)
    if y.size == 0:
        raise UndefinedCoverageError("empty dataset")
    inside = box.contains(data.x.points)
    n1 = float(y.sum())
    if n1 <= 0:
        raise UndefinedCoverageError("dataset has no positive labels")
    s1 = float(y[inside].sum())
    s0 = float((1.0 - y[inside]).sum())
    if not inside.any():
        return 0.0, math.nan
    return s1 / n1, s1 / (s1 + s0)


def _as_cov_dens(points) -> np.ndarray:
    rows = []
    for p in points:
        if isinstance(p, TrajectoryPoint):
            rows.append((p.coverage, p.density))
        else:
            rows.append((float(p[0]), float(p[1])))
    return np.asarray(rows, dtype=float)


def trajectory_auc(points: Sequence, base_rate: float | None = None) -> float:
    """Area under the piecewise-linear density-vs-coverage curve.

    The curve is built from the trajectory points ordered by decreasing
    coverage (duplicate coverages keep the highest density), anchored at
    (coverage=1, density=base_rate) when the full box is absent and a
    base rate is supplied, and extended horizontally from the smallest
    coverage down to coverage 0.  The result lies in [0, 1].
    """
    arr = _as_cov_dens(points)
    if arr.shape[0] < 1:
        raise ValueError("trajectory_auc needs at least one point")
    arr = arr[~np.isnan(arr[:, 1])]
    if arr.shape[0] < 1:
        raise ValueError("trajectory has no points with defined density")
    order = np.lexsort((-arr[:, 1], -arr[:, 0]))
    arr = arr[order]
    keep = np.ones(len(arr), dtype=bool)
    keep[1:] = arr[1:, 0] != arr[:-1, 0]  # first occurrence has max density
    arr = arr[keep]
    if base_rate is not None and arr[0, 0] < 1.0:
        arr = np.vstack([[1.0, float(base_rate)], arr])
    cov, dens = arr[:, 0], arr[:, 1]
    area = float(np.sum((cov[:-1] - cov[1:]) * (dens[:-1] + dens[1:]) / 2.0))
    area += float(cov[-1] * dens[-1])  # horizontal extension to coverage 0
    return area


def restricted_dims(box: HyperBox, box0: HyperBox, tol_fraction: float = BOUND_TOL_FRACTION) -> int:
    """Number of dimensions whose bounds differ from the reference box."""
    box._check_same_dim(box0)
    tol = tol_fraction * box0.widths
    restricted = (box.lower > box0.lower + tol) | (box.upper < box0.upper - tol)
    return int(restricted.sum())


def consistency(box_a: HyperBox, box_b: HyperBox, box0: HyperBox | None = None) -> float:
    """Overlap volume divided by union volume, in [0, 1].

    Volumes are computed in coordinates normalized by box0 when given,
    which makes the measure invariant under per-dimension affine maps
    applied to all three boxes.  Two zero-volume boxes compare as 1 when
    identical and 0 otherwise.
    """
    box_a._check_same_dim(box_b)
    ref = None
    if box0 is not None:
        box_a._check_same_dim(box0)
        ref = box0.widths
        if np.any(ref <= 0):
            raise InvalidBoxError("reference box must have positive widths")

    def vol(widths: np.ndarray) -> float:
        return float(np.prod(widths / ref)) if ref is not None else float(np.prod(widths))

    overlap_w = np.minimum(box_a.upper, box_b.upper) - np.maximum(box_a.lower, box_b.lower)
    v_o = vol(np.clip(overlap_w, 0.0, None)) if np.all(overlap_w > 0) else 0.0
    v_a = vol(box_a.widths)
    v_b = vol(box_b.widths)
    v_u = v_a + v_b - v_o
    if v_u <= 0.0:
        identical = np.array_equal(box_a.lower, box_b.lower) and np.array_equal(
            box_a.upper, box_b.upper
        )
        return 1.0 if identical else 0.0
    return v_o / v_u


def pareto_front(points: Iterable) -> list[int]:
    """Indices of candidates not dominated by any other candidate.

    Candidate i is dominated when some candidate j is at least as good in
    every measure and strictly better in at least one; exact ties are
    kept.  Input order is preserved in the result.
    """
    arr = np.asarray([tuple(p) for p in points], dtype=float)
    if arr.size == 0:
        return []
    if arr.ndim != 2:
        raise ValueError("candidates must be sequences of metric values")
    n = arr.shape[0]
    kept = []
    for i in range(n):
        ge = np.all(arr >= arr[i], axis=1)
        gt = np.any(arr > arr[i], axis=1)
        if not np.any(ge & gt):
            kept.append(i)
    return kept


def trajectory_to_csv(points: Sequence[TrajectoryPoint]) -> str:
    """Render trajectory points in the stable CSV schema."""
    lines = ["box_index,coverage,density,n_train,n_val"]
    for p in points:
        lines.append(
            f"{p.box_index},{float(p.coverage)!r},{float(p.density)!r},{p.n_train},{p.n_val}"
        )
    return "\n".join(lines) + "\n"
