"""Patient rule induction: peeling, pasting, and bumping.

Peeling starts from the full box and repeatedly removes the thin data
slab (a fraction ``alpha`` of the current points, top or bottom of one
dimension) whose removal leaves the highest mean label among the
remaining points.  The box bound of the cut dimension snaps to the
retained extreme value; other dimensions are untouched, so a dimension
counts as restricted only once it has actually been cut.  The returned
sequence is truncated at the box with the highest validation mean.

Pasting walks in the opposite direction, growing one bound at a time by
a volume factor (1 + beta) while the in-box mean does not decrease.
Bumping repeats peeling on bootstrap samples restricted to random
attribute subsets and keeps the candidates that are not dominated in
(coverage, density) on the validation set.

Tie-breaking is deterministic throughout: among equal-mean cuts the
lowest dimension index wins and a top cut beats a bottom cut; equal
validation means select the earliest box.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .boxes import HyperBox, coverage_density, pareto_front
from .dgps import Dataset
from .errors import InvalidConfigError, ValidationUndefinedError
from .sampling import PointMatrix, child_seed

__all__ = [
    "PeelConfig",
    "BoxSequence",
    "CandidateBox",
    "peel",
    "paste",
    "bumping",
    "box_mean",
    "box_sequence_to_lines",
    "parse_box_lines",
]


@dataclass(frozen=True)
class PeelConfig:
    """Knobs of the peeling loop."""

    alpha: float = 0.05
    minpts: int = 20
    max_iter: int = 99
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.alpha < 0.5:
            raise InvalidConfigError("alpha must be in (0, 0.5)")
        if self.minpts < 1:
            raise InvalidConfigError("minpts must be at least 1")
        if self.max_iter < 1:
            raise InvalidConfigError("max_iter must be at least 1")


@dataclass(frozen=True)
class BoxSequence:
    """Nested boxes from one peeling run plus per-box statistics.

    ``selected_index`` is the first index attaining the maximal
    validation mean; for plain peeling output it is always the last box
    because the sequence is truncated there.
    """

    boxes: tuple
    val_means: np.ndarray
    train_counts: np.ndarray
    val_counts: np.ndarray
    selected_index: int = field(init=False)

    def __post_init__(self):
        vm = np.asarray(self.val_means, dtype=float)
        tc = np.asarray(self.train_counts, dtype=np.int64)
        vc = np.asarray(self.val_counts, dtype=np.int64)
        boxes = tuple(self.boxes)
        if not boxes or not (len(boxes) == vm.size == tc.size == vc.size):
            raise InvalidConfigError("boxes and statistics must align and be non-empty")
        object.__setattr__(self, "boxes", boxes)
        object.__setattr__(self, "val_means", vm)
        object.__setattr__(self, "train_counts", tc)
        object.__setattr__(self, "val_counts", vc)
        object.__setattr__(self, "selected_index", _first_argmax(vm))

    def __len__(self) -> int:
        return len(self.boxes)

    @property
    def selected(self) -> HyperBox:
        return self.boxes[self.selected_index]


@dataclass(frozen=True)
class CandidateBox:
    """A bumping candidate with its validation coverage and density."""

    box: HyperBox
    coverage: float
    density: float


def _first_argmax(values: np.ndarray) -> int:
    best, best_idx = -math.inf, 0
    for i, v in enumerate(values):
        if not math.isnan(v) and v > best:
            best, best_idx = v, i
    return best_idx


def box_mean(box: HyperBox, data: Dataset) -> float:
    """Mean label inside a box; NaN when the box holds no points."""
    inside = box.contains(data.x.points)
    return float(data.y[inside].mean()) if inside.any() else math.nan


def peel(
    d: Dataset,
    d_val: Dataset,
    box0: HyperBox,
    cfg: PeelConfig = PeelConfig(),
    dims=None,
) -> BoxSequence:
    """Peel the box down and return the sequence up to the best box.

    Every iteration evaluates two candidate cuts per eligible dimension,
    each retaining the ceil((1-alpha) n) points on one side of that
    dimension's alpha-quantile (ties at the threshold are retained), and
    applies the cut with the highest retained mean.  The validation set
    is filtered cumulatively and its mean recorded per box.  The loop
    stops once either set would drop to ``minpts`` points or after
    ``max_iter`` iterations.

    ``dims`` restricts the candidate cuts (and hence bound updates) to a
    subset of dimensions; the rest stay at their full-box bounds.
    """
    if d_val.n == 0:
        raise ValidationUndefinedError("peel requires a non-empty validation set")
    dims = tuple(range(box0.dim)) if dims is None else tuple(int(i) for i in dims)
    x = d.x.points
    y = d.y
    xv = d_val.x.points
    yv = d_val.y

    boxes = [box0]
    val_means = [float(yv.mean())]
    train_counts = [len(y)]
    val_counts = [len(yv)]
    box = box0

    iteration = 0
    while len(y) > cfg.minpts and len(yv) > cfg.minpts and iteration < cfg.max_iter:
        n = len(y)
        n_keep = math.ceil((1.0 - cfg.alpha) * n)
        n_remove = n - n_keep
        if n_remove < 1:
            break
        best_mean = -math.inf
        best = None  # (dim, is_top, threshold, retain_mask)
        for i in dims:
            xi = x[:, i]
            # top cut: raise the lower bound to the alpha-quantile
            thr_lo = np.partition(xi, n_remove)[n_remove]
            mask_top = xi >= thr_lo
            mean_top = float(y[mask_top].mean())
            if mean_top > best_mean:
                best_mean, best = mean_top, (i, True, thr_lo, mask_top)
            # bottom cut: lower the upper bound to the (1-alpha)-quantile
            thr_hi = np.partition(xi, n_keep - 1)[n_keep - 1]
            mask_bot = xi <= thr_hi
            mean_bot = float(y[mask_bot].mean())
            if mean_bot > best_mean:
                best_mean, best = mean_bot, (i, False, thr_hi, mask_bot)
        dim_cut, is_top, threshold, retain = best
        x, y = x[retain], y[retain]
        if is_top:
            box = box.with_bound(dim_cut, lower=float(x[:, dim_cut].min()))
            keep_val = xv[:, dim_cut] >= box.lower[dim_cut]
        else:
            box = box.with_bound(dim_cut, upper=float(x[:, dim_cut].max()))
            keep_val = xv[:, dim_cut] <= box.upper[dim_cut]
        xv, yv = xv[keep_val], yv[keep_val]
        boxes.append(box)
        val_means.append(float(yv.mean()) if len(yv) else math.nan)
        train_counts.append(len(y))
        val_counts.append(len(yv))
        iteration += 1

    last = _first_argmax(np.asarray(val_means))
    return BoxSequence(
        boxes=tuple(boxes[: last + 1]),
        val_means=np.asarray(val_means[: last + 1]),
        train_counts=np.asarray(train_counts[: last + 1]),
        val_counts=np.asarray(val_counts[: last + 1]),
    )


def paste(
    d: Dataset,
    box: HyperBox,
    box0: HyperBox,
    beta: float = 0.01,
    seed=0,
) -> HyperBox:
    """Expand a box while the in-box mean label does not decrease.

    Each round enumerates the 2D single-bound expansions that grow the
    volume by a factor (1 + beta), clipped to the enclosing box; among
    the candidates keeping the mean at least as high, one is chosen
    uniformly at random.  Returns the input box unchanged when no legal
    expansion remains.
    """
    if beta <= 0:
        raise InvalidConfigError("beta must be positive")
    if not box.issubset(box0):
        raise InvalidConfigError("box must lie inside the enclosing box")
    rng = np.random.default_rng(seed)
    x = d.x.points
    y = d.y
    dim = box0.dim

    while True:
        in_dim = (x >= box.lower) & (x <= box.upper)
        dims_inside = in_dim.sum(axis=1)
        in_box = dims_inside == dim
        n_in = int(in_box.sum())
        current_mean = float(y[in_box].mean()) if n_in else 0.0
        candidates = []
        for i in range(dim):
            delta = beta * (box.upper[i] - box.lower[i])
            others_ok = dims_inside - in_dim[:, i] == dim - 1
            for is_top, new_bound in (
                (True, min(box.upper[i] + delta, box0.upper[i])),
                (False, max(box.lower[i] - delta, box0.lower[i])),
            ):
                if is_top:
                    if new_bound <= box.upper[i]:
                        continue
                    members = others_ok & (x[:, i] >= box.lower[i]) & (x[:, i] <= new_bound)
                else:
                    if new_bound >= box.lower[i]:
                        continue
                    members = others_ok & (x[:, i] >= new_bound) & (x[:, i] <= box.upper[i])
                n_new = int(members.sum())
                new_mean = float(y[members].mean()) if n_new else current_mean
                if new_mean >= current_mean:
                    candidates.append((i, is_top, new_bound))
        if not candidates:
            return box
        i, is_top, new_bound = candidates[rng.integers(0, len(candidates))]
        box = box.with_bound(i, upper=new_bound) if is_top else box.with_bound(i, lower=new_bound)


def bumping(
    d: Dataset,
    d_val: Dataset,
    box0: HyperBox,
    cfg: PeelConfig,
    t: int,
    T: int,
    bootstrap: bool = True,
) -> list[CandidateBox]:
    """Pooled peeling over bootstrap samples and random attribute subsets.

    Runs ``T`` independent peels, each on a bootstrap resample of ``d``
    restricted to ``t`` uniformly chosen attributes (the others stay at
    the full-box bounds), pools every box of every run, and returns the
    candidates that are not dominated in (coverage, density) on the
    validation set.  ``bootstrap=False`` reuses ``d`` unchanged in every
    iteration, which is useful for degenerate-reduction checks.
    """
    dim = box0.dim
    if not 1 <= t <= dim:
        raise InvalidConfigError(f"t must be in [1, {dim}]")
    if T < 1:
        raise InvalidConfigError("T must be at least 1")
    n = d.n
    pooled: list[HyperBox] = []
    for it in range(T):
        rng = np.random.default_rng(child_seed(cfg.seed, "bump", it))
        if bootstrap:
            idx = rng.integers(0, n, size=n)
            d_it = Dataset(PointMatrix(d.x.points[idx], d.x.box), d.y[idx])
        else:
            d_it = d
        attrs = np.sort(rng.choice(dim, size=t, replace=False))
        pooled.extend(peel(d_it, d_val, box0, cfg, dims=attrs).boxes)

    scored = [coverage_density(b, d_val) for b in pooled]
    keep = pareto_front(scored)
    return [CandidateBox(pooled[i], scored[i][0], scored[i][1]) for i in keep]


def box_sequence_to_lines(boxes, values) -> list[str]:
    """Serialize boxes to the line format ``i:lower:upper ... value``."""
    lines = []
    for box, value in zip(boxes, values):
        fields = [
            f"{i + 1}:{float(box.lower[i])!r}:{float(box.upper[i])!r}"
            for i in range(box.dim)
        ]
        fields.append(repr(float(value)))
        lines.append(" ".join(fields))
    return lines


def parse_box_lines(lines) -> tuple[list[HyperBox], list[float]]:
    boxes, values = [], []
    for line in lines:
        parts = line.split()
        if len(parts) < 2:
            raise ValueError(f"malformed box line: {line!r}")
        lower, upper = [], []
        for i, part in enumerate(parts[:-1]):
            idx, lo, hi = part.split(":")
            if int(idx) != i + 1:
                raise ValueError(f"unexpected dimension index in {part!r}")
            lower.append(float(lo))
            upper.append(float(hi))
        boxes.append(HyperBox(np.asarray(lower), np.asarray(upper)))
        values.append(float(parts[-1]))
    return boxes, values
