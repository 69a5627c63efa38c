"""Seeded point-set generation inside a hyperbox.

Three designs are provided: plain uniform sampling, Latin hypercube
sampling (one point per equal-width stratum in every dimension, uniform
jitter inside the stratum), and the unscrambled Halton sequence with a
configurable leading skip.  All three are pure functions of their
arguments, so identical inputs give bitwise-identical output.
"""

from __future__ import annotations

import zlib
from dataclasses import dataclass, field

import numpy as np

from .boxes import HyperBox
from .errors import DimensionMismatchError, InvalidConfigError, UnsupportedDimensionError

__all__ = ["PointMatrix", "uniform_sample", "lhs_sample", "halton_sample", "child_seed", "HALTON_PRIMES"]

#: Prime bases for the Halton sequence; supports up to 12 dimensions.
HALTON_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)

SeedLike = "int | np.random.SeedSequence"


def child_seed(seed, *keys) -> np.random.SeedSequence:
    """Derive an independent child seed from a base seed and a key path.

    Strings are hashed with crc32 so that key paths like
    ``("dgp3", "train", 400, 7)`` give stable, platform-independent
    entropy.  The same (seed, keys) pair always yields the same stream.
    """
    if isinstance(seed, np.random.SeedSequence):
        entropy = seed.entropy
        base = list(entropy) if isinstance(entropy, (list, tuple)) else [entropy]
    else:
        base = [int(seed)]
    for key in keys:
        if isinstance(key, str):
            base.append(zlib.crc32(key.encode("utf-8")))
        else:
            base.append(int(key) & 0xFFFFFFFF)
    return np.random.SeedSequence(base)


@dataclass(frozen=True)
class PointMatrix:
    """n x D matrix of coordinates together with the box they live in."""

    points: np.ndarray
    box: HyperBox

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2:
            raise DimensionMismatchError(f"points must be 2-D, got shape {pts.shape}")
        if pts.shape[1] != self.box.dim:
            raise DimensionMismatchError(
                f"points have {pts.shape[1]} columns but box has {self.box.dim} dimensions"
            )
        if pts.size and (
            np.any(pts < self.box.lower) or np.any(pts > self.box.upper)
        ):
            raise InvalidConfigError("points fall outside the enclosing box")
        pts = pts.copy()
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def subset(self, index) -> "PointMatrix":
        return PointMatrix(self.points[index], self.box)


def uniform_sample(n: int, box: HyperBox, seed) -> PointMatrix:
    """Draw n i.i.d. points, each coordinate uniform on its box interval."""
    if n < 0:
        raise InvalidConfigError("n must be non-negative")
    rng = np.random.default_rng(seed)
    pts = rng.uniform(box.lower, box.upper, size=(n, box.dim))
    return PointMatrix(pts, box)


def lhs_sample(n: int, box: HyperBox, seed) -> PointMatrix:
    """Latin hypercube sample of n points.

    For every dimension the interval is split into n equal strata and
    exactly one point lands in each stratum; stratum permutations are
    independent across dimensions.
    """
    if n < 1:
        raise InvalidConfigError("lhs_sample requires n >= 1")
    rng = np.random.default_rng(seed)
    unit = np.empty((n, box.dim))
    for j in range(box.dim):
        unit[:, j] = (rng.permutation(n) + rng.random(n)) / n
    pts = box.lower + unit * (box.upper - box.lower)
    return PointMatrix(pts, box)


def _radical_inverse(indices: np.ndarray, base: int) -> np.ndarray:
    remaining = indices.astype(np.int64)
    result = np.zeros(len(indices))
    scale = 1.0
    while remaining.size and remaining.max() > 0:
        scale /= base
        result += scale * (remaining % base)
        remaining = remaining // base
    return result


def halton_sample(n: int, box: HyperBox, skip: int = 0) -> PointMatrix:
    """Rows skip+1 .. skip+n of the Halton sequence, scaled into the box.

    Deterministic with no seed; disjoint subsequences are obtained by
    choosing disjoint skip windows.  Element i of the base-b axis is the
    radical inverse of i, so the first base-2 values are 1/2, 1/4, 3/4.
    """
    if n < 0:
        raise InvalidConfigError("n must be non-negative")
    if skip < 0:
        raise InvalidConfigError("skip must be non-negative")
    if box.dim > len(HALTON_PRIMES):
        raise UnsupportedDimensionError(
            f"halton_sample supports up to {len(HALTON_PRIMES)} dimensions, got {box.dim}"
        )
    indices = np.arange(skip + 1, skip + n + 1, dtype=np.int64)
    unit = np.empty((n, box.dim))
    for j in range(box.dim):
        unit[:, j] = _radical_inverse(indices, HALTON_PRIMES[j])
    pts = box.lower + unit * (box.upper - box.lower)
    return PointMatrix(pts, box)
