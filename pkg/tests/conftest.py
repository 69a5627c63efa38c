"""Shared fixtures: expensive datasets are built once per session."""

from __future__ import annotations

import numpy as np
import pytest

import scenbox as sb
from scenbox.pipeline import ExperimentConfig, make_test_set


@pytest.fixture(scope="session")
def dgp3_spec():
    return sb.get_dgp("dgp3")


@pytest.fixture(scope="session")
def dgp3_test_set(dgp3_spec):
    """Canonical 10^4-point evaluation set for dgp3 (with intrinsic noise)."""
    return make_test_set(dgp3_spec, ExperimentConfig(base_seed=0))


@pytest.fixture(scope="session")
def dgp3_test_clean(dgp3_spec):
    """Noiseless 10^4-point dgp3 set for exact-rule oracles."""
    pts = sb.lhs_sample(10_000, dgp3_spec.input_box, sb.child_seed(0, "clean-test"))
    y = sb.evaluate(dgp3_spec, pts, 0, apply_noise=False)
    return sb.Dataset(pts, y)


@pytest.fixture(scope="session")
def dgp3_train_400(dgp3_spec):
    pts = sb.lhs_sample(400, dgp3_spec.input_box, sb.child_seed(0, "train-400"))
    y = sb.evaluate(dgp3_spec, pts, sb.child_seed(0, "train-400-y"))
    return sb.Dataset(pts, y)


@pytest.fixture(scope="session")
def dgp3_forest(dgp3_train_400):
    from scenbox.forest import ForestConfig, fit_forest

    return fit_forest(dgp3_train_400, ForestConfig(seed=11))


def random_box(rng, dim, box0=None):
    """A random sub-box of box0 (unit box by default)."""
    lo0 = np.zeros(dim) if box0 is None else box0.lower
    hi0 = np.ones(dim) if box0 is None else box0.upper
    a = rng.uniform(lo0, hi0)
    b = rng.uniform(lo0, hi0)
    return sb.HyperBox(np.minimum(a, b), np.maximum(a, b))
