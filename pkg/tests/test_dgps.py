import numpy as np
import pytest

import scenbox as sb
from scenbox.dgps import REGISTRY, DgpSpec
from scenbox.errors import (
    DimensionMismatchError,
    InvalidConfigError,
    InvalidLabelsError,
    UnknownDgpError,
)

MANDATORY = {
    "dgp3", "ellipse", "dsgc", "morris", "sobol", "ishigami",
    "borehole", "hart3", "hart4", "hart6sc", "moon10low",
}


def test_registry_contains_mandatory_entries():
    assert MANDATORY <= set(REGISTRY)
    for spec in REGISTRY.values():
        assert spec.n_influential <= spec.dim
        assert 0.0 < spec.expected_share < 1.0


def test_unknown_name_raises():
    with pytest.raises(UnknownDgpError):
        sb.get_dgp("nope")


def test_registry_is_pluggable():
    spec = DgpSpec("halfline", 1, 1, sb.HyperBox.unit(1), 0.5, 0.0, 0.5,
                   raw_fn=lambda x: x[:, 0])
    sb.register(spec)
    try:
        y = sb.evaluate("halfline", np.array([[0.2], [0.8]]), seed=0)
        assert y.tolist() == [1, 0]
    finally:
        del REGISTRY["halfline"]


def test_dgp3_rule_points():
    pts = np.array([
        [0.7, 0.9, 0.1, 0.1, 0.1],
        [0.5, 0.9, 0.1, 0.1, 0.1],
    ])
    y = sb.evaluate("dgp3", pts, seed=0, apply_noise=False)
    assert y.tolist() == [1, 0]


def test_ellipse_center_is_of_interest():
    spec = sb.get_dgp("ellipse")
    center = np.zeros((1, 15))
    center[0, :10] = [0.975, 0.843, 0.772, 0.325, 0.805, 0.945, 0.221, 0.732, 0.289, 0.6]
    assert spec.raw_fn(center)[0] == pytest.approx(0.0)
    assert sb.evaluate(spec, center, seed=0).tolist() == [1]


def test_sobol_first_factor_vanishes_at_center():
    # |4*0.5 - 2| = 0 and a1 = 0, so the product collapses to 0 < 0.7
    pts = np.full((1, 8), 0.5)
    spec = sb.get_dgp("sobol")
    assert spec.raw_fn(pts)[0] == pytest.approx(0.0)
    assert sb.evaluate(spec, pts, seed=0).tolist() == [1]


def test_ishigami_value_matches_hand_formula():
    spec = sb.get_dgp("ishigami")
    x = np.array([[0.3, -1.2, 2.0]])
    expected = np.sin(0.3) + 7 * np.sin(-1.2) ** 2 + 0.1 * 2.0**4 * np.sin(0.3)
    assert spec.raw_fn(x)[0] == pytest.approx(expected)


def test_borehole_value_matches_hand_formula():
    spec = sb.get_dgp("borehole")
    x = np.array([[0.1, 1000.0, 90_000.0, 1050.0, 90.0, 760.0, 1400.0, 11_000.0]])
    lnr = np.log(1000.0 / 0.1)
    expected = (
        2 * np.pi * 90_000 * (1050 - 760)
        / (lnr * (1 + 2 * 1400 * 90_000 / (lnr * 0.1**2 * 11_000) + 90_000 / 90))
    )
    assert spec.raw_fn(x)[0] == pytest.approx(expected)


def test_morris_share_near_published():
    spec = sb.get_dgp("morris")
    pts = sb.lhs_sample(100_000, spec.input_box, sb.child_seed(0, "morris-share"))
    share = sb.evaluate(spec, pts, seed=0).mean()
    assert abs(share - 0.301) < 0.015


def test_evaluate_is_deterministic():
    pts = sb.lhs_sample(500, sb.HyperBox.unit(5), seed=3)
    a = sb.evaluate("dgp3", pts, seed=9)
    b = sb.evaluate("dgp3", pts, seed=9)
    assert np.array_equal(a, b)


def test_evaluate_shape_and_bounds_errors():
    with pytest.raises(DimensionMismatchError):
        sb.evaluate("dgp3", np.zeros((3, 4)), seed=0)
    with pytest.raises(InvalidConfigError):
        sb.evaluate("dgp3", np.full((2, 5), 1.5), seed=0)


# ------------------------------------------------------------- flip noise


def test_flip_noise_identity_at_zero():
    y = np.array([0, 1, 1, 0, 1])
    assert np.array_equal(sb.flip_noise(y, 0.0, seed=1), y)


def test_flip_noise_exact_count():
    y = np.zeros(1000, dtype=int)
    flipped = sb.flip_noise(y, 0.002, seed=4)
    assert int(flipped.sum()) == 2


def test_flip_noise_half_level_randomizes():
    y = np.zeros(2000, dtype=int)
    means = [sb.flip_noise(y, 0.5, seed=s).mean() for s in range(30)]
    assert abs(np.mean(means) - 0.5) < 0.02


def test_flip_noise_rejects_bad_input():
    with pytest.raises(InvalidLabelsError):
        sb.flip_noise(np.array([0.2, 0.4]), 0.1, seed=0)
    with pytest.raises(InvalidConfigError):
        sb.flip_noise(np.array([0, 1]), 0.7, seed=0)


def test_flip_noise_double_application_mean_shift():
    rng = np.random.default_rng(5)
    y = (rng.random(4000) < 0.3).astype(int)
    level = 0.1
    twice = sb.flip_noise(sb.flip_noise(y, level, seed=1), level, seed=2)
    # a label differs from the original with probability 2 L (1 - L)
    assert abs(twice.mean() - y.mean()) <= 2 * level * (1 - level)


def test_intrinsic_noise_only_for_dgp3():
    assert sb.get_dgp("dgp3").intrinsic_noise == pytest.approx(0.002)
    for name in MANDATORY - {"dgp3"}:
        assert sb.get_dgp(name).intrinsic_noise == 0.0
