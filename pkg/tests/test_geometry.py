import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from contperc.geometry import (
    InvalidDimensionError,
    TorusBox,
    sample_uniform_in_ball,
    torus_distance,
    uniform_in_unit_ball,
    unit_ball_volume,
)
from oracles import naive_torus_distance


@pytest.mark.parametrize("d, expected", [(1, 2.0), (2, math.pi), (3, 4 * math.pi / 3)])
def test_unit_ball_volume_known(d, expected):
    assert unit_ball_volume(d) == pytest.approx(expected, rel=1e-14)


@pytest.mark.parametrize("d", [0, -1])
def test_unit_ball_volume_rejects_bad_dimension(d):
    with pytest.raises(InvalidDimensionError):
        unit_ball_volume(d)


def test_unit_ball_volume_normalisation_and_recursion():
    for d in range(1, 21):
        assert unit_ball_volume(d) * math.gamma((d + 2) / 2) / math.pi ** (d / 2) == pytest.approx(1.0, abs=1e-12)
    # V_d = 2 pi / d * V_{d-2}, independent of the Gamma function
    v = {0: 1.0, 1: 2.0}
    for d in range(2, 21):
        v[d] = 2 * math.pi / d * v[d - 2]
        assert unit_ball_volume(d) == pytest.approx(v[d], rel=1e-12)


def test_torus_box():
    box = TorusBox(3, 2.0)
    assert box.volume == 8.0
    np.testing.assert_array_equal(box.center, [1.0, 1.0, 1.0])
    w = box.wrap([-0.5, 2.5, 1e-18 - 0.0])
    assert box.contains(w)
    with pytest.raises(ValueError):
        TorusBox(2, 0.0)
    with pytest.raises(InvalidDimensionError):
        TorusBox(0, 1.0)


def test_torus_distance_examples():
    box = TorusBox(2, 10.0)
    assert torus_distance([1.0, 0.0], [1.0, 0.0], box) == 0.0
    assert torus_distance([1.0, 0.0], [9.0, 0.0], box) == pytest.approx(2.0)
    with pytest.raises(InvalidDimensionError):
        torus_distance([1.0, 0.0], [1.0, 0.0, 0.0], box)


coord = st.floats(0, 1, exclude_max=True)


@settings(max_examples=200, deadline=None)
@given(d=st.integers(1, 4), side=st.floats(0.5, 50), data=st.data())
def test_torus_distance_matches_shift_oracle(d, side, data):
    box = TorusBox(d, side)
    p = np.array(data.draw(st.lists(coord, min_size=d, max_size=d))) * side
    q = np.array(data.draw(st.lists(coord, min_size=d, max_size=d))) * side
    r = np.array(data.draw(st.lists(coord, min_size=d, max_size=d))) * side
    p, q, r = (box.wrap(a) for a in (p, q, r))
    dpq = torus_distance(p, q, box)
    assert dpq == pytest.approx(naive_torus_distance(p, q, side), abs=1e-9)
    assert 0 <= dpq <= side / 2 * math.sqrt(d) + 1e-12
    assert dpq == torus_distance(q, p, box)
    assert dpq <= float(np.linalg.norm(p - q)) + 1e-12
    assert dpq <= torus_distance(p, r, box) + torus_distance(r, q, box) + 1e-9


def test_sample_in_ball_support(rng):
    center = np.array([3.0, -1.0, 2.0])
    for _ in range(2000):
        x = sample_uniform_in_ball(center, 0.7, rng)
        assert np.linalg.norm(x - center) <= 0.7 + 1e-12
    with pytest.raises(ValueError):
        sample_uniform_in_ball(center, 0.0, rng)


@pytest.mark.parametrize("d", [1, 2, 3, 5])
def test_ball_mean_is_center(d, rng):
    n = 10**6
    x = uniform_in_unit_ball(n, d, rng)
    # per-coordinate variance of the uniform unit ball is 1 / (d + 2)
    se = math.sqrt(1 / (d + 2) / n)
    assert np.all(np.abs(x.mean(axis=0)) < 4 * se)


@pytest.mark.parametrize("d", [1, 2, 3, 4])
def test_ball_radial_law(d, rng):
    center = np.full(d, 5.0)
    u = np.array([np.linalg.norm(sample_uniform_in_ball(center, 2.0, rng) - center) / 2.0 for _ in range(5000)])
    res = stats.kstest(u, lambda s: np.clip(s, 0, 1) ** d)
    assert res.pvalue > 0.01
