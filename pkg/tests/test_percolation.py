import math

import numpy as np
import pytest

from contperc.percolation import (
    CurveRow,
    NoCrossingError,
    OutsideRegimeError,
    PercolationCurve,
    estimate_threshold,
    exploration_dominance,
    percolation_sweep,
    post_chain_increments,
    subcritical_growth,
    subcritical_side,
)
from contperc.geometry import TorusBox
from contperc.rgg import build_graph, sample_binomial_points


def _synthetic(frac, wrap=None):
    rows = []
    for lam, f, w in zip((1.0, 2.0), frac, wrap or frac):
        rows.append(CurveRow(lam, 10, f, 0.0, 1.0, w, 0.0))
    return PercolationCurve(d=2, L=32.0, radius=1.0, rows=tuple(rows))


def test_deep_subcritical():
    row = percolation_sweep(2, [0.3], 32.0, 20, seed=1).rows[0]
    assert row.mean_fraction < 0.05
    assert row.wrap_probability == 0.0


def test_deep_supercritical():
    row = percolation_sweep(2, [3.0], 32.0, 20, seed=1).rows[0]
    assert row.mean_fraction > 0.9
    assert row.wrap_probability == 1.0
    assert row.mean_origin_size > 0.9 * 3.0 * 32**2


def test_fraction_nondecreasing_up_to_noise():
    curve = percolation_sweep(2, np.arange(0.8, 2.01, 0.1).round(2), 32.0, 30, seed=2)
    f, se = curve.column("mean_fraction"), curve.column("stderr")
    for k in range(len(f) - 1):
        assert f[k + 1] - f[k] > -3 * math.hypot(se[k], se[k + 1])
    assert np.all((f > 0) & (f <= 1))


def test_sweep_validation():
    for args in [([], 32.0, 5), ([1.0, 1.0], 32.0, 5), ([-1.0], 32.0, 5), ([1.0], 7.0, 5), ([1.0], 32.0, 0)]:
        with pytest.raises(ValueError):
            percolation_sweep(2, *args, seed=0)


def test_synthetic_crossing():
    curve = _synthetic((0.2, 0.8))
    for param in ("largest_fraction", "wrapping"):
        est = estimate_threshold(curve, 0.5, param)
        assert est.lambda_hat == pytest.approx(1.5)
        assert est.method == param and est.L == 32.0
    assert estimate_threshold(_synthetic((0.0, 1.0)), 0.25, "largest_fraction").lambda_hat == pytest.approx(1.25)


def test_no_crossing_raises():
    with pytest.raises(NoCrossingError, match="widen"):
        estimate_threshold(_synthetic((0.6, 0.8)), 0.5, "largest_fraction")
    with pytest.raises(ValueError):
        estimate_threshold(_synthetic((0.2, 0.8)), 0.5, "origin")


def test_curve_rejects_unordered_rows():
    row = CurveRow(1.0, 1, 0.5, 0.0, 1.0, 0.0, 0.0)
    with pytest.raises(ValueError):
        PercolationCurve(2, 32.0, 1.0, (row, row))


def test_scaling_invariance():
    # (lambda, r = 1/2) on side 16 is (lambda / 4, 1) on side 32
    grid = np.arange(1.2, 1.71, 0.05).round(3)
    a = estimate_threshold(percolation_sweep(2, 4 * grid, 16.0, 40, seed=7, radius=0.5))
    b = estimate_threshold(percolation_sweep(2, grid, 32.0, 40, seed=8))
    lo, hi = (x / 4 for x in a.interval)
    assert lo <= b.interval[1] and b.interval[0] <= hi


def test_sweep_worker_invariance():
    a = percolation_sweep(2, [1.2, 1.5], 16.0, 6, seed=3, workers=1)
    b = percolation_sweep(2, [1.2, 1.5], 16.0, 6, seed=3, workers=2)
    assert a == b


def test_growth_regime_errors():
    with pytest.raises(OutsideRegimeError):
        subcritical_growth(2, 3.0, [1000], 1, seed=0)
    with pytest.raises(OutsideRegimeError):
        subcritical_growth(3, 1.9, [1000], 1, seed=0)
    for n_list in ([], [1000, 1000], [1]):
        with pytest.raises(ValueError):
            subcritical_growth(2, 1.0, n_list, 1, seed=0)


def test_subcritical_side():
    assert subcritical_side(1000, 2.0, 2) == pytest.approx(math.sqrt(1000 * math.pi / 2))


def test_growth_ratio_bounded_at_unit_mean_degree():
    rep = subcritical_growth(2, 1.0, [10**3, 10**4, 10**5], 20, seed=4)
    assert [r.n for r in rep.rows] == [10**3, 10**4, 10**5]
    assert rep.rows[2].max_ratio <= 2 * rep.rows[0].max_ratio
    assert all(r.max_largest >= 1 for r in rep.rows)


def test_growth_small_fraction_below_bound():
    rep = subcritical_growth(2, 2.0, [10**3, 10**4, 10**5], 20, seed=5)
    assert rep.rows[2].mean_fraction < 0.01
    assert rep.to_dict()["mu"] == 2.0


def test_post_chain_increments_skip_first_step(rng):
    box = TorusBox(2, subcritical_side(500, 2.0, 2))
    g = build_graph(sample_binomial_points(500, box, rng), 1.0)
    inc = post_chain_increments(g, [0, 1, 2])
    from contperc.exploration import active_saturated_run

    expected = sum((active_saturated_run(g, s).y_values[1:] for s in (0, 1, 2)), [])
    assert inc == expected


def test_exploration_dominance_small():
    exp = exploration_dominance(2, 2.0, 2000, graphs=3, starts_per_graph=100, seed=1)
    assert exp.q == pytest.approx(2.0 / 1999 * (1 - 0.5865033284336559))
    assert exp.report.passes
    with pytest.raises(ValueError):
        exploration_dominance(2, 2.0, 200, 1, 5, seed=1, t=4)
