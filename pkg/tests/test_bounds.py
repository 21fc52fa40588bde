import math

import pytest

from contperc.bounds import (
    REPORTED_C_2D,
    REPORTED_HIGHER_ORDER_2D,
    bound_report,
    lambda_lower_bound,
    mu_lower_bound,
)
from contperc.cluster import c3_closed_form_2d, c3_series_3d
from contperc.geometry import unit_ball_volume


def test_planar_triangle_bounds():
    c = c3_closed_form_2d()
    assert mu_lower_bound(c) == pytest.approx(2.419, abs=1e-3)
    assert lambda_lower_bound(2, c) == pytest.approx(0.7698, abs=1e-4)


def test_spatial_triangle_bounds():
    c = c3_series_3d()
    assert mu_lower_bound(c) == pytest.approx(32 / 17, abs=1e-12)
    assert lambda_lower_bound(3, c) == pytest.approx(0.4494, abs=1e-4)
    # rounded input gives the same bounds
    assert lambda_lower_bound(3, 0.4688) == pytest.approx(0.4494, abs=1e-4)


@pytest.mark.xfail(strict=True, reason="1 / (1 - 15/32) = 1.882; the quoted 1.412 is inconsistent with lambda 0.4494")
def test_spatial_mu_reported_value():
    assert mu_lower_bound(c3_series_3d()) == pytest.approx(1.412, abs=1e-3)


def test_zero_coefficient():
    assert mu_lower_bound(0.0) == 1.0
    assert lambda_lower_bound(2, 0.0) == pytest.approx(1 / math.pi, abs=1e-15)


@pytest.mark.parametrize("ct", [-0.1, 1.0, 1.5, math.nan])
def test_invalid_coefficient(ct):
    with pytest.raises(ValueError):
        mu_lower_bound(ct)
    with pytest.raises(ValueError):
        lambda_lower_bound(2, ct)


def test_invalid_dimension():
    with pytest.raises(ValueError):
        lambda_lower_bound(1, 0.3)


@pytest.mark.parametrize("d", range(2, 9))
def test_lambda_times_volume_is_mu(d):
    for ct in (0.0, 0.2, 0.5865, 0.9):
        assert lambda_lower_bound(d, ct) * unit_ball_volume(d) == pytest.approx(mu_lower_bound(ct), abs=1e-12)


def test_monotone_in_coefficient():
    grid = [k / 100 for k in range(100)]
    mus = [mu_lower_bound(c) for c in grid]
    assert all(b > a for a, b in zip(mus, mus[1:]))


def test_reported_planar_values_give_increasing_bounds():
    lams = [lambda_lower_bound(2, REPORTED_C_2D[t]) for t in (3, 4, 5)]
    assert lams[0] < lams[1] < lams[2]
    assert mu_lower_bound(REPORTED_C_2D[5]) == pytest.approx(REPORTED_HIGHER_ORDER_2D["mu"], abs=1e-3)


def test_report_closed_form_and_series():
    r = bound_report(2, 3, "closed_form")
    assert r.lambda_lower == pytest.approx(0.7698, abs=1e-4)
    assert r.coefficient_method == "closed_form" and r.mu_interval is None
    r = bound_report(3, 3, "series")
    assert r.lambda_lower == pytest.approx(0.4494, abs=1e-4)
    assert r.to_dict()["d"] == 3


def test_report_monte_carlo_interval():
    r = bound_report(2, 3, "monte_carlo", trials=200_000, seed=4)
    lo, hi = r.lambda_interval
    assert lo < r.lambda_lower < hi
    assert lo == pytest.approx(lambda_lower_bound(2, r.coefficient - r.coefficient_half_width))
    assert r.reference is None


def test_report_unsupported_method():
    with pytest.raises(ValueError):
        bound_report(2, 4, "closed_form")


def test_report_t4_carries_reference_values():
    r = bound_report(2, 4, "monte_carlo", trials=100_000, seed=0)
    assert r.reference["reported_coefficient"] == 0.6012
    assert r.reference["lambda"] == 0.883


@pytest.mark.xfail(strict=True, reason="0.883 is not reachable from any planar coefficient below 0.64")
def test_report_t4_monte_carlo_reaches_reported_lambda():
    r = bound_report(2, 4, "monte_carlo", trials=10**6, seed=0)
    lo, hi = r.lambda_interval
    assert lo <= 0.883 <= hi
