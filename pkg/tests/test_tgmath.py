import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from headtail.tgmath import (
    TruncGeomParams,
    loss_correction,
    loss_correction_array,
    reduced_degree,
    step_cdf_approx,
    step_min_x,
    tg_cdf,
    tg_expectation,
    tg_pdf,
)
from oracles import loss_ref, tg_pdf_ref

probs = st.floats(min_value=1e-4, max_value=1.0, allow_nan=False)
sizes = st.integers(min_value=1, max_value=400)


def test_params_validation():
    for p, s in [(0.0, 3), (1.5, 3), (-0.1, 3), (0.5, 0), (0.5, 2.5)]:
        with pytest.raises(ValueError):
            TruncGeomParams(p, s)


def test_pdf_support():
    tg = TruncGeomParams(0.3, 4)
    with pytest.raises(ValueError):
        tg_pdf(tg, 4)
    with pytest.raises(ValueError):
        tg_pdf(tg, -1)
    with pytest.raises(ValueError):
        tg_cdf(tg, 4)


def test_pdf_matches_direct_formula():
    for p in (0.001, 0.2, 0.5, 0.9):
        for s in (1, 2, 7, 50):
            for k in range(s):
                assert tg_pdf(TruncGeomParams(p, s), k) == pytest.approx(tg_pdf_ref(p, s, k), rel=1e-12)


def test_degenerate_cases():
    assert tg_pdf(TruncGeomParams(0.3, 1), 0) == 1.0
    assert tg_expectation(TruncGeomParams(0.3, 1)) == 0.0
    assert tg_expectation(TruncGeomParams(1.0, 10)) == 0.0
    assert tg_pdf(TruncGeomParams(1.0, 5), 0) == 1.0
    assert tg_pdf(TruncGeomParams(1.0, 5), 3) == 0.0


def test_expectation_two_point():
    # s = 2: mass p and p(1-p) on 0 and 1
    p = 0.25
    assert tg_expectation(TruncGeomParams(p, 2)) == pytest.approx((1 - p) / (2 - p), rel=1e-14)


@settings(max_examples=200, deadline=None)
@given(probs, sizes)
def test_cdf_is_cumulative_pdf(p, s):
    tg = TruncGeomParams(p, s)
    acc = 0.0
    for k in range(s):
        acc += tg_pdf(tg, k)
        assert tg_cdf(tg, k) == pytest.approx(acc, rel=1e-9, abs=1e-12)
    assert tg_cdf(tg, s - 1) == 1.0


@settings(max_examples=200, deadline=None)
@given(probs, sizes)
def test_expectation_matches_summation(p, s):
    tg = TruncGeomParams(p, s)
    direct = math.fsum(k * tg_pdf_ref(p, s, k) for k in range(s))
    assert tg_expectation(tg) == pytest.approx(direct, rel=1e-9, abs=1e-9)


@settings(max_examples=100, deadline=None)
@given(probs, st.integers(min_value=1, max_value=300))
def test_expectation_bounds_and_monotone(p, s):
    e1 = tg_expectation(TruncGeomParams(p, s))
    e2 = tg_expectation(TruncGeomParams(p, s + 1))
    assert 0.0 <= e1 <= (s - 1) / 2 + 1e-12
    assert e1 <= (1 - p) / p + 1e-9
    assert e2 >= e1 - 1e-9


def test_expectation_extreme_parameters():
    # huge s and tiny p: close to the untruncated geometric mean
    e = tg_expectation(TruncGeomParams(1e-6, 10**9))
    assert e == pytest.approx((1 - 1e-6) / 1e-6, rel=1e-6)
    assert math.isfinite(tg_expectation(TruncGeomParams(1e-9, 10**7)))


def test_loss_correction_values():
    assert loss_correction(0.5, 10) == 1
    assert [loss_correction(0.2, r) for r in range(1, 13)] == [0, 1, 1, 2, 2, 2, 3, 3, 3, 3, 3, 4]
    assert loss_correction(1.0, 1000) == 0
    assert loss_correction(0.3, 1) == 0


def test_loss_correction_floor_variant():
    for p in (0.01, 0.2, 0.5):
        for r in range(1, 200):
            c, f = loss_correction(p, r), loss_correction(p, r, "floor")
            mean = tg_expectation(TruncGeomParams(p, r))
            assert f <= mean + 1e-9 <= c + 2e-9
            assert c - f in (0, 1)
    with pytest.raises(ValueError):
        loss_correction(0.2, 5, "round")


def test_loss_correction_matches_bruteforce_sample():
    for p in (0.001, 0.03, 0.1, 0.5, 1.0):
        for r in list(range(1, 120)) + [500, 2000]:
            assert loss_correction(p, r) == loss_ref(p, r), (p, r)


def test_loss_correction_array_agrees_with_scalar():
    for p in (0.001, 0.2, 0.5, 1.0):
        arr = loss_correction_array(p, 3000)
        assert arr.tolist() == [loss_correction(p, r) for r in range(1, 3001)]
    assert loss_correction_array(0.2, 0).size == 0


def test_reduced_degree():
    assert reduced_degree(0.2, 1) == 1
    assert reduced_degree(0.2, 12) == 8
    for d in range(1, 100):
        assert 1 <= reduced_degree(0.05, d) <= d


def test_step_curve_shape():
    for k in (1, 5, 10, 100):
        x0 = step_min_x(k)
        assert step_cdf_approx(k, x0) == 0.0
        xs = np.linspace(x0, k + 20, 2000)
        ys = [step_cdf_approx(k, x) for x in xs]
        assert all(b >= a for a, b in zip(ys, ys[1:]))
        assert ys[-1] == pytest.approx(1.0, abs=1e-6)
    with pytest.raises(ValueError):
        step_cdf_approx(10, step_min_x(10) - 0.5)
    with pytest.raises(ValueError):
        step_cdf_approx(0, 1.0)


def test_step_curve_approximates_finite_cdf():
    # small p: the exact coefficient at r = x/p is close to the limit curve
    p, k = 1e-3, 10
    d = round(k / p)
    red = reduced_degree(p, d)
    for x in (9.5, 10.0, 11.0, 13.0):
        r = round(x / p)
        exact = tg_cdf(TruncGeomParams(p, r), r - red)
        assert exact == pytest.approx(step_cdf_approx(k, x), abs=5e-3)
