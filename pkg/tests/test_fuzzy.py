"""Fuzzy numbers: representation rules, arithmetic, the metric d and the order."""

from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fuzzyseq import fuzzy as fz
from fuzzyseq.fuzzy import (
    ZERO,
    FuzzyArray,
    FuzzyNumber,
    InvalidFuzzyNumber,
    Order,
    abs_fuzzy,
    leq,
    make_crisp,
    make_triangular,
    metric_d,
    validate,
)

from conftest import fuzzy_numbers, random_fuzzy

DENSE = np.linspace(0.0, 1.0, 10_001)


def dense_d(x: FuzzyNumber, y: FuzzyNumber) -> float:
    xl, xu = np.interp(DENSE, x.alphas, x.lower), np.interp(DENSE, x.alphas, x.upper)
    yl, yu = np.interp(DENSE, y.alphas, y.lower), np.interp(DENSE, y.alphas, y.upper)
    return float(max(np.max(np.abs(xl - yl)), np.max(np.abs(xu - yu))))


# -- construction and validation -------------------------------------------------

def test_crisp_and_triangular_levels():
    c = make_crisp(2.5)
    assert c.is_crisp()
    assert c.cut(0.3) == (2.5, 2.5)
    t = make_triangular(-1, 0, 3)
    assert t.cut(0.0) == (-1.0, 3.0)
    assert t.cut(1.0) == (0.0, 0.0)
    assert t.cut(0.5) == (-0.5, 1.5)
    assert repr(t) == "tri(-1.0, 0.0, 3.0)"


def test_triangular_rejects_unordered():
    with pytest.raises(ValueError):
        make_triangular(1, 0, 2)
    with pytest.raises(ValueError):
        make_crisp(math.inf)


@pytest.mark.parametrize(
    "levels, clause",
    [
        ([(0, 1, 3), (0.5, 0, 2), (1, 1, 1)], "i"),
        ([(0, 0, 2), (0.5, 0.5, 3), (1, 1, 1)], "ii"),
        ([(0, 0, 3), (1, 2, 1)], "iv"),
        ([(0.2, 0, 1), (1, 0, 0)], "grid"),
        ([(0, 0, 1), (0.9, 0.5, 0.5)], "grid"),
        ([(0, 0, 1), (1.5, 0, 0), (1, 0, 0)], "grid"),
        ([(0, 0, float("nan")), (1, 0, 0)], "grid"),
    ],
)
def test_validate_reports_clause(levels, clause):
    rep = validate(levels)
    assert not rep.valid
    assert clause in rep.clauses()
    with pytest.raises(InvalidFuzzyNumber) as exc:
        FuzzyNumber(levels)
    assert clause in exc.value.report.clauses()


def test_validate_accepts_records_and_reports_location():
    ok = validate([{"alpha": 0, "lower": -1, "upper": 1}, {"alpha": 1, "lower": 0, "upper": 0}])
    assert ok.valid and ok.to_dict()["valid"]
    bad = validate([(0, 0, 2), (0.25, 0.5, 3), (1, 1, 1)])
    (v,) = [v for v in bad.violations if v.clause == "ii"]
    assert v.alpha == 0.25


def test_duplicate_levels_merge_or_conflict():
    x = FuzzyNumber([(0, 0, 2), (0, 0, 2), (1, 1, 1)])
    assert len(x.alphas) == 2
    # at alpha = 0 the widest interval wins, elsewhere a conflict is an error
    assert FuzzyNumber([(0, 0, 2), (0, -1, 2), (1, 1, 1)]).cut(0.0) == (-1.0, 2.0)
    assert "grid" in validate([(0, 0, 2), (0.5, 0.5, 2), (0.5, 0.6, 2), (1, 1, 1)]).clauses()


def test_immutable():
    x = make_crisp(1)
    with pytest.raises(AttributeError):
        x.lower = None
    with pytest.raises(ValueError):
        x.lower[0] = 5.0


# -- metric ------------------------------------------------------------------------

def test_metric_crisp_values():
    assert metric_d(make_crisp(2), make_crisp(5)) == 3.0
    assert metric_d(make_triangular(-1, 0, 1), ZERO) == 1.0
    assert fz.norm(make_triangular(-3, 0, 1)) == 3.0


@given(fuzzy_numbers(), fuzzy_numbers(), fuzzy_numbers())
def test_metric_axioms(x, y, z):
    assert metric_d(x, x) == 0.0
    assert metric_d(x, y) == metric_d(y, x)
    assert metric_d(x, z) <= metric_d(x, y) + metric_d(y, z) + 1e-9
    assert metric_d(x, y) >= 0.0


@given(fuzzy_numbers(lattice=True), fuzzy_numbers(lattice=True))
def test_metric_matches_dense_alpha_oracle(x, y):
    assert metric_d(x, y) == pytest.approx(dense_d(x, y), abs=1e-9)


def _slope(x: FuzzyNumber) -> float:
    da = np.diff(x.alphas)
    return float(max(np.max(np.abs(np.diff(x.lower)) / da), np.max(np.abs(np.diff(x.upper)) / da)))


@given(fuzzy_numbers(), fuzzy_numbers())
def test_dense_oracle_error_bounded_by_slope_off_lattice(x, y):
    # between dense points the endpoint gap moves at most (slope_x + slope_y) * h / 2
    exact, dense = metric_d(x, y), dense_d(x, y)
    h = DENSE[1]
    assert dense <= exact + 1e-9
    assert exact - dense <= (_slope(x) + _slope(y)) * h / 2 + 1e-9


@given(fuzzy_numbers(), fuzzy_numbers(), fuzzy_numbers())
def test_metric_translation_invariant(x, y, z):
    # d(X + Z, Y + Z) = d(X, Y) for the Matloka metric
    assert metric_d(x + z, y + z) == pytest.approx(metric_d(x, y), abs=1e-9)


@given(fuzzy_numbers(), st.floats(-5, 5))
def test_metric_scales(x, c):
    assert metric_d(x * c, ZERO) == pytest.approx(abs(c) * metric_d(x, ZERO), rel=1e-12, abs=1e-12)


def test_fuzzy_array_distances_agree(rng):
    xs = [random_fuzzy(rng) for _ in range(20)]
    ys = [random_fuzzy(rng) for _ in range(20)]
    d = FuzzyArray.from_numbers(xs).distances(FuzzyArray.from_numbers(ys))
    assert np.allclose(d, [metric_d(a, b) for a, b in zip(xs, ys)], rtol=0, atol=1e-12)
    n = FuzzyArray.from_numbers(xs).norms()
    assert np.array_equal(n, [fz.norm(a) for a in xs])


# -- arithmetic -----------------------------------------------------------------------

@given(fuzzy_numbers(), fuzzy_numbers(), st.floats(0, 1))
def test_addition_is_levelwise(x, y, a):
    s = x + y
    xl, xu = x.cut(a)
    yl, yu = y.cut(a)
    sl, su = s.cut(a)
    assert sl == pytest.approx(xl + yl, abs=1e-9)
    assert su == pytest.approx(xu + yu, abs=1e-9)


@given(fuzzy_numbers(), fuzzy_numbers())
def test_multiplication_exact_on_grid(x, y):
    p = x * y
    for a in p.alphas:
        xl, xu = x.cut(a)
        yl, yu = y.cut(a)
        prods = [xl * yl, xl * yu, xu * yl, xu * yu]
        lo, hi = p.cut(a)
        assert lo == pytest.approx(min(prods), abs=1e-9)
        assert hi == pytest.approx(max(prods), abs=1e-9)


@given(fuzzy_numbers())
def test_negation_and_subtraction(x):
    assert metric_d(-(-x), x) == 0.0
    d = x - x  # not the crisp zero in general, but symmetric about 0
    assert d.lower[0] == pytest.approx(-d.upper[0])


@given(fuzzy_numbers())
def test_abs_matches_dense_levelwise_formula(x):
    a = abs_fuzzy(x)
    assert validate(a.levels).valid
    lo, hi = np.interp(DENSE, x.alphas, x.lower), np.interp(DENSE, x.alphas, x.upper)
    want_lo = np.maximum(0.0, np.maximum(lo, -hi))
    want_hi = np.maximum(np.abs(lo), np.abs(hi))
    got_lo, got_hi = np.interp(DENSE, a.alphas, a.lower), np.interp(DENSE, a.alphas, a.upper)
    assert np.max(np.abs(got_lo - want_lo)) <= 1e-9
    assert np.max(np.abs(got_hi - want_hi)) <= 1e-9


def test_abs_of_straddling_triangle():
    a = abs(make_triangular(-2, 1, 2))
    assert a.cut(0.0) == (0.0, 2.0)
    assert a.cut(1.0) == (1.0, 1.0)
    # lower endpoint of the cut crosses zero at alpha = 2/3
    assert a.cut(2 / 3)[0] == pytest.approx(0.0, abs=1e-12)


# -- order and membership ----------------------------------------------------------

def test_order():
    assert leq(make_crisp(1), make_crisp(2)) is Order.LESS_OR_EQUAL
    assert leq(make_crisp(2), make_crisp(1)) is Order.GREATER_OR_EQUAL
    assert leq(make_triangular(0, 1, 2), make_triangular(0, 1, 2)) is Order.EQUAL
    assert leq(make_triangular(-1, 0, 1), make_triangular(-0.5, 0, 0.5)) is Order.INCOMPARABLE
    assert make_triangular(0, 1, 2) == make_triangular(0.0, 1.0, 2.0)


@given(fuzzy_numbers(), fuzzy_numbers())
def test_order_antisymmetric(x, y):
    o, r = leq(x, y), leq(y, x)
    flip = {
        Order.LESS_OR_EQUAL: Order.GREATER_OR_EQUAL,
        Order.GREATER_OR_EQUAL: Order.LESS_OR_EQUAL,
        Order.EQUAL: Order.EQUAL,
        Order.INCOMPARABLE: Order.INCOMPARABLE,
    }
    assert r is flip[o]


def test_membership():
    t = make_triangular(0, 1, 3)
    assert t(1.0) == 1.0
    assert t(0.5) == pytest.approx(0.5)
    assert t(2.0) == pytest.approx(0.5)
    assert t(-0.1) == 0.0 and t(3.5) == 0.0
    assert make_crisp(2)(2.0) == 1.0


@given(fuzzy_numbers(), st.floats(0, 1))
def test_membership_inverts_cuts(x, a):
    lo, hi = x.cut(a)
    # a rounding of a few ulp in t moves alpha by ulp / |dt/dalpha| on the local segment
    j = min(int(np.searchsorted(x.alphas, a, side="right")), len(x.alphas) - 1)
    da = x.alphas[j] - x.alphas[j - 1]
    ulp = 8 * np.finfo(float).eps * max(1.0, float(np.max(np.abs(x.lower))), float(np.max(np.abs(x.upper))))
    for v, t in ((x.lower, lo), (x.upper, hi)):
        dt = abs(v[j] - v[j - 1])
        # a segment narrower than the rounding itself does not resolve alpha at all
        tol = 1e-9 + (ulp * da / dt if dt > ulp * da else 1.0)
        assert x(t) >= a - tol


# -- serialization ---------------------------------------------------------------

def test_shorthand_and_round_trip():
    assert fz.parse_shorthand("tri 1/2 1 3/2") == make_triangular(0.5, 1, 1.5)
    assert fz.loads("crisp 4") == make_crisp(4)
    with pytest.raises(ValueError):
        fz.parse_shorthand("trapezoid 1 2 3 4")
    x = FuzzyNumber([(0, -1, 4), (0.3, 0, 3), (1, 1, 1)])
    assert metric_d(fz.loads(fz.dumps(x)), x) == 0.0
    assert fz.from_document({"levels": fz.to_records(x)}) == x
