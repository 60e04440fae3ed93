"""Expression language: parsing, printing, float and exact evaluation, moduli."""

from __future__ import annotations

import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fuzzyseq import dsl
from fuzzyseq import modulus as mod
from fuzzyseq.dsl import DslEvalError, DslSyntaxError


# -- random expression text --------------------------------------------------------

leaf = st.one_of(
    st.just("k"),
    st.integers(0, 9).map(str),
    st.sampled_from(["0.5", "2.25", "10", "1e2"]),
)


def _combine(children):
    bin_ = st.tuples(children, st.sampled_from("+-*/"), children).map(lambda t: f"{t[0]} {t[1]} {t[2]}")
    paren = children.map(lambda c: f"({c})")
    neg = children.map(lambda c: f"-{c}")
    power = st.tuples(children, st.integers(0, 3)).map(lambda t: f"({t[0]})^{t[1]}")
    alt = children.map(lambda c: f"(-1)^({c})")
    func = st.tuples(st.sampled_from(["sqrt", "floor", "abs"]), children).map(lambda t: f"{t[0]}({t[1]})")
    return st.one_of(bin_, paren, neg, power, alt, func)


scalar_text = st.recursive(leaf, _combine, max_leaves=8)

fuzzy_text = st.one_of(
    scalar_text.map(lambda s: f"crisp({s})"),
    st.tuples(scalar_text, scalar_text, scalar_text).map(lambda t: "tri({}, {}, {})".format(*t)),
    st.tuples(st.sampled_from(["even", "odd", "is_square"]), scalar_text).map(
        lambda t: f"select(k {t[0]}, crisp({t[1]}), crisp(0))"
    ),
)


@given(st.one_of(scalar_text, fuzzy_text))
def test_print_parse_round_trip(text):
    node = dsl.parse(text)
    printed = dsl.to_text(node)
    assert dsl.parse(printed) == node
    assert dsl.to_text(dsl.parse(printed)) == printed


@given(scalar_text, st.integers(1, 50))
def test_printing_preserves_value(text, k):
    node = dsl.parse(text)
    again = dsl.parse(dsl.to_text(node))
    try:
        a = dsl.eval_array(node, [k])
    except (DslEvalError, FloatingPointError, ZeroDivisionError, OverflowError):
        return
    b = dsl.eval_array(again, [k])
    assert np.array_equal(a, b, equal_nan=True)


# -- float evaluation ------------------------------------------------------------------

@pytest.mark.parametrize(
    "text, k, value",
    [
        ("1/k^4", 10, 1e-4),
        ("floor(sqrt(k))", 10, 3.0),
        ("floor(sqrt(k))/k", 10_000, 0.01),
        ("(-1)^k", 3, -1.0),
        ("(-1)^k", 4, 1.0),
        ("2 - 1/k", 4, 1.75),
        ("-2^2", 1, -4.0),
        ("2^3^2", 1, 512.0),
        ("abs(3 - k)", 5, 2.0),
        ("1e2 + 0.5", 1, 100.5),
    ],
)
def test_eval_scalar_examples(text, k, value):
    assert dsl.eval_scalar(text, k) == value


def test_eval_fuzzy_examples():
    x = dsl.eval_fuzzy("crisp(1/k)", 5)
    assert x.is_crisp() and x.lower[0] == 0.2
    t = dsl.eval_fuzzy("tri(-1/k, 0, 1/k)", 4)
    assert t.cut(0.0) == (-0.25, 0.25)
    sq = dsl.eval_array(dsl.parse("select(k is_square, crisp(1), crisp(0))"), np.arange(1, 11))
    assert list(sq.norms()) == [1, 0, 0, 1, 0, 0, 0, 0, 1, 0]
    odd = dsl.eval_array(dsl.parse("select(k odd, tri(-k, 0, k), crisp(0))"), [1, 2, 3])
    assert list(odd.norms()) == [1, 0, 3]


def test_fuzzy_products_and_sums():
    p = dsl.eval_fuzzy("tri(-k^2, 0, k^2) * tri(-k, 0, k)", 3)
    assert p.cut(0.0) == (-27.0, 27.0)
    s = dsl.eval_fuzzy("crisp(1) + tri(-1, 0, 1)", 1)
    assert s.cut(0.0) == (0.0, 2.0)
    scaled = dsl.eval_fuzzy("2 * tri(0, 1, 2)", 1)
    assert scaled.cut(1.0) == (2.0, 2.0)


def test_params_are_bound_at_evaluation():
    node = dsl.parse("crisp(1/n + 1/k)", ("n",))
    assert dsl.eval_array(node, [2], {"n": 4}).norms()[0] == 0.75
    with pytest.raises(DslSyntaxError):
        dsl.parse("crisp(1/n)")


def test_isqrt_array_is_exact():
    n = np.array([0, 1, 2, 3, 4, 15, 16, 17, 2**52 - 1, 2**52, (2**26 + 1) ** 2 - 1], dtype=np.int64)
    assert list(dsl.isqrt_array(n)) == [math.isqrt(int(v)) for v in n]


@pytest.mark.parametrize(
    "text, k",
    [("1/(k - 3)", 3), ("sqrt(1 - k)", 2), ("(-1)^(k/2)", 1), ("floor(k)^0.5 * (-1)^(1/k)", 2)],
)
def test_eval_errors_carry_index(text, k):
    with pytest.raises(DslEvalError) as exc:
        dsl.eval_array(dsl.parse(text), np.arange(1, 6))
    assert exc.value.k == k


def test_tri_order_checked_at_evaluation():
    with pytest.raises((DslEvalError, ValueError)):
        dsl.eval_array(dsl.parse("tri(k, 0, 1)"), [1, 2])


# -- syntax errors --------------------------------------------------------------------

@pytest.mark.parametrize(
    "text, column",
    [("1 +", 4), ("k * * 2", 5), ("crisp(1", 8), ("foo(k)", 1), ("select(k prime, crisp(1), crisp(0))", 10), ("1 $ 2", 3)],
)
def test_syntax_error_positions(text, column):
    with pytest.raises(DslSyntaxError) as exc:
        dsl.parse(text)
    assert exc.value.line == 1
    assert exc.value.column == column


def test_kind_checks():
    with pytest.raises(DslSyntaxError):
        dsl.parse_fuzzy("1/k")
    with pytest.raises(DslSyntaxError):
        dsl.parse_scalar("crisp(1)")
    with pytest.raises(DslSyntaxError):
        dsl.parse("crisp(crisp(1))")


def test_multiline_position():
    with pytest.raises(DslSyntaxError) as exc:
        dsl.parse("1 +\n  * k")
    assert (exc.value.line, exc.value.column) == (2, 3)


# -- exact evaluation -----------------------------------------------------------------

def test_exact_rational_values():
    assert dsl.eval_exact(dsl.parse("1/k^4"), 10) == Fraction(1, 10_000)
    assert dsl.eval_exact(dsl.parse("floor(sqrt(k))/k"), 10) == Fraction(3, 10)
    assert dsl.eval_exact(dsl.parse("(-1)^k / k"), 3) == Fraction(-1, 3)
    assert dsl.eval_exact(dsl.parse("0.1 + 0.2"), 1) == Fraction(3, 10)


def test_exact_irrational_uses_mpmath():
    v = dsl.eval_exact(dsl.parse("sqrt(k)"), 2)
    assert isinstance(v, mpmath.mpf)
    with mpmath.workdps(60):
        assert abs(v - mpmath.sqrt(2)) < mpmath.mpf(10) ** -45
    assert dsl.eval_exact(dsl.parse("sqrt(k)"), 9) == 3


def test_exact_fuzzy_mixed_endpoints_homogenised():
    x = dsl.eval_exact(dsl.parse("tri(0, 1/k, sqrt(k))"), 2)
    assert not x.rational
    y = dsl.eval_exact(dsl.parse("tri(0, 1/k, k)"), 2)
    assert y.rational
    assert y.distance(dsl.eval_exact(dsl.parse("crisp(0)"), 2)) == 2


@given(scalar_text, st.integers(1, 30))
def test_exact_agrees_with_float(text, k):
    node = dsl.parse(text)
    try:
        exact = dsl.eval_exact(node, k)
        approx = float(dsl.eval_array(node, [k])[0])
    except (DslEvalError, ZeroDivisionError, OverflowError, ValueError):
        return
    if not math.isfinite(approx) or abs(approx) > 1e12:
        return
    # floor() of a value within rounding of an integer may legitimately differ
    if "floor" in text:
        return
    assert float(exact) == pytest.approx(approx, rel=1e-9, abs=1e-9)


# -- modulus grammar ----------------------------------------------------------------

@pytest.mark.parametrize(
    "text, node",
    [
        ("id", mod.ID),
        ("rat", mod.RAT),
        ("pow 0.5", mod.Power(0.5)),
        ("id + rat", mod.Sum(mod.ID, mod.RAT)),
        ("pow 0.5 . rat", mod.Compose(mod.Power(0.5), mod.RAT)),
        ("(id + rat)^2", mod.Iterate(mod.Sum(mod.ID, mod.RAT), 2)),
        ("rat^3", mod.Iterate(mod.RAT, 3)),
    ],
)
def test_parse_modulus(text, node):
    assert dsl.parse_modulus(text) == node
    assert str(node) == text
    assert dsl.parse_modulus(str(node)) == node


@pytest.mark.parametrize("text", ["pow 2", "pow", "rat^0", "id +", "sin", "(id"])
def test_parse_modulus_errors(text):
    with pytest.raises((DslSyntaxError, ValueError)):
        dsl.parse_modulus(text)


def test_catalog_moduli_print_and_reparse():
    for text, f in mod.CATALOG_MODULI.items():
        assert dsl.parse_modulus(text) == f
        assert str(f) == text
