"""The exact reference: rational recomputation and its agreement with the pipeline."""

from __future__ import annotations

from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fuzzyseq import dsl, oracle
from fuzzyseq import modulus as mod
from fuzzyseq import weighted_mean as wm

P = dsl.parse


def test_cesaro_constant_is_exact():
    o = oracle.transform_exact(P("crisp(1)"), P("1/k"), P("1"), 1, 50)
    assert o.exact
    assert all(t == 1 for t in o.t)
    assert o.at(50) == Fraction(1)


def test_closed_form_values():
    o = oracle.transform_exact(P("crisp(k)"), P("1/k^4"), P("1"), 1, 30)
    for k in range(1, 31):
        assert o.at(k) == Fraction(k * (k + 1) // 2, k**4)


def test_paired_and_fixed_bases():
    o = oracle.transform_exact(P("crisp(k)"), P("1/k"), P("1"), 1, 5, base=P("crisp(k + 1/2)"))
    assert all(t == Fraction(1, 2) for t in o.t)
    one = dsl.eval_exact(P("crisp(1)"), 1)
    o2 = oracle.transform_exact(P("crisp(1 + 1/k)"), P("1"), P("1"), 1, 3, base=one)
    assert o2.t == (Fraction(1), Fraction(3, 2), Fraction(11, 6))


def test_switches_to_wide_precision():
    # alternating harmonic denominators pass 200 digits well before k = 600
    o = oracle.transform_exact(P("crisp(1/k)"), P("1"), P("(-1)^k"), 1, 600)
    assert not o.exact
    with mpmath.workdps(60):
        ref = abs(mpmath.nsum(lambda j: (-1) ** j / j, [1, 600]))
        assert abs(o.at(600) - ref) < mpmath.mpf(10) ** -50


def test_irrational_terms_use_mpmath():
    o = oracle.transform_exact(P("crisp(sqrt(k))"), P("1/k"), P("1"), 1, 4)
    assert not o.exact
    assert float(o.at(4)) == pytest.approx((1 + 2**0.5 + 3**0.5 + 2) / 4, rel=1e-15)


def test_zero_weight_rejected():
    with pytest.raises(ZeroDivisionError):
        oracle.transform_exact(P("crisp(1)"), P("k - 2"), P("1"), 1, 3)


def test_scalar_series_and_partial_sums():
    o = oracle.transform_exact(P("crisp(1)"), P("1/k"), P("1"), 1, 3)
    s = oracle.scalar_series_exact(o, mod.RAT, P("2"))
    assert all(abs(x - mpmath.mpf(1) / 4) < 1e-50 for x in s)
    ps = oracle.partial_sums_exact([Fraction(1, 2), Fraction(1, 3)])
    assert ps == [Fraction(1, 2), Fraction(5, 6)]


def test_max_relative_error():
    err, at = oracle.max_relative_error([1.0, 2.0, 0.0], [Fraction(1), Fraction(2), Fraction(0)])
    assert (err, at) == (0.0, -1)
    err, at = oracle.max_relative_error([1.0, 2.002], [Fraction(1), Fraction(2)])
    assert at == 1 and err == pytest.approx(1e-3, rel=1e-9)


seqs = st.sampled_from([
    "crisp(1/k)",
    "tri(-1/k, 0, 1/k^2)",
    "select(k odd, tri(-k, 0, k), crisp(1/k))",
    "crisp((-1)^k * k) + tri(0, 1, 2)",
    "tri(-k^2, 0, k^2) * tri(-k, 0, k)",
])
schemes = st.sampled_from([("1/k", "1"), ("1/k^2", "k"), ("(-1)^k / (k + 1)", "1 + 1/k"), ("2", "1/k^3")])


@given(seqs, schemes)
def test_pipeline_agrees_with_oracle(seq, scheme):
    u, v = scheme
    n = 300
    ts = wm.transform(seq, wm.WeightScheme.of(u, v), n)
    o = oracle.transform_exact(P(seq), P(u), P(v), 1, n)
    err, _ = oracle.max_relative_error(ts.t, o.t)
    assert err <= 1e-12
    assert np.all(np.isfinite(ts.t))
