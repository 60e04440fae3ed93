"""Modulus functions: the axioms, the expression algebra and the growth constant."""

from __future__ import annotations

import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fuzzyseq import modulus as mod
from fuzzyseq.modulus import ID, RAT, Compose, GridSpec, Iterate, Power, Raw, Sum

nonneg = st.floats(0, 1e6, allow_nan=False)


@pytest.mark.parametrize("name", sorted(mod.CATALOG_MODULI))
def test_catalog_moduli_satisfy_axioms(name):
    rep = mod.validate_modulus(mod.CATALOG_MODULI[name])
    assert rep.passed, rep.witnesses
    assert rep.grid == GridSpec()


def test_square_is_not_subadditive():
    rep = mod.validate_modulus(Raw(lambda t: t * t, "t^2"))
    assert "ii" in rep.clauses()
    assert {"i", "iii", "iv"}.isdisjoint(rep.clauses())


def test_other_axiom_failures_are_witnessed():
    shifted = mod.validate_modulus(Raw(lambda t: t + 1.0, "t+1"))
    assert "i" in shifted.clauses()
    assert "iv" in shifted.clauses()
    bump = mod.validate_modulus(Raw(lambda t: min(t, 1.0) if t < 2 else 0.5, "bump"))
    assert "iii" in bump.clauses()
    jump = mod.validate_modulus(Raw(lambda t: 0.0 if t == 0 else 1.0 + t, "jump"))
    assert "iv" in jump.clauses()


@given(st.sampled_from(sorted(mod.CATALOG_MODULI)), nonneg, nonneg)
def test_subadditive_and_monotone(name, x, y):
    f = mod.CATALOG_MODULI[name]
    assert f(x + y) <= (f(x) + f(y)) * (1 + 1e-12)
    lo, hi = sorted((x, y))
    assert f(lo) <= f(hi)


def test_algebra_evaluates_pointwise():
    t = np.array([0.0, 0.5, 2.0, 9.0])
    assert np.allclose((ID + RAT)(t), t + t / (1 + t))
    assert np.allclose(Compose(Power(0.5), RAT)(t), np.sqrt(t / (1 + t)))
    assert np.allclose(Iterate(RAT, 2)(t), (t / (1 + t)) / (1 + t / (1 + t)))
    assert (RAT @ Power(0.5)) == Compose(RAT, Power(0.5))
    assert (RAT ** 3) == Iterate(RAT, 3)


def test_exact_arguments():
    assert RAT(Fraction(1, 2)) == Fraction(1, 3)
    assert Iterate(RAT, 2)(Fraction(1)) == Fraction(1, 3)
    v = Power(0.5)(mpmath.mpf(4))
    assert v == 2


def test_domain_and_parameters():
    with pytest.raises(ValueError):
        RAT(-1.0)
    with pytest.raises(ValueError):
        RAT(np.array([1.0, -0.5]))
    with pytest.raises(ValueError):
        Power(1.5)
    with pytest.raises(ValueError):
        Iterate(RAT, 0)


def test_bounded_and_beta_exact():
    assert RAT.bounded() and not ID.bounded()
    assert Compose(ID, RAT).bounded()
    assert not Sum(ID, RAT).bounded()
    assert ID.beta_exact() == 1.0
    assert RAT.beta_exact() == 0.0
    assert Sum(ID, RAT).beta_exact() == 1.0
    assert Iterate(Sum(ID, RAT), 3).beta_exact() == 1.0
    assert Raw(math.sqrt).beta_exact() is None


@pytest.mark.parametrize("name", sorted(mod.CATALOG_MODULI))
def test_sampled_beta_brackets_closed_form(name):
    f = mod.CATALOG_MODULI[name]
    g = mod.beta(f)
    exact = f.beta_exact()
    assert g.beta_estimate >= exact - 1e-12
    if exact > 0:
        assert g.beta_estimate == pytest.approx(exact, rel=1e-6)
        assert not g.near_zero
    else:
        # the sampled infimum only reaches 0 as the sample range grows
        wide = mod.beta(f, mod.default_samples((-6, 60), 10))
        assert wide.beta_estimate <= g.beta_estimate
        assert wide.near_zero


@pytest.mark.parametrize("f", [ID, Sum(ID, RAT), Power(1.0), Sum(Power(0.5), ID), RAT, Power(0.5)])
@pytest.mark.parametrize("n", [1, 2, 3, 5])
def test_iterate_growth(f, n):
    chk = mod.check_iterate_growth(f, n)
    assert chk.violations == 0
    if chk.beta_hat > 0:
        assert chk.worst_ratio >= 1 - 1e-12


def test_iterate_growth_detects_a_false_bound():
    samples = mod.default_samples()
    f = Sum(ID, RAT)
    chk = mod.check_iterate_growth(f, 2, samples)
    # beta_hat = 1 holds; raising it must produce violations
    fn = Iterate(f, 2)(samples)
    assert np.sum(fn < (1.5 * chk.beta_hat) ** 2 * samples) > 0
