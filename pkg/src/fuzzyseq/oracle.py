"""Reference values recomputed outside the float pipeline.

Every term is evaluated with the exact DSL evaluator (rational arithmetic),
distances are exact maxima over the rational alpha grid, and prefix sums are
accumulated as :class:`~fractions.Fraction`. When rational denominators grow
past ``MAX_DENOMINATOR_DIGITS`` the accumulator switches to 60-digit mpmath
numbers so long alternating harmonic sums stay cheap. Modulus and exponent
are applied in mpmath.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import mpmath

from . import dsl
from .modulus import ModulusFn

MAX_DENOMINATOR_DIGITS = 200
WIDE_DPS = 60


@dataclass(frozen=True)
class OracleSeries:
    start: int
    t: tuple  # Fraction or mpf per index
    exact: bool  # False once the accumulator went to mpmath

    def at(self, k: int):
        return self.t[k - self.start]

    def floats(self) -> list[float]:
        return [float(x) for x in self.t]


def _exact_distance(x: dsl.ExactFuzzy, base) -> Fraction:
    if base is None:
        return x.norm()
    return x.distance(base)


def _as_mp(x):
    if isinstance(x, Fraction):
        return mpmath.mpf(x.numerator) / x.denominator
    return mpmath.mpf(x)


@lru_cache(maxsize=128)
def _exact_values(node: dsl.Node, start: int, horizon: int, params: tuple) -> tuple:
    p = dict(params)
    with mpmath.workdps(dsl.EXACT_DPS):  # fixed precision, whatever the caller's context
        return tuple(dsl.eval_exact(node, k, p) for k in range(start, horizon + 1))


def exact_values(node: dsl.Node, start: int, horizon: int, params=None) -> tuple:
    """Exact values of a scalar node for ``k = start .. horizon`` (memoised)."""
    return _exact_values(node, start, horizon, tuple(sorted((params or {}).items())))


def transform_exact(
    seq: dsl.Node, u: dsl.Node, v: dsl.Node, start: int, horizon: int, base=None, params=None
) -> OracleSeries:
    """``|u_k * sum_{i<=k} v_i d(X_i, base)|`` by direct summation.

    ``base`` is ``None`` (crisp zero), a fuzzy :class:`dsl.Node` evaluated per
    index (paired distances) or an :class:`dsl.ExactFuzzy` constant.
    """
    params = params or {}
    acc = Fraction(0)
    exact = True
    out = []
    us = exact_values(u, start, horizon, params)
    vs = exact_values(v, start, horizon, params)
    with mpmath.workdps(WIDE_DPS):
        for k in range(start, horizon + 1):
            x = dsl.eval_exact(seq, k, params)
            b = dsl.eval_exact(base, k, params) if isinstance(base, dsl.Node) else base
            term = vs[k - start] * _exact_distance(x, b)
            if exact and isinstance(term, Fraction):
                acc += term
                if len(str(acc.denominator)) > MAX_DENOMINATOR_DIGITS:
                    acc, exact = _as_mp(acc), False
            else:
                acc, exact = _as_mp(acc) + _as_mp(term), False
            uk = us[k - start]
            if uk == 0:
                raise ZeroDivisionError(f"u_k vanishes at k={k}")
            val = uk * acc if exact and isinstance(uk, Fraction) else _as_mp(uk) * _as_mp(acc)
            if not isinstance(val, Fraction):
                exact = False
            out.append(abs(val))
    return OracleSeries(start, tuple(out), exact)


def scalar_series_exact(t: OracleSeries, f: ModulusFn, r: dsl.Node, params=None) -> list:
    """``f(t_k) ** r_k`` in 60-digit arithmetic."""
    params = params or {}
    out = []
    with mpmath.workdps(WIDE_DPS):
        for j, tk in enumerate(t.t):
            k = t.start + j
            rk = dsl.eval_exact(r, k, params)
            ft = f(_as_mp(tk))
            out.append(ft if rk == 1 else ft ** _as_mp(rk))
    return out


def partial_sums_exact(values) -> list:
    out, acc = [], Fraction(0)
    with mpmath.workdps(WIDE_DPS):
        for x in values:
            acc = acc + x if isinstance(acc, Fraction) and isinstance(x, Fraction) else _as_mp(acc) + _as_mp(x)
            out.append(acc)
    return out


def max_relative_error(pipeline, reference) -> tuple[float, int]:
    """Largest ``|a - b| / |b|`` (absolute error where the reference is 0)."""
    worst, at = 0.0, -1
    with mpmath.workdps(WIDE_DPS):
        for j, (a, b) in enumerate(zip(pipeline, reference)):
            if isinstance(b, (int, Fraction)):
                # exact in integers: a = an/ad, b = p/q; int / int rounds correctly
                an, ad = float(a).as_integer_ratio()
                p, q = b.numerator, b.denominator
                num = abs(an * q - p * ad)
                rel = num / abs(p * ad) if p else num / (q * ad)
            else:
                bm = _as_mp(b)
                err = abs(mpmath.mpf(float(a)) - bm)
                rel = float(err / abs(bm)) if bm != 0 else float(err)
            if rel > worst:
                worst, at = rel, j
    return worst, at
