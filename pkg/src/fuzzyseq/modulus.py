"""Modulus functions as a closed expression algebra.

Nodes: :class:`Identity`, :class:`Power`, :class:`Rational` (``t/(1+t)``),
:class:`Sum`, :class:`Compose`, :class:`Iterate`, plus :class:`Raw` for ad-hoc
callables (not serialisable, and axiom checks are the caller's problem).

Every node evaluates on floats, numpy arrays and arbitrary-precision numbers
(``mpmath.mpf``, :class:`fractions.Fraction` where the node allows it).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np


class ModulusFn:
    """Base node. Subclasses implement ``_eval`` and ``__str__``."""

    def __call__(self, t):
        if isinstance(t, np.ndarray):
            if t.size and np.min(t) < 0:
                raise ValueError("modulus functions are defined on [0, inf)")
            return self._eval(t)
        if t < 0:
            raise ValueError(f"modulus functions are defined on [0, inf), got {t!r}")
        return self._eval(t)

    def _eval(self, t):
        raise NotImplementedError

    def beta_exact(self) -> float | None:
        """Closed-form ``lim f(t)/t`` (equal to ``inf f(t)/t`` for concave f)."""
        return None

    def bounded(self) -> bool:
        return False

    def __add__(self, other: "ModulusFn") -> "ModulusFn":
        return Sum(self, other)

    def __matmul__(self, inner: "ModulusFn") -> "ModulusFn":
        # g @ f is g . f
        return Compose(self, inner)

    def __pow__(self, n: int) -> "ModulusFn":
        return Iterate(self, n)


@dataclass(frozen=True, eq=True)
class Identity(ModulusFn):
    def _eval(self, t):
        return t

    def beta_exact(self):
        return 1.0

    def __str__(self):
        return "id"


@dataclass(frozen=True, eq=True)
class Power(ModulusFn):
    p: float

    def __post_init__(self):
        if not 0 < self.p <= 1:
            raise ValueError(f"power modulus needs 0 < p <= 1, got {self.p!r}")

    def _eval(self, t):
        if self.p == 1:
            return t
        if isinstance(t, np.ndarray):
            return np.power(t, self.p)
        return t**self.p

    def beta_exact(self):
        return 1.0 if self.p == 1 else 0.0

    def __str__(self):
        return f"pow {self.p!r}"


@dataclass(frozen=True, eq=True)
class Rational(ModulusFn):
    """The saturating modulus ``t / (1 + t)``; bounded by 1."""

    def _eval(self, t):
        return t / (1 + t)

    def beta_exact(self):
        return 0.0

    def bounded(self):
        return True

    def __str__(self):
        return "rat"


def _wrap(node: ModulusFn, parent_prec: int) -> str:
    text = str(node)
    return f"({text})" if _PREC[type(node)] < parent_prec else text


@dataclass(frozen=True, eq=True)
class Sum(ModulusFn):
    f: ModulusFn
    g: ModulusFn

    def _eval(self, t):
        return self.f._eval(t) + self.g._eval(t)

    def beta_exact(self):
        bf, bg = self.f.beta_exact(), self.g.beta_exact()
        return None if bf is None or bg is None else bf + bg

    def bounded(self):
        return self.f.bounded() and self.g.bounded()

    def __str__(self):
        # '+' is left associative: only the right operand needs protecting
        return f"{_wrap(self.f, 1)} + {_wrap(self.g, 2)}"


@dataclass(frozen=True, eq=True)
class Compose(ModulusFn):
    """``outer . inner``, i.e. ``t -> outer(inner(t))``."""

    outer: ModulusFn
    inner: ModulusFn

    def _eval(self, t):
        return self.outer._eval(self.inner._eval(t))

    def beta_exact(self):
        bo, bi = self.outer.beta_exact(), self.inner.beta_exact()
        if bo is None or bi is None:
            return None
        return bo * bi

    def bounded(self):
        return self.outer.bounded() or self.inner.bounded()

    def __str__(self):
        return f"{_wrap(self.outer, 2)} . {_wrap(self.inner, 3)}"


@dataclass(frozen=True, eq=True)
class Iterate(ModulusFn):
    """``f`` composed with itself ``n`` times."""

    f: ModulusFn
    n: int

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 1:
            raise ValueError(f"iteration count must be a positive integer, got {self.n!r}")

    def _eval(self, t):
        for _ in range(self.n):
            t = self.f._eval(t)
        return t

    def beta_exact(self):
        b = self.f.beta_exact()
        return None if b is None else b**self.n

    def bounded(self):
        return self.f.bounded()

    def __str__(self):
        return f"{_wrap(self.f, 4)}^{self.n}"


@dataclass(frozen=True)
class Raw(ModulusFn):
    fn: Callable = field(compare=False)
    name: str = "raw"

    def _eval(self, t):
        if isinstance(t, np.ndarray):
            return np.vectorize(self.fn, otypes=[float])(t)
        return self.fn(t)

    def __str__(self):
        return f"<{self.name}>"


_PREC = {Sum: 1, Compose: 2, Iterate: 3, Identity: 4, Power: 4, Rational: 4, Raw: 4}

ID = Identity()
RAT = Rational()


def evaluate(f: ModulusFn, t):
    return f(t)


def mod_sum(f: ModulusFn, g: ModulusFn) -> ModulusFn:
    return Sum(f, g)


def compose(g: ModulusFn, f: ModulusFn) -> ModulusFn:
    return Compose(g, f)


def iterate(f: ModulusFn, n: int) -> ModulusFn:
    return Iterate(f, n)


# -- axiom checks ------------------------------------------------------------

@dataclass(frozen=True)
class GridSpec:
    """Sample design for the axiom checks; recorded in every report."""

    t_max: float = 1e3
    t_min: float = 1e-9
    points: int = 10_000
    pairs: int = 10_000
    seed: int = 0

    def grid(self) -> np.ndarray:
        return np.geomspace(self.t_min, self.t_max, self.points)


@dataclass(frozen=True)
class AxiomWitness:
    clause: str
    detail: str


@dataclass(frozen=True)
class ModulusReport:
    modulus: str
    grid: GridSpec
    witnesses: tuple[AxiomWitness, ...]

    @property
    def passed(self) -> bool:
        return not self.witnesses

    def clauses(self) -> set[str]:
        return {w.clause for w in self.witnesses}


# relative slack for floating-point rounding in the sampled inequalities
_RTOL = 1e-12


def validate_modulus(f: ModulusFn, grid: GridSpec | None = None) -> ModulusReport:
    """Sample the four modulus axioms and collect violation witnesses.

    (i) f(0) = 0 and f(t) > 0 for t > 0; (ii) subadditivity on random pairs and
    on the diagonal x = y; (iii) monotonicity along the sorted grid; (iv)
    right continuity at 0 along ``10**-j``.
    """
    grid = grid or GridSpec()
    ts = grid.grid()
    found: list[AxiomWitness] = []

    f0 = float(f(0.0))
    if f0 != 0.0:
        found.append(AxiomWitness("i", f"f(0) = {f0!r}"))
    ft = np.asarray(f(ts), dtype=float)
    zero = np.flatnonzero(ft <= 0)
    if zero.size:
        t, v = float(ts[zero[0]]), float(ft[zero[0]])
        found.append(AxiomWitness("i", f"f({t!r}) = {v!r} for t > 0"))

    rng = np.random.default_rng(grid.seed)
    x = rng.uniform(0, grid.t_max / 2, grid.pairs)
    y = rng.uniform(0, grid.t_max / 2, grid.pairs)
    x = np.concatenate([x, ts / 2, [1.0]])
    y = np.concatenate([y, ts / 2, [1.0]])
    lhs = np.asarray(f(x + y), dtype=float)
    rhs = np.asarray(f(x), dtype=float) + np.asarray(f(y), dtype=float)
    bad = np.flatnonzero(lhs > rhs * (1 + _RTOL))
    if bad.size:
        i = bad[np.argmax(lhs[bad] - rhs[bad])]
        a, b, fl, fr = (float(z) for z in (x[i], y[i], lhs[i], rhs[i]))
        found.append(AxiomWitness("ii", f"f({a!r} + {b!r}) = {fl!r} > f(x) + f(y) = {fr!r}"))

    drops = np.flatnonzero(np.diff(ft) < 0)
    if drops.size:
        i = drops[0]
        t0, t1, v0, v1 = (float(z) for z in (ts[i], ts[i + 1], ft[i], ft[i + 1]))
        found.append(AxiomWitness("iii", f"f({t1!r}) = {v1!r} < f({t0!r}) = {v0!r}"))

    small = 10.0 ** -np.arange(1, 301, dtype=float)
    fs = np.asarray(f(small), dtype=float)
    if not (fs[-1] < 1e-6 * max(1.0, fs[0]) and np.all(np.diff(fs) <= 0)):
        found.append(
            AxiomWitness("iv", f"f(10^-j) does not decrease to 0: f(1e-300) = {float(fs[-1])!r}")
        )
    return ModulusReport(str(f), grid, tuple(found))


# -- growth constant ---------------------------------------------------------

@dataclass(frozen=True)
class GrowthReport:
    """Sampled ``inf f(t)/t``.

    ``sample_min`` is the sample point where the infimum was attained and
    ``limit_tail`` the ratio at the largest sample (the best available proxy
    for ``lim f(t)/t``).
    """

    beta_estimate: float
    sample_min: float
    limit_tail: float
    beta_exact: float | None
    near_zero: bool


def default_samples(decades: tuple[int, int] = (-6, 8), per_decade: int = 50) -> np.ndarray:
    lo, hi = decades
    return np.logspace(lo, hi, (hi - lo) * per_decade + 1)


def beta(f: ModulusFn, samples=None, zero_tol: float = 1e-6) -> GrowthReport:
    ts = default_samples() if samples is None else np.asarray(samples, dtype=float)
    ts = ts[ts > 0]
    ratios = np.asarray(f(ts), dtype=float) / ts
    i = int(np.argmin(ratios))
    est = float(ratios[i])
    return GrowthReport(
        beta_estimate=est,
        sample_min=float(ts[i]),
        limit_tail=float(ratios[np.argmax(ts)]),
        beta_exact=f.beta_exact(),
        near_zero=est < zero_tol,
    )


@dataclass(frozen=True)
class IterateGrowthCheck:
    n: int
    beta_hat: float
    violations: int
    worst_ratio: float


def check_iterate_growth(f: ModulusFn, n: int, samples=None) -> IterateGrowthCheck:
    """Check ``f^n(t) >= beta_hat**n * t`` on the samples.

    ``beta_hat`` is the sampled infimum of ``f(s)/s`` over the samples and
    their orbits ``f(t), ..., f^(n-1)(t)``, which is exactly the set of points
    where the chain ``f^n(t) >= beta_hat * f^(n-1)(t) >= ...`` uses the bound.
    """
    ts = default_samples() if samples is None else np.asarray(samples, dtype=float)
    ts = ts[ts > 0]
    orbit = [ts]
    for _ in range(n - 1):
        orbit.append(np.asarray(f(orbit[-1]), dtype=float))
    pts = np.concatenate(orbit)
    pts = pts[pts > 0]
    beta_hat = float(np.min(np.asarray(f(pts), dtype=float) / pts))
    fn = np.asarray(Iterate(f, n)(ts), dtype=float)
    bound = beta_hat**n * ts
    ratio = fn / bound if beta_hat > 0 else np.full_like(ts, math.inf)
    return IterateGrowthCheck(
        n=n,
        beta_hat=beta_hat,
        violations=int(np.sum(fn < bound * (1 - _RTOL))),
        worst_ratio=float(np.min(ratio)),
    )


#: moduli used throughout the theorem catalog and acceptance checks
CATALOG_MODULI: dict[str, ModulusFn] = {
    "id": ID,
    "pow 0.5": Power(0.5),
    "pow 0.25": Power(0.25),
    "rat": RAT,
    "id + rat": Sum(ID, RAT),
    "pow 0.5 . rat": Compose(Power(0.5), RAT),
    "rat . pow 0.5": Compose(RAT, Power(0.5)),
    "(id + rat)^2": Iterate(Sum(ID, RAT), 2),
    "rat^3": Iterate(RAT, 3),
}
