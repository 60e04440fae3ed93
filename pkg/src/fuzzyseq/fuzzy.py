"""Fuzzy real numbers stored as piecewise-linear alpha-level functions.

A fuzzy number is kept as a finite grid ``0 = a_0 < ... < a_m = 1`` with the
endpoints of each alpha-cut at the grid points. Between grid points the
endpoints are linear in alpha, so every crisp and triangular number is
represented exactly and supremum metrics reduce to finite maxima.

:class:`FuzzyArray` is the batched counterpart used when whole sequences of
fuzzy numbers are evaluated at once: one shared alpha grid, one row per term.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

#: absolute tolerance for endpoint comparisons (order, equality, validation)
TOL = 1e-12


class InvalidFuzzyNumber(ValueError):
    """Raised when a level list does not describe a fuzzy number."""

    def __init__(self, report: "ValidationReport"):
        self.report = report
        super().__init__("; ".join(str(v) for v in report.violations))


@dataclass(frozen=True)
class AlphaLevel:
    alpha: float
    lower: float
    upper: float


@dataclass(frozen=True)
class Violation:
    clause: str
    message: str
    alpha: float | None = None

    def __str__(self) -> str:
        where = "" if self.alpha is None else f" at alpha={self.alpha!r}"
        return f"({self.clause}) {self.message}{where}"


@dataclass(frozen=True)
class ValidationReport:
    """Outcome of checking a raw level list against the representation rules.

    Clause labels: ``i`` lower endpoint non-decreasing, ``ii`` upper endpoint
    non-increasing, ``iii`` right continuity at 0 (always satisfied by a
    piecewise-linear grid, reported for completeness), ``iv`` lower(1) <=
    upper(1), ``grid`` structural problems (coverage of 0 and 1, alpha range,
    non-finite values, contradictory duplicates).
    """

    violations: tuple[Violation, ...] = ()
    checked_clauses: tuple[str, ...] = ("grid", "i", "ii", "iii", "iv")

    @property
    def valid(self) -> bool:
        return not self.violations

    def clauses(self) -> set[str]:
        return {v.clause for v in self.violations}

    def to_dict(self) -> dict:
        return {
            "valid": self.valid,
            "violations": [
                {"clause": v.clause, "message": v.message, "alpha": v.alpha}
                for v in self.violations
            ],
        }


def _coerce_levels(levels) -> list[tuple[float, float, float]]:
    out = []
    for lev in levels:
        if isinstance(lev, AlphaLevel):
            out.append((lev.alpha, lev.lower, lev.upper))
        elif isinstance(lev, dict):
            out.append((lev["alpha"], lev["lower"], lev["upper"]))
        else:
            a, lo, hi = lev
            out.append((a, lo, hi))
    return [(float(a), float(lo), float(hi)) for a, lo, hi in out]


def _merge_duplicates(raw, violations: list[Violation]):
    """Sort by alpha and collapse duplicate grid values.

    Identical duplicates collapse silently. At alpha=0 the widest interval is
    kept (the support closure). Elsewhere differing duplicates are rejected.
    """
    raw = sorted(raw, key=lambda x: x[0])
    merged: list[tuple[float, float, float]] = []
    for a, lo, hi in raw:
        if merged and merged[-1][0] == a:
            _, plo, phi = merged[-1]
            if (plo, phi) == (lo, hi):
                continue
            if a == 0.0:
                merged[-1] = (a, min(plo, lo), max(phi, hi))
                continue
            violations.append(
                Violation("grid", "contradictory duplicate level", alpha=a)
            )
            continue
        merged.append((a, lo, hi))
    return merged


def validate(levels) -> ValidationReport:
    """Check a raw level list and report every violated clause."""
    violations: list[Violation] = []
    try:
        raw = _coerce_levels(levels)
    except (KeyError, TypeError, ValueError) as exc:
        return ValidationReport((Violation("grid", f"malformed level record: {exc}"),))

    for a, lo, hi in raw:
        if not all(math.isfinite(x) for x in (a, lo, hi)):
            violations.append(Violation("grid", "non-finite value", alpha=a))
        elif not 0.0 <= a <= 1.0:
            violations.append(Violation("grid", "alpha outside [0, 1]", alpha=a))
    if violations:
        return ValidationReport(tuple(violations))

    merged = _merge_duplicates(raw, violations)
    alphas = [a for a, _, _ in merged]
    if 0.0 not in alphas:
        violations.append(Violation("grid", "level alpha=0 missing"))
    if 1.0 not in alphas:
        violations.append(Violation("grid", "level alpha=1 missing"))

    for (a0, l0, u0), (a1, l1, u1) in zip(merged, merged[1:]):
        if l1 < l0 - TOL:
            violations.append(
                Violation("i", f"lower endpoint decreases from {l0!r} to {l1!r}", alpha=a1)
            )
        if u1 > u0 + TOL:
            violations.append(
                Violation("ii", f"upper endpoint increases from {u0!r} to {u1!r}", alpha=a1)
            )
    if merged and merged[-1][0] == 1.0:
        _, l1, u1 = merged[-1]
        if l1 > u1 + TOL:
            violations.append(
                Violation("iv", f"lower(1)={l1!r} exceeds upper(1)={u1!r}", alpha=1.0)
            )
    return ValidationReport(tuple(violations))


def _readonly(x) -> np.ndarray:
    arr = np.array(x, dtype=float)
    arr.setflags(write=False)
    return arr


class FuzzyNumber:
    """Immutable fuzzy real number on a piecewise-linear alpha grid."""

    __slots__ = ("alphas", "lower", "upper")

    def __init__(self, levels):
        report = validate(levels)
        if not report.valid:
            raise InvalidFuzzyNumber(report)
        merged = _merge_duplicates(_coerce_levels(levels), [])
        self._set(
            [a for a, _, _ in merged],
            [lo for _, lo, _ in merged],
            [hi for _, _, hi in merged],
        )

    def _set(self, alphas, lower, upper) -> None:
        object.__setattr__(self, "alphas", _readonly(alphas))
        object.__setattr__(self, "lower", _readonly(lower))
        object.__setattr__(self, "upper", _readonly(upper))

    @classmethod
    def _from_arrays(cls, alphas, lower, upper) -> "FuzzyNumber":
        """Build without revalidating: internal use for arithmetic results."""
        obj = object.__new__(cls)
        obj._set(alphas, lower, upper)
        return obj

    def __setattr__(self, name, value):
        raise AttributeError("FuzzyNumber is immutable")

    @property
    def levels(self) -> tuple[AlphaLevel, ...]:
        return tuple(
            AlphaLevel(float(a), float(lo), float(hi))
            for a, lo, hi in zip(self.alphas, self.lower, self.upper)
        )

    def cut(self, alpha: float) -> tuple[float, float]:
        return alpha_cut(self, alpha)

    def __call__(self, t: float) -> float:
        return membership(self, t)

    def __eq__(self, other) -> bool:
        if not isinstance(other, FuzzyNumber):
            return NotImplemented
        return leq(self, other) is Order.EQUAL

    # equality is tolerant, so no consistent hash exists
    __hash__ = None

    def __repr__(self) -> str:
        if self.is_crisp():
            return f"crisp({float(self.lower[0])!r})"
        if len(self.alphas) == 2 and self.lower[1] == self.upper[1]:
            a, b, c = (float(z) for z in (self.lower[0], self.lower[1], self.upper[0]))
            return f"tri({a!r}, {b!r}, {c!r})"
        rows = [tuple(map(float, r)) for r in zip(self.alphas, self.lower, self.upper)]
        return f"FuzzyNumber({rows})"

    def is_crisp(self) -> bool:
        return bool(np.all(self.lower == self.lower[0]) and np.all(self.upper == self.lower[0]))

    def __add__(self, other):
        if isinstance(other, (int, float)):
            other = make_crisp(other)
        return add(self, other)

    __radd__ = __add__

    def __neg__(self):
        return neg(self)

    def __sub__(self, other):
        if isinstance(other, (int, float)):
            other = make_crisp(other)
        return add(self, neg(other))

    def __mul__(self, other):
        if isinstance(other, (int, float)):
            return scale(self, other)
        return mul(self, other)

    def __rmul__(self, other):
        return self.__mul__(other)

    def __abs__(self):
        return abs_fuzzy(self)


# -- constructors ------------------------------------------------------------

def make_crisp(r: float) -> FuzzyNumber:
    r = float(r)
    if not math.isfinite(r):
        raise ValueError(f"crisp value must be finite, got {r!r}")
    return FuzzyNumber._from_arrays([0.0, 1.0], [r, r], [r, r])


ZERO = make_crisp(0.0)


def make_triangular(a: float, b: float, c: float) -> FuzzyNumber:
    a, b, c = float(a), float(b), float(c)
    if not all(math.isfinite(x) for x in (a, b, c)):
        raise ValueError("triangular parameters must be finite")
    if not a <= b <= c:
        raise ValueError(f"triangular parameters must satisfy a <= b <= c, got {a}, {b}, {c}")
    return FuzzyNumber._from_arrays([0.0, 1.0], [a, b], [c, b])


# -- evaluation --------------------------------------------------------------

def alpha_cut(x: FuzzyNumber, alpha: float) -> tuple[float, float]:
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha!r}")
    lo = float(np.interp(alpha, x.alphas, x.lower))
    hi = float(np.interp(alpha, x.alphas, x.upper))
    return lo, hi


def _crossing_sup(alphas, values, t, increasing: bool) -> float:
    # sup{alpha : values(alpha) <= t} for increasing, >= t for decreasing
    ok = values <= t if increasing else values >= t
    if ok[-1]:
        return 1.0
    j = int(np.argmin(ok))  # first level where the condition fails
    a0, a1 = alphas[j - 1], alphas[j]
    v0, v1 = values[j - 1], values[j]
    return float(a0 + (t - v0) / (v1 - v0) * (a1 - a0))


def membership(x: FuzzyNumber, t: float) -> float:
    """Membership grade ``sup{alpha : lower(alpha) <= t <= upper(alpha)}``."""
    if t < x.lower[0] or t > x.upper[0]:
        return 0.0
    a_lo = _crossing_sup(x.alphas, x.lower, t, increasing=True)
    a_hi = _crossing_sup(x.alphas, x.upper, t, increasing=False)
    return min(a_lo, a_hi)


def merge_grids(*numbers: FuzzyNumber) -> np.ndarray:
    grid = numbers[0].alphas
    for n in numbers[1:]:
        if n.alphas.shape != grid.shape or np.any(n.alphas != grid):
            grid = np.union1d(grid, n.alphas)
    return grid


def on_grid(x: FuzzyNumber, grid: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    if x.alphas.shape == grid.shape and np.all(x.alphas == grid):
        return x.lower, x.upper
    return np.interp(grid, x.alphas, x.lower), np.interp(grid, x.alphas, x.upper)


# -- arithmetic --------------------------------------------------------------

def add(x: FuzzyNumber, y: FuzzyNumber) -> FuzzyNumber:
    grid = merge_grids(x, y)
    xl, xu = on_grid(x, grid)
    yl, yu = on_grid(y, grid)
    return FuzzyNumber._from_arrays(grid, xl + yl, xu + yu)


def neg(x: FuzzyNumber) -> FuzzyNumber:
    return FuzzyNumber._from_arrays(x.alphas, -x.upper, -x.lower)


def scale(x: FuzzyNumber, c: float) -> FuzzyNumber:
    c = float(c)
    if c >= 0:
        return FuzzyNumber._from_arrays(x.alphas, c * x.lower, c * x.upper)
    return FuzzyNumber._from_arrays(x.alphas, c * x.upper, c * x.lower)


def _interval_mul(xl, xu, yl, yu):
    p = np.stack([xl * yl, xl * yu, xu * yl, xu * yu])
    return p.min(axis=0), p.max(axis=0)


def mul(x: FuzzyNumber, y: FuzzyNumber) -> FuzzyNumber:
    """Level-wise interval product on the merged grid.

    Endpoints are exact at the grid levels; in between the true product cut
    is piecewise quadratic and is approximated linearly. The alpha=0 level,
    and hence ``metric_d(x * y, ZERO)``, is exact.
    """
    grid = merge_grids(x, y)
    lo, hi = _interval_mul(*on_grid(x, grid), *on_grid(y, grid))
    return FuzzyNumber._from_arrays(grid, lo, hi)


def _segment_roots(alphas, *fns) -> np.ndarray:
    """Alpha values strictly inside grid segments where any fn changes sign."""
    roots = []
    for f in fns:
        f0, f1 = f[:-1], f[1:]
        mask = (f0 * f1) < 0
        if np.any(mask):
            a0, a1 = alphas[:-1][mask], alphas[1:][mask]
            roots.append(a0 + f0[mask] / (f0[mask] - f1[mask]) * (a1 - a0))
    if not roots:
        return alphas
    return np.union1d(alphas, np.concatenate(roots))


def abs_fuzzy(x: FuzzyNumber) -> FuzzyNumber:
    """Absolute value ``|X|(t) = max(X(t), X(-t))`` for t >= 0, 0 below.

    Per level the cut of ``|X|`` is ``[max(0, lo, -hi), max(|lo|, |hi|)]``.
    Kinks of these expressions (sign changes of lo, hi and lo + hi) are
    inserted into the grid so the piecewise-linear result is exact.
    """
    grid = _segment_roots(x.alphas, x.lower, x.upper, x.lower + x.upper)
    lo, hi = on_grid(x, grid)
    new_lo = np.maximum(0.0, np.maximum(lo, -hi))
    new_hi = np.maximum(np.abs(lo), np.abs(hi))
    return FuzzyNumber._from_arrays(grid, new_lo, new_hi)


# -- metric and order --------------------------------------------------------

def metric_d(x: FuzzyNumber, y: FuzzyNumber) -> float:
    """Supremum over alpha of the larger endpoint deviation.

    Endpoint differences are linear between merged breakpoints, so the
    supremum is attained on the merged grid.
    """
    grid = merge_grids(x, y)
    xl, xu = on_grid(x, grid)
    yl, yu = on_grid(y, grid)
    return float(max(np.max(np.abs(xl - yl)), np.max(np.abs(xu - yu))))


def norm(x: FuzzyNumber) -> float:
    """``metric_d(x, ZERO)``: the alpha=0 level dominates by monotonicity."""
    return float(max(abs(x.lower[0]), abs(x.upper[0])))


class Order(enum.Enum):
    LESS_OR_EQUAL = "LessOrEqual"
    GREATER_OR_EQUAL = "GreaterOrEqual"
    EQUAL = "Equal"
    INCOMPARABLE = "Incomparable"


def leq(x: FuzzyNumber, y: FuzzyNumber, tol: float = TOL) -> Order:
    grid = merge_grids(x, y)
    xl, xu = on_grid(x, grid)
    yl, yu = on_grid(y, grid)
    le = bool(np.all(xl <= yl + tol) and np.all(xu <= yu + tol))
    ge = bool(np.all(xl >= yl - tol) and np.all(xu >= yu - tol))
    if le and ge:
        return Order.EQUAL
    if le:
        return Order.LESS_OR_EQUAL
    if ge:
        return Order.GREATER_OR_EQUAL
    return Order.INCOMPARABLE


# -- batched sequences -------------------------------------------------------

@dataclass(frozen=True)
class FuzzyArray:
    """A block of fuzzy numbers sharing one alpha grid.

    ``lower`` and ``upper`` have shape ``(n, len(alphas))``.
    """

    alphas: np.ndarray
    lower: np.ndarray
    upper: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.lower.shape != self.upper.shape or self.lower.shape[1] != len(self.alphas):
            raise ValueError("inconsistent FuzzyArray shapes")

    def __len__(self) -> int:
        return self.lower.shape[0]

    def __getitem__(self, i: int) -> FuzzyNumber:
        return FuzzyNumber._from_arrays(self.alphas, self.lower[i], self.upper[i])

    @classmethod
    def crisp(cls, r) -> "FuzzyArray":
        r = np.asarray(r, dtype=float)
        col = r[:, None]
        both = np.hstack([col, col])
        return cls(np.array([0.0, 1.0]), both, both.copy())

    @classmethod
    def triangular(cls, a, b, c) -> "FuzzyArray":
        a, b, c = (np.asarray(z, dtype=float) for z in np.broadcast_arrays(a, b, c))
        if np.any(a > b) or np.any(b > c):
            bad = int(np.argmax((a > b) | (b > c)))
            raise ValueError(
                f"triangular parameters must satisfy a <= b <= c (row {bad}: "
                f"{a[bad]!r}, {b[bad]!r}, {c[bad]!r})"
            )
        return cls(
            np.array([0.0, 1.0]),
            np.stack([a, b], axis=1),
            np.stack([c, b], axis=1),
        )

    @classmethod
    def from_numbers(cls, numbers: Sequence[FuzzyNumber]) -> "FuzzyArray":
        grid = merge_grids(*numbers)
        lo = np.empty((len(numbers), len(grid)))
        hi = np.empty_like(lo)
        for i, x in enumerate(numbers):
            lo[i], hi[i] = on_grid(x, grid)
        return cls(grid, lo, hi)

    def regrid(self, grid: np.ndarray) -> "FuzzyArray":
        if self.alphas.shape == grid.shape and np.all(self.alphas == grid):
            return self
        interp = _interp_rows(grid, self.alphas)
        return FuzzyArray(grid, self.lower @ interp, self.upper @ interp)

    def _aligned(self, other: "FuzzyArray"):
        grid = self.alphas
        if other.alphas.shape != grid.shape or np.any(other.alphas != grid):
            grid = np.union1d(grid, other.alphas)
        return self.regrid(grid), other.regrid(grid), grid

    def __add__(self, other: "FuzzyArray") -> "FuzzyArray":
        a, b, grid = self._aligned(other)
        return FuzzyArray(grid, a.lower + b.lower, a.upper + b.upper)

    def __neg__(self) -> "FuzzyArray":
        return FuzzyArray(self.alphas, -self.upper, -self.lower)

    def scale(self, c) -> "FuzzyArray":
        c = np.broadcast_to(np.asarray(c, dtype=float), (len(self),))[:, None]
        lo, hi = c * self.lower, c * self.upper
        neg_mask = np.broadcast_to(c < 0, lo.shape)
        return FuzzyArray(
            self.alphas, np.where(neg_mask, hi, lo), np.where(neg_mask, lo, hi)
        )

    def __mul__(self, other: "FuzzyArray") -> "FuzzyArray":
        a, b, grid = self._aligned(other)
        lo, hi = _interval_mul(a.lower, a.upper, b.lower, b.upper)
        return FuzzyArray(grid, lo, hi)

    def select(self, mask, other: "FuzzyArray") -> "FuzzyArray":
        """Rows of ``self`` where ``mask`` holds, rows of ``other`` elsewhere."""
        a, b, grid = self._aligned(other)
        m = np.asarray(mask, dtype=bool)[:, None]
        return FuzzyArray(grid, np.where(m, a.lower, b.lower), np.where(m, a.upper, b.upper))

    def norms(self) -> np.ndarray:
        """Row-wise distance to the crisp zero."""
        return np.maximum(np.abs(self.lower[:, 0]), np.abs(self.upper[:, 0]))

    def distances(self, other: "FuzzyArray") -> np.ndarray:
        """Row-wise ``metric_d``; ``other`` may hold a single row (broadcast)."""
        a, b, _ = self._aligned(other)
        return np.maximum(
            np.max(np.abs(a.lower - b.lower), axis=1),
            np.max(np.abs(a.upper - b.upper), axis=1),
        )


def _interp_rows(new_grid: np.ndarray, old_grid: np.ndarray) -> np.ndarray:
    """Matrix ``W`` with ``values_on_old @ W == values interpolated on new``."""
    w = np.zeros((len(old_grid), len(new_grid)))
    idx = np.clip(np.searchsorted(old_grid, new_grid, side="right") - 1, 0, len(old_grid) - 2)
    a0, a1 = old_grid[idx], old_grid[idx + 1]
    frac = (new_grid - a0) / (a1 - a0)
    cols = np.arange(len(new_grid))
    w[idx, cols] = 1.0 - frac
    w[idx + 1, cols] += frac
    return w


# -- serialization -----------------------------------------------------------

def to_records(x: FuzzyNumber) -> list[dict]:
    return [
        {"alpha": float(a), "lower": float(lo), "upper": float(hi)}
        for a, lo, hi in zip(x.alphas, x.lower, x.upper)
    ]


def dumps(x: FuzzyNumber) -> str:
    return json.dumps(to_records(x), indent=2)


def parse_shorthand(text: str) -> FuzzyNumber:
    """Accept ``crisp r`` and ``tri a b c`` (numbers may be fractions ``p/q``)."""
    from fractions import Fraction

    parts = text.split()
    if not parts:
        raise ValueError("empty fuzzy-number shorthand")
    try:
        nums = [float(Fraction(p)) for p in parts[1:]]
    except ValueError as exc:
        raise ValueError(f"bad number in shorthand {text!r}") from exc
    if parts[0] == "crisp" and len(nums) == 1:
        return make_crisp(nums[0])
    if parts[0] == "tri" and len(nums) == 3:
        return make_triangular(*nums)
    raise ValueError(f"unrecognised fuzzy-number shorthand {text!r}")


def from_document(doc) -> FuzzyNumber:
    """Build from a decoded document: record list, ``{"levels": [...]}`` or shorthand."""
    if isinstance(doc, str):
        return parse_shorthand(doc)
    if isinstance(doc, dict) and "levels" in doc:
        doc = doc["levels"]
    return FuzzyNumber(doc)


def loads(text: str) -> FuzzyNumber:
    text = text.strip()
    if text.startswith("[") or text.startswith("{") or text.startswith('"'):
        return from_document(json.loads(text))
    return parse_shorthand(text)


def as_fuzzy(x) -> FuzzyNumber:
    if isinstance(x, FuzzyNumber):
        return x
    if isinstance(x, (int, float)):
        return make_crisp(x)
    if isinstance(x, str):
        return parse_shorthand(x)
    if isinstance(x, Iterable):
        return FuzzyNumber(x)
    raise TypeError(f"cannot interpret {x!r} as a fuzzy number")
