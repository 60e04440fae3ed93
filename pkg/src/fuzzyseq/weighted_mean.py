"""The generalized weighted mean (factorable matrix) applied to distance sequences.

The lower-triangular matrix has entries ``g[n, k] = u_n * v_k`` for ``k <= n``.
Applied to the distances ``d(X_i, B)`` of a fuzzy sequence from a base point
it yields the transform values::

    t_k = | u_k * sum_{i=start}^{k} v_i * d(X_i, B) |

computed with a single left-to-right prefix sum.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Callable, Protocol

import numpy as np

from . import dsl
from .fuzzy import ZERO, FuzzyArray, FuzzyNumber, as_fuzzy

#: indices are evaluated in blocks of this size when sequences are streamed
CHUNK = 1 << 20


class GeneratorError(RuntimeError):
    def __init__(self, message: str, k: int | None = None):
        self.k = k
        super().__init__(message if k is None else f"{message} (index k={k})")


# -- scalar generators -------------------------------------------------------

class ScalarGenerator(Protocol):
    def values(self, ks: np.ndarray) -> np.ndarray: ...


@dataclass(frozen=True)
class ExprGenerator:
    expr: dsl.Node
    params: tuple = ()

    def values(self, ks):
        try:
            return dsl.eval_array(self.expr, ks, dict(self.params))
        except dsl.DslEvalError as exc:
            raise GeneratorError(str(exc), exc.k) from exc

    def exact(self, k: int):
        return dsl.eval_exact(self.expr, k, dict(self.params))

    def quotient(self, ks):
        """``(c, d_k)`` when the expression is ``c / d``, else ``None``.

        Lets ``u_k * S`` be computed as ``c * S / d_k``, one rounding instead
        of two, so ``(1/k) * k`` comes out as exactly 1.
        """
        e = self.expr
        if isinstance(e, dsl.BinOp) and e.op == "/" and isinstance(e.left, dsl.Num):
            try:
                d = dsl.eval_array(e.right, ks, dict(self.params))
            except dsl.DslEvalError as exc:
                raise GeneratorError(str(exc), exc.k) from exc
            return float(e.left.value), np.asarray(d, dtype=float) * np.ones(len(ks))
        return None

    def __str__(self):
        return dsl.to_text(self.expr)


@dataclass(frozen=True)
class CallableGenerator:
    fn: Callable[[int], float]
    name: str = "<callable>"

    def values(self, ks):
        out = np.empty(len(ks))
        for j, k in enumerate(ks):
            try:
                out[j] = self.fn(int(k))
            except Exception as exc:  # noqa: BLE001 - report any generator failure with its index
                raise GeneratorError(f"generator {self.name} failed: {exc}", int(k)) from exc
        return out

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class ArrayGenerator:
    """Finitely many stored values, the first at index ``start``."""

    data: np.ndarray = field(repr=False)
    start: int = 1

    def values(self, ks):
        idx = np.asarray(ks) - self.start
        if idx.size and (idx.min() < 0 or idx.max() >= len(self.data)):
            bad = int(np.asarray(ks)[np.argmax((idx < 0) | (idx >= len(self.data)))])
            raise GeneratorError("index outside the stored values", bad)
        return np.asarray(self.data, dtype=float)[idx]

    def __str__(self):
        return f"<{len(self.data)} stored values>"


def as_generator(g, params=()) -> ScalarGenerator:
    if hasattr(g, "values"):
        return g
    if isinstance(g, (int, float)):
        g = str(g) if float(g) == int(g) else repr(float(g))
    if isinstance(g, str):
        return ExprGenerator(dsl.parse_scalar(g, tuple(dict(params))), tuple(dict(params).items()))
    if callable(g):
        return CallableGenerator(g, getattr(g, "__name__", "<callable>"))
    raise TypeError(f"cannot use {g!r} as a scalar generator")


# -- fuzzy sequences ---------------------------------------------------------

class FuzzySequence(Protocol):
    def batch(self, ks: np.ndarray) -> FuzzyArray: ...


@dataclass(frozen=True)
class ExprSequence:
    expr: dsl.Node
    params: tuple = ()

    def batch(self, ks):
        try:
            return dsl.eval_array(self.expr, ks, dict(self.params))
        except dsl.DslEvalError as exc:
            raise GeneratorError(str(exc), exc.k) from exc

    def exact(self, k: int):
        return dsl.eval_exact(self.expr, k, dict(self.params))

    def __str__(self):
        return dsl.to_text(self.expr)


@dataclass(frozen=True)
class FunctionSequence:
    fn: Callable[[int], FuzzyNumber]
    name: str = "<callable>"

    def batch(self, ks):
        items = []
        for k in ks:
            try:
                items.append(as_fuzzy(self.fn(int(k))))
            except Exception as exc:  # noqa: BLE001
                raise GeneratorError(f"sequence {self.name} failed: {exc}", int(k)) from exc
        return FuzzyArray.from_numbers(items)

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class ArraySequence:
    """Finite sequence stored as a :class:`FuzzyArray`, first term at ``start``."""

    data: FuzzyArray
    start: int = 1

    def batch(self, ks):
        idx = np.asarray(ks) - self.start
        if idx.size and (idx.min() < 0 or idx.max() >= len(self.data)):
            bad = int(ks[np.argmax((idx < 0) | (idx >= len(self.data)))])
            raise GeneratorError("index outside the stored sequence", bad)
        return FuzzyArray(self.data.alphas, self.data.lower[idx], self.data.upper[idx])

    def __str__(self):
        return f"<array of {len(self.data)} terms from k={self.start}>"


@dataclass(frozen=True)
class ConstantSequence:
    value: FuzzyNumber

    def batch(self, ks):
        n = len(ks)
        lo = np.broadcast_to(self.value.lower, (n, len(self.value.alphas)))
        hi = np.broadcast_to(self.value.upper, (n, len(self.value.alphas)))
        return FuzzyArray(self.value.alphas, lo, hi)

    def __str__(self):
        return repr(self.value)


def as_sequence(seq, params=()) -> FuzzySequence:
    if hasattr(seq, "batch"):
        return seq
    if isinstance(seq, FuzzyNumber):
        return ConstantSequence(seq)
    if isinstance(seq, str):
        return ExprSequence(dsl.parse_fuzzy(seq, tuple(dict(params))), tuple(dict(params).items()))
    if isinstance(seq, FuzzyArray):
        return ArraySequence(seq)
    if callable(seq):
        return FunctionSequence(seq, getattr(seq, "__name__", "<callable>"))
    raise TypeError(f"cannot use {seq!r} as a fuzzy sequence")


def distances(seq, ks, base=None) -> np.ndarray:
    """``d(X_k, base)`` for every index; base ``None`` means the crisp zero,
    a fuzzy number is a fixed base, a sequence gives pairwise distances."""
    block = as_sequence(seq).batch(ks)
    if base is None:
        return block.norms()
    if isinstance(base, FuzzyNumber):
        return block.distances(FuzzyArray.from_numbers([base]))
    return block.distances(as_sequence(base).batch(ks))


# -- schemes and transforms --------------------------------------------------

@dataclass(frozen=True)
class WeightScheme:
    """Paired generators ``u`` and ``v``; terms start at ``start``."""

    u: ScalarGenerator
    v: ScalarGenerator
    start: int = 1
    description: str = ""

    @classmethod
    def of(cls, u, v, start: int = 1, description: str = "", params=()) -> "WeightScheme":
        u, v = as_generator(u, params), as_generator(v, params)
        return cls(u, v, start, description or f"u = {u}, v = {v}")

    def weights(self, ks: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        u = np.asarray(self.u.values(ks), dtype=float)
        if np.any(u == 0):
            raise GeneratorError("u_k must be non-zero", int(ks[np.argmax(u == 0)]))
        return u, np.asarray(self.v.values(ks), dtype=float)


def cesaro(start: int = 1) -> WeightScheme:
    return WeightScheme.of("1/k", "1", start, "Cesaro mean")


def matrix_entry(scheme: WeightScheme, n: int, k: int) -> float:
    if n < 0 or k < 0:
        raise ValueError("matrix indices must be non-negative")
    if k > n:
        return 0.0
    ks = np.array([n, k])
    u = scheme.u.values(ks[:1])[0]
    v = scheme.v.values(ks[1:])[0]
    return float(u * v)


def prefix_transform(dist: np.ndarray, u, v: np.ndarray, carry: float = 0.0):
    """Return ``(S, t)`` with ``S_k = carry + sum v_i d_i`` and ``t_k = |u_k S_k|``.

    ``u`` is an array or a ``(c, d)`` pair meaning ``u_k = c / d_k``. The
    prefix sum is strictly sequential, and restarting from ``carry`` gives
    bit-identical results to one long sum.
    """
    terms = np.concatenate(([carry], v * dist))
    s = np.cumsum(terms)[1:]
    if isinstance(u, tuple):
        c, d = u
        return s, np.abs((s if c == 1 else c * s) / d)
    return s, np.abs(u * s)


def _outer_weights(scheme: "WeightScheme", ks):
    u, v = scheme.weights(ks)
    q = getattr(scheme.u, "quotient", None)
    pair = q(ks) if q is not None else None
    return (pair if pair is not None else u), v


@dataclass(frozen=True)
class TransformSeries:
    """Transform values ``t_start .. t_horizon`` of one sequence under a scheme."""

    start: int
    t: np.ndarray = field(repr=False)
    prefix: np.ndarray = field(repr=False)
    base_kind: str
    source: tuple = field(repr=False, compare=False, default=())

    @property
    def horizon(self) -> int:
        return self.start + len(self.t) - 1

    @property
    def k(self) -> np.ndarray:
        return np.arange(self.start, self.horizon + 1)

    def at(self, k: int) -> float:
        if not self.start <= k <= self.horizon:
            raise IndexError(f"k={k} outside [{self.start}, {self.horizon}]")
        return float(self.t[k - self.start])

    def extend(self, horizon: int) -> "TransformSeries":
        """Continue the prefix sum up to ``horizon``; earlier values are unchanged."""
        if horizon <= self.horizon:
            return self
        seq, scheme, base = self.source
        ks = np.arange(self.horizon + 1, horizon + 1)
        s, t = _transform_block(seq, scheme, base, ks, float(self.prefix[-1]))
        return TransformSeries(
            self.start,
            _frozen(np.concatenate([self.t, t])),
            _frozen(np.concatenate([self.prefix, s])),
            self.base_kind,
            self.source,
        )

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["k", "t_k"])
        for k, t in zip(self.k, self.t):
            w.writerow([int(k), f"{t:.17g}"])
        return buf.getvalue()


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


def _transform_block(seq, scheme, base, ks, carry):
    parts_s, parts_t = [], []
    for lo in range(0, len(ks), CHUNK):
        block = ks[lo : lo + CHUNK]
        u, v = _outer_weights(scheme, block)
        s, t = prefix_transform(distances(seq, block, base), u, v, carry)
        carry = float(s[-1])
        parts_s.append(s)
        parts_t.append(t)
    return np.concatenate(parts_s), np.concatenate(parts_t)


def _base_kind(base) -> str:
    if base is None:
        return "Zero"
    if isinstance(base, FuzzyNumber):
        return "Zero" if base == ZERO else "FixedBase"
    return "PairedSequence"


def transform(seq, scheme: WeightScheme, horizon: int, base=None) -> TransformSeries:
    """Transform values about ``base`` (default: the crisp zero)."""
    if horizon < scheme.start:
        raise ValueError(f"horizon {horizon} precedes the start index {scheme.start}")
    seq = as_sequence(seq)
    if base is not None and not isinstance(base, FuzzyNumber):
        base = as_sequence(base)
    ks = np.arange(scheme.start, horizon + 1)
    s, t = _transform_block(seq, scheme, base, ks, 0.0)
    return TransformSeries(
        scheme.start, _frozen(t), _frozen(s), _base_kind(base), (seq, scheme, base)
    )


def transform_about(seq, base: FuzzyNumber, scheme: WeightScheme, horizon: int) -> TransformSeries:
    return transform(seq, scheme, horizon, base=as_fuzzy(base))


def transform_pair(x, y, scheme: WeightScheme, horizon: int) -> TransformSeries:
    """Transform of the termwise distances ``d(X_i, Y_i)``."""
    return transform(x, scheme, horizon, base=as_sequence(y))


def iter_transform(seq, scheme: WeightScheme, horizon: int, base=None, chunk: int = CHUNK):
    """Yield ``(ks, t)`` blocks without keeping the whole series in memory."""
    seq = as_sequence(seq)
    if base is not None and not isinstance(base, FuzzyNumber):
        base = as_sequence(base)
    carry = 0.0
    for lo in range(scheme.start, horizon + 1, chunk):
        ks = np.arange(lo, min(lo + chunk, horizon + 1))
        u, v = _outer_weights(scheme, ks)
        s, t = prefix_transform(distances(seq, ks, base), u, v, carry)
        carry = float(s[-1])
        yield ks, t
