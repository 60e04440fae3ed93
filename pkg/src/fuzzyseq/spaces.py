"""Scalar series, the metrics D and D_p, and finite-horizon membership diagnostics.

For a fuzzy sequence X the scalar series is ``s_k = f(t_k) ** r_k`` where
``t_k`` comes from :func:`fuzzyseq.weighted_mean.transform`. Membership of X
in the fuzzy space built over ``l_p``, ``c_0``, ``c`` or ``l_inf`` is membership
of ``s`` in that classical space. Over a finite horizon this cannot be
decided, so :func:`diagnose` returns a horizon-stamped verdict that is
*consistent* or *inconsistent* with membership, together with the numbers it
was based on.
"""

from __future__ import annotations

import csv
import io
import math
import re
from dataclasses import dataclass, field

import numpy as np

from . import weighted_mean as wm
from .modulus import ID, ModulusFn


# -- exponents ---------------------------------------------------------------

@dataclass(frozen=True)
class ExponentSeq:
    """Strictly positive exponents ``r_k`` with constants over a horizon.

    ``H`` is the sup of ``r_k`` over the evaluated range, ``M = max(1, H)``
    and ``C_H = max(1, 2**(H - 1))`` the constant in
    ``|a + b|**r_k <= C_H (|a|**r_k + |b|**r_k)``.
    """

    r: wm.ScalarGenerator
    start: int
    horizon: int
    values: np.ndarray = field(repr=False)

    @classmethod
    def over(cls, r, start: int, horizon: int, params=()) -> "ExponentSeq":
        gen = wm.as_generator(r, params)
        vals = np.asarray(gen.values(np.arange(start, horizon + 1)), dtype=float)
        if np.any(~(vals > 0)) or not np.all(np.isfinite(vals)):
            bad = int(np.argmax(~(vals > 0) | ~np.isfinite(vals)))
            raise ValueError(f"exponent r_k must be finite and > 0, got {vals[bad]!r} at k={start + bad}")
        vals.setflags(write=False)
        return cls(gen, start, horizon, vals)

    @property
    def H(self) -> float:
        return float(np.max(self.values))

    @property
    def M(self) -> float:
        return max(1.0, self.H)

    @property
    def C_H(self) -> float:
        return max(1.0, 2.0 ** (self.H - 1.0))

    def block(self, ks: np.ndarray) -> np.ndarray:
        """Exponents at arbitrary indices (re-evaluated beyond the cached range)."""
        if ks[0] >= self.start and ks[-1] <= self.horizon:
            return self.values[ks - self.start]
        return np.asarray(self.r.values(ks), dtype=float)


def constant_exponents(value: float, start: int, horizon: int) -> ExponentSeq:
    return ExponentSeq.over(value, start, horizon)


def subadditivity_constant(H: float) -> float:
    return max(1.0, 2.0 ** (H - 1.0))


# -- scalar series -----------------------------------------------------------

def scalar_series(ts: wm.TransformSeries, f: ModulusFn, r: ExponentSeq) -> np.ndarray:
    """``s_k = f(t_k) ** r_k`` elementwise."""
    if r.start != ts.start or r.horizon < ts.horizon:
        raise ValueError("exponent sequence does not cover the transform horizon")
    return _powered(f, ts.t, r.values[: len(ts.t)])


def _powered(f: ModulusFn, t: np.ndarray, r: np.ndarray) -> np.ndarray:
    ft = np.asarray(f(t), dtype=float)
    return np.where(r == 1.0, ft, np.power(ft, r))


# -- metrics -----------------------------------------------------------------

@dataclass(frozen=True)
class MetricValue:
    """A truncated supremum or sum plus what the truncation may hide.

    ``tail`` is the sup over the last quarter of the horizon for D, and the
    partial-sum increment over the last quarter for D_p.
    """

    value: float
    tail: float
    horizon: int
    trajectory: np.ndarray | None = field(default=None, repr=False, compare=False)

    def __float__(self) -> float:
        return self.value


def _tail_start(n: int) -> int:
    return (3 * n) // 4


def _pair_series(x, y, scheme, f, r: ExponentSeq, horizon, exponent_scale=1.0):
    ts = wm.transform_pair(x, y, scheme, horizon)
    return _powered(f, ts.t, r.values[: len(ts.t)] * exponent_scale)


def metric_D(x, y, scheme: wm.WeightScheme, f: ModulusFn, r: ExponentSeq, horizon: int) -> MetricValue:
    """``sup_k f(|u_k sum v_i d(X_i, Y_i)|) ** (r_k / M)`` over the horizon."""
    s = _pair_series(x, y, scheme, f, r, horizon, 1.0 / r.M)
    return MetricValue(float(np.max(s)), float(np.max(s[_tail_start(len(s)):])), horizon)


def metric_Dp(x, y, scheme: wm.WeightScheme, f: ModulusFn, r: ExponentSeq, horizon: int) -> MetricValue:
    """``(sum_k f(|u_k sum v_i d(X_i, Y_i)|) ** r_k) ** (1 / M)`` over the horizon."""
    s = _pair_series(x, y, scheme, f, r, horizon)
    partial = np.cumsum(s)
    tail = float(partial[-1] - partial[_tail_start(len(s)) - 1]) if len(s) > 1 else float(partial[-1])
    return MetricValue(float(partial[-1] ** (1.0 / r.M)), tail, horizon, partial)


# -- spaces and diagnostics --------------------------------------------------

@dataclass(frozen=True)
class Space:
    kind: str  # "lp", "c0", "c", "linf"
    p: float = 1.0

    @classmethod
    def parse(cls, text: str) -> "Space":
        t = text.strip().lower().replace("_", "")
        if t in ("c0", "c", "linf"):
            return cls(t)
        m = re.fullmatch(r"l(?:p)?:?(\d+(?:\.\d+)?)", t)
        if m:
            return cls("lp", float(m.group(1)))
        raise ValueError(f"unknown space {text!r}; use l1, lp:<p>, c0, c or linf")

    def __str__(self):
        if self.kind == "lp":
            p = int(self.p) if self.p == int(self.p) else self.p
            return f"l{p}"
        return self.kind


L1, C0, C, LINF = Space("lp", 1.0), Space("c0"), Space("c"), Space("linf")

CONSISTENT = "ConsistentWithMembership"
INCONSISTENT = "InconsistentWithMembership"


@dataclass(frozen=True)
class Tolerances:
    """Diagnostic thresholds.

    ``tol`` bounds the tail sup (c_0), tail oscillation (c), late growth of
    the running sup (l_inf) and the last-quarter partial-sum increment (l_p).
    ``decay_slope`` is the log-log slope of dyadic-window envelopes below
    which a tail that has not yet dropped under ``tol`` still counts as
    decaying. ``divergence_factor`` marks partial sums as a divergence
    witness once they exceed that multiple of the first partial sum.
    """

    tol: float = 1e-3
    decay_slope: float = -0.1
    divergence_factor: float = 10.0

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError(f"tolerance must be positive, got {self.tol!r}")
        if not self.decay_slope < 0:
            raise ValueError("decay_slope must be negative")
        if not self.divergence_factor > 1:
            raise ValueError("divergence_factor must exceed 1")


DEFAULT_TOL = Tolerances()


@dataclass(frozen=True)
class SpaceVerdict:
    space: str
    verdict: str
    horizon: int
    diagnostics: dict
    note: str = ""

    @property
    def consistent(self) -> bool:
        return self.verdict == CONSISTENT

    def to_dict(self) -> dict:
        return {
            "space": self.space,
            "verdict": self.verdict,
            "horizon": self.horizon,
            "note": self.note,
            "diagnostics": self.diagnostics,
        }


def _windows(n: int, count: int = 4):
    """Index ranges ``[n/2^(j+1), n/2^j)`` for j = count-1 .. 0, oldest first."""
    out = []
    for j in range(count - 1, -1, -1):
        lo, hi = n >> (j + 1), n >> j
        if hi - lo >= 2:
            out.append((lo, hi))
    return out


def _envelope_slope(values: np.ndarray, start: int, stat) -> float:
    """Least-squares slope of ``log stat(window)`` against ``log k``."""
    n = len(values)
    xs, ys = [], []
    for lo, hi in _windows(n):
        v = stat(values[lo:hi])
        if v <= 0:
            return -math.inf
        xs.append(math.log(start + lo))
        ys.append(math.log(v))
    if len(xs) < 2:
        return math.nan
    return float(np.polyfit(xs, ys, 1)[0])


def _osc(w: np.ndarray) -> float:
    return float(np.max(w) - np.min(w))


def diagnose(s, space: Space | str, tolerances: Tolerances = DEFAULT_TOL, start: int = 1) -> SpaceVerdict:
    """Finite-horizon surrogate for membership of ``s`` in ``space``.

    c_0: tail sup below tol, or a decaying dyadic-window sup envelope.
    c: tail oscillation below tol, or a decaying oscillation envelope.
    l_inf: the running sup no longer grows over the last quarter.
    l_p: partial sums of ``s**p`` move less than tol over the last quarter.
    """
    if isinstance(space, str):
        space = Space.parse(space)
    tols = tolerances
    s = np.asarray(s, dtype=float)
    if np.any(s < 0):
        raise ValueError("scalar series must be non-negative")
    n = len(s)
    horizon = start + n - 1
    tail = s[_tail_start(n):]
    diag: dict = {"tail_from": start + _tail_start(n)}

    if space.kind == "c0":
        tail_sup = float(np.max(tail))
        slope = _envelope_slope(s, start, np.max)
        diag.update(tail_sup=tail_sup, tail_min=float(np.min(tail)), envelope_slope=slope)
        if tail_sup < tols.tol:
            ok, note = True, "tail below tolerance"
        elif slope <= tols.decay_slope:
            ok, note = True, "tail above tolerance but decaying"
        else:
            ok, note = False, f"tail plateau near {float(np.median(tail)):.6g}"
    elif space.kind == "c":
        osc = _osc(tail)
        slope = _envelope_slope(s, start, _osc)
        diag.update(
            tail_oscillation=osc,
            tail_min=float(np.min(tail)),
            tail_max=float(np.max(tail)),
            tail_last=float(s[-1]),
            envelope_slope=slope,
        )
        if osc < tols.tol:
            ok, note = True, f"settles near {float(s[-1]):.6g}"
        elif slope <= tols.decay_slope:
            ok, note = True, "oscillation decaying"
        else:
            ok, note = False, f"oscillates over [{float(np.min(tail)):.6g}, {float(np.max(tail)):.6g}]"
    elif space.kind == "linf":
        head = s[: _tail_start(n)] if _tail_start(n) > 0 else s[:1]
        head_sup, full_sup = float(np.max(head)), float(np.max(s))
        growth = full_sup - head_sup
        slope = _envelope_slope(s, start, np.max)
        diag.update(head_sup=head_sup, sup=full_sup, late_growth=growth, envelope_slope=slope)
        if growth <= tols.tol * max(1.0, head_sup):
            ok, note = True, f"running sup stable at {full_sup:.6g}"
        else:
            ok, note = False, "running sup still growing"
    else:
        powered = s if space.p == 1 else np.power(s, space.p)
        partial = np.cumsum(powered)
        t0 = _tail_start(n)
        increment = float(partial[-1] - partial[t0 - 1]) if t0 > 0 else float(partial[-1])
        first = float(partial[0])
        ks = np.arange(start, horizon + 1, dtype=float)
        lo = max(t0, 1)
        log_slope = (
            float((partial[-1] - partial[lo - 1]) / (math.log(ks[-1]) - math.log(ks[lo - 1])))
            if n > 1 and ks[-1] > ks[lo - 1]
            else math.nan
        )
        witness = first > 0 and partial[-1] > tols.divergence_factor * first
        diag.update(
            partial_sum=float(partial[-1]),
            tail_increment=increment,
            slope_vs_log_k=log_slope,
            divergence_witness=bool(witness),
        )
        if increment < tols.tol:
            ok, note = True, "partial sums Cauchy over the last quarter"
        else:
            ok, note = False, "partial sums still growing" + (
                " past the divergence witness" if witness else ""
            )
    return SpaceVerdict(str(space), CONSISTENT if ok else INCONSISTENT, horizon, diag, note)


# -- convenience: sequence -> verdict ------------------------------------------

@dataclass(frozen=True)
class Classification:
    series: wm.TransformSeries
    s: np.ndarray
    verdict: SpaceVerdict

    def to_csv(self) -> str:
        return series_csv(self.series, self.s)


def classify(
    seq,
    scheme: wm.WeightScheme,
    space: Space | str,
    horizon: int,
    f: ModulusFn = ID,
    r: ExponentSeq | None = None,
    base=None,
    strict_c: bool = False,
    tolerances: Tolerances = DEFAULT_TOL,
) -> Classification:
    """Transform, apply the modulus and exponents, diagnose.

    For ``c`` the default reading asks the transform about ``base`` (the crisp
    zero unless given) to converge; ``strict_c`` instead asks it to tend to 0.
    """
    if isinstance(space, str):
        space = Space.parse(space)
    r = r or constant_exponents(1.0, scheme.start, horizon)
    ts = wm.transform(seq, scheme, horizon, base=base if space.kind == "c" else None)
    s = scalar_series(ts, f, r)
    target = C0 if (space.kind == "c" and strict_c) else space
    v = diagnose(s, target, tolerances, start=scheme.start)
    if target is not space:
        v = SpaceVerdict(str(space), v.verdict, v.horizon, v.diagnostics, "strict reading: " + v.note)
    return Classification(ts, s, v)


def series_csv(ts: wm.TransformSeries, s: np.ndarray) -> str:
    """CSV with columns k, t_k, s_k, running sup and partial sum."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["k", "t_k", "s_k", "running_sup", "partial_sum"])
    run = np.maximum.accumulate(s)
    part = np.cumsum(s)
    for row in zip(ts.k, ts.t, s, run, part):
        w.writerow([int(row[0])] + [f"{x:.17g}" for x in row[1:]])
    return buf.getvalue()


def streamed_partial_sums(
    seq, scheme: wm.WeightScheme, horizon: int, checkpoints, f: ModulusFn = ID, r=1.0
) -> dict[int, float]:
    """Partial sums of ``s_k`` at the checkpoints, computed block by block.

    Memory stays bounded by the block size, so horizons of 10^7 and beyond are
    fine. ``r`` is anything accepted by :func:`fuzzyseq.weighted_mean.as_generator`.
    """
    rgen = wm.as_generator(r)
    marks = sorted(set(int(c) for c in checkpoints if scheme.start <= c <= horizon))
    out, acc = {}, 0.0
    for ks, t in wm.iter_transform(seq, scheme, horizon):
        s = _powered(f, t, np.asarray(rgen.values(ks), dtype=float))
        partial = np.cumsum(np.concatenate(([acc], s)))[1:]
        for c in marks:
            if ks[0] <= c <= ks[-1]:
                out[c] = float(partial[c - ks[0]])
        acc = float(partial[-1])
    return out


# -- K-space projections -------------------------------------------------------

@dataclass(frozen=True)
class ProjectionReport:
    indices: tuple[int, ...]
    family_D: tuple[float, ...]
    pointwise: dict  # index -> tuple of d(X^n_i, 0) over n
    D_decreasing: bool
    pointwise_decreasing: bool
    final_max: float

    @property
    def passed(self) -> bool:
        return self.D_decreasing and self.pointwise_decreasing


def projection_check(
    family, ns, indices, scheme: wm.WeightScheme, f: ModulusFn, r: ExponentSeq, horizon: int
) -> ProjectionReport:
    """For ``X^n = family(n)`` with ``D(X^n, 0)`` shrinking, track ``d(X^n_i, 0)``.

    Continuity of the coordinate projections means every fixed coordinate
    must follow the metric to zero.
    """
    from .fuzzy import ZERO

    zero = wm.ConstantSequence(ZERO)
    d_values, point = [], {i: [] for i in indices}
    idx = np.asarray(indices)
    for n in ns:
        xn = wm.as_sequence(family(n))
        d_values.append(metric_D(xn, zero, scheme, f, r, horizon).value)
        norms = xn.batch(idx).norms()
        for i, v in zip(indices, norms):
            point[i].append(float(v))
    dec = all(b <= a for a, b in zip(d_values, d_values[1:]))
    pdec = all(all(b <= a for a, b in zip(vs, vs[1:])) for vs in point.values())
    return ProjectionReport(
        tuple(int(i) for i in indices),
        tuple(d_values),
        {i: tuple(v) for i, v in point.items()},
        dec,
        pdec,
        max(v[-1] for v in point.values()),
    )
