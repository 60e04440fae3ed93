"""Named, reproducible cases with machine-checkable claims.

Each case lives in ``catalog/<id>.yaml``. Declarative claims in the file are
evaluated generically (see :data:`CLAIM_KINDS`); cases that need randomized
inputs, parameter families or comparisons across moduli add claims from the
builders registered in ``_BUILDERS``. Every sequence given in DSL form is
also recomputed by the exact oracle and compared with the float pipeline.

Reports never claim infinite-horizon membership: verdicts are the
finite-horizon surrogates from :func:`fuzzyseq.spaces.diagnose`.
"""

from __future__ import annotations

import csv
import fnmatch
import io
import json
import math
import os
import tempfile
import time
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields
from fractions import Fraction
from functools import lru_cache
from pathlib import Path

import mpmath
import numpy as np
import yaml

from . import dsl, oracle
from . import modulus as mod
from . import spaces as sp
from . import weighted_mean as wm
from .casefile import CaseSpec, Setting, load_case
from .fuzzy import ZERO, FuzzyArray

CATALOG_DIR = Path(__file__).parent / "catalog"
LIBRARY_FILE = CATALOG_DIR / "_test_sequences.yaml"

#: the exact oracle runs up to this index (or the case horizon if smaller)
ORACLE_HORIZON = 10_000
ORACLE_RTOL = 1e-12
#: rows of series.csv: every k up to this, then log-spaced samples
SERIES_HEAD = 100
SERIES_PER_DECADE = 60


class UnknownCase(KeyError):
    pass


# -- claims and reports --------------------------------------------------------

@dataclass(frozen=True)
class Claim:
    """One checked assertion.

    ``origin`` says where the expected value comes from: ``closed-form`` for
    a stated formula, ``oracle`` for a value recomputed by direct exact
    summation, ``construction`` for values true by construction, ``verdict``
    for finite-horizon diagnostics and ``inequality`` for sampled bounds.
    ``discrepancy`` is set when a stated constant disagrees with the
    recomputed one; the claim then checks the recomputed value.
    """

    name: str
    passed: bool
    measured: object
    expected: object
    tolerance: float | None = None
    origin: str = "oracle"
    note: str = ""
    discrepancy: str = ""


@dataclass
class SeriesBlock:
    setting: str
    sequence: str
    k: np.ndarray
    t: np.ndarray
    s: np.ndarray


@dataclass
class CaseReport:
    id: str
    title: str
    horizon: int
    seed: int
    claims: list[Claim]
    series: list[SeriesBlock] = field(default_factory=list, repr=False)
    metadata: dict = field(default_factory=dict)
    runtime: float = 0.0  # wall clock, kept out of the written files

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.claims)

    @property
    def failures(self) -> list[Claim]:
        return [c for c in self.claims if not c.passed]

    def claim(self, name: str) -> Claim:
        for c in self.claims:
            if c.name == name:
                return c
        raise KeyError(name)

    def claims_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["claim", "status", "measured", "expected", "tolerance", "origin", "note", "discrepancy"])
        for c in self.claims:
            w.writerow([
                c.name,
                "pass" if c.passed else "fail",
                _fmt(c.measured),
                _fmt(c.expected),
                "" if c.tolerance is None else _fmt(c.tolerance),
                c.origin,
                c.note,
                c.discrepancy,
            ])
        return buf.getvalue()

    def series_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["setting", "sequence", "k", "t_k", "s_k", "running_sup", "partial_sum"])
        for b in self.series:
            run = np.maximum.accumulate(b.s)
            part = np.cumsum(b.s)
            for j in _sample_rows(len(b.k)):
                w.writerow([b.setting, b.sequence, int(b.k[j])] + [_fmt(x) for x in (b.t[j], b.s[j], run[j], part[j])])
        return buf.getvalue()

    def summary(self) -> dict:
        return {
            "id": self.id,
            "title": self.title,
            "horizon": self.horizon,
            "seed": self.seed,
            "status": "pass" if self.passed else "fail",
            "claims": len(self.claims),
            "failed": [c.name for c in self.failures],
            "discrepancies": [
                {"claim": c.name, "note": c.discrepancy} for c in self.claims if c.discrepancy
            ],
            **self.metadata,
        }

    def write(self, out_dir) -> Path:
        """Write ``<out>/<id>/{claims.csv, series.csv, summary.json}`` atomically."""
        target = Path(out_dir) / self.id
        target.mkdir(parents=True, exist_ok=True)
        files = {
            "claims.csv": self.claims_csv(),
            "series.csv": self.series_csv(),
            "summary.json": json.dumps(self.summary(), indent=2, sort_keys=True, default=_json_default) + "\n",
        }
        for name, text in files.items():
            fd, tmp = tempfile.mkstemp(dir=target, prefix=f".{name}.")
            with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
            os.replace(tmp, target / name)
        return target


def _fmt(x) -> str:
    if isinstance(x, bool):
        return str(x).lower()
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.17g}"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, (list, tuple)):
        return " ".join(_fmt(v) for v in x)
    return str(x)


def _json_default(x):
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, Fraction):
        return str(x)
    return str(x)


def _sample_rows(n: int) -> list[int]:
    if n <= SERIES_HEAD:
        return list(range(n))
    tail = np.unique(np.round(np.logspace(
        math.log10(SERIES_HEAD + 1), math.log10(n), int(SERIES_PER_DECADE * math.log10(n / SERIES_HEAD)) + 1
    )).astype(int)) - 1
    return sorted(set(range(SERIES_HEAD)) | {int(j) for j in tail if j < n} | {n - 1})


# -- catalog -------------------------------------------------------------------

def catalog_ids() -> list[str]:
    return sorted(p.stem for p in CATALOG_DIR.glob("*.yaml") if not p.name.startswith("_"))


@lru_cache(maxsize=None)
def load_catalog_case(case_id: str) -> CaseSpec:
    path = CATALOG_DIR / f"{case_id}.yaml"
    if case_id.startswith("_") or not path.is_file():
        raise UnknownCase(f"unknown case {case_id!r}; known: {', '.join(catalog_ids())}")
    return load_case(path)


@dataclass(frozen=True)
class LibraryEntry:
    name: str
    u: dsl.Node
    v: dsl.Node
    sequence: dsl.Node

    @property
    def scheme(self) -> wm.WeightScheme:
        return wm.WeightScheme(wm.ExprGenerator(self.u), wm.ExprGenerator(self.v), 1)


@lru_cache(maxsize=None)
def library_sequences() -> tuple[LibraryEntry, ...]:
    """The shared test sequences used by the inclusion-relation cases."""
    raw = yaml.safe_load(LIBRARY_FILE.read_text(encoding="utf-8"))
    return tuple(
        LibraryEntry(
            e["name"],
            dsl.parse_scalar(str(e["scheme"]["u"])),
            dsl.parse_scalar(str(e["scheme"]["v"])),
            dsl.parse_fuzzy(str(e["sequence"])),
        )
        for e in raw
    )


# -- per-run context -----------------------------------------------------------

class Context:
    """Caches transforms and oracle series for one case run."""

    def __init__(self, spec: CaseSpec, seed: int, horizon: int | None = None):
        self.spec = spec
        self.seed = seed
        self.horizon = horizon or spec.horizon
        self.rng = np.random.default_rng([seed, zlib.crc32(spec.id.encode())])
        self._ts: dict = {}
        self._oracle: dict = {}
        self._library: dict = {}

    @property
    def oracle_horizon(self) -> int:
        return min(self.horizon, ORACLE_HORIZON)

    def setting(self, name=None) -> Setting:
        return self.spec.setting(name)

    def series(self, st: Setting, name: str, params=None, base=None) -> wm.TransformSeries:
        key = (st.name, name, _key(params), id(base) if base is not None else None)
        if key not in self._ts:
            self._ts[key] = wm.transform(st.sequence(name, params), st.scheme(params), self.horizon, base=base)
        return self._ts[key]

    def exponents(self, st: Setting) -> sp.ExponentSeq:
        return st.exponent_seq(self.horizon)

    def s(self, st: Setting, name: str, params=None) -> np.ndarray:
        return sp.scalar_series(self.series(st, name, params), st.modulus, self.exponents(st))

    def oracle(self, st: Setting, name: str, params=None) -> oracle.OracleSeries:
        key = (st.name, name, _key(params))
        if key not in self._oracle:
            self._oracle[key] = oracle.transform_exact(
                st.sequences[name], st.u, st.v, st.start, self.oracle_horizon, params=dict(params or {})
            )
        return self._oracle[key]

    def library_t(self, entry: LibraryEntry) -> np.ndarray:
        if entry.name not in self._library:
            self._library[entry.name] = wm.transform(
                wm.ExprSequence(entry.sequence), entry.scheme, self.horizon
            ).t
        return self._library[entry.name]

    def verdict(self, s: np.ndarray, space, start: int = 1) -> sp.SpaceVerdict:
        return sp.diagnose(s, space, start=start)


def _key(params):
    return tuple(sorted((params or {}).items()))


def _names(node) -> set:
    """Free variable names of a DSL node (besides ``k``)."""
    if isinstance(node, dsl.Var):
        return {node.name} - {"k"}
    if not isinstance(node, dsl.Node):
        return set()
    out = set()
    for f in fields(node):
        out |= _names(getattr(node, f.name))
    return out


# -- declarative claims -----------------------------------------------------------

def _where_mask(where: str | None, ks: np.ndarray) -> np.ndarray:
    if where in (None, "all"):
        return np.ones(len(ks), dtype=bool)
    if where == "even":
        return ks % 2 == 0
    if where == "odd":
        return ks % 2 == 1
    raise ValueError(f"unknown index filter {where!r}")


def _label(c: dict, st: Setting, suffix: str) -> str:
    prefix = f"{st.name}." if st.name != "main" else ""
    return f"{prefix}{c['sequence']}.{suffix}"


def _exact_equal(a, b) -> bool:
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return a == b
    with mpmath.workdps(oracle.WIDE_DPS):
        a, b = oracle._as_mp(a), oracle._as_mp(b)
        return abs(a - b) <= mpmath.mpf(10) ** (-45) * max(abs(b), 1)


def _claim_closed_form(ctx: Context, c: dict) -> Claim:
    st = ctx.setting(c.get("setting"))
    expr = dsl.parse_scalar(str(c["expr"]))
    where = c.get("where")
    origin = c.get("origin", "oracle")
    note = c.get("note", "")
    suffix = f"closed_form[{c['expr']}]" + (f"[{where}]" if where else "")
    if c.get("exact"):
        orc = ctx.oracle(st, c["sequence"])
        ks = np.arange(st.start, ctx.oracle_horizon + 1)
        want = oracle.exact_values(expr, st.start, ctx.oracle_horizon)
        mism, first = 0, None
        for j, ok in enumerate(_where_mask(where, ks)):
            if ok and not _exact_equal(orc.t[j], want[j]):
                mism += 1
                first = first or int(ks[j])
        extra = "" if orc.exact else "; oracle left rational arithmetic, compared to 45 digits"
        note = (note + "; " if note else "") + f"exact oracle, k <= {ctx.oracle_horizon}{extra}"
        if first is not None:
            note += f"; first mismatch at k={first}"
        disc = c.get("discrepancy", "")
        if "stated" in c:
            disc = _stated_note(c, st, ctx, expr, where, disc)
        return Claim(_label(c, st, suffix), mism == 0, mism, 0, 0.0, origin, note, disc)
    tol = float(c.get("tol", 0.0))
    upto = min(int(c.get("upto", ctx.horizon)), ctx.horizon)
    ts = ctx.series(st, c["sequence"])
    ks = ts.k[: upto - st.start + 1]
    mask = _where_mask(where, ks)
    got = ts.t[: len(ks)][mask]
    want = dsl.eval_array(expr, ks[mask]) * np.ones(int(mask.sum()))
    err = _rel_err(got, want)
    worst = float(np.max(err)) if err.size else 0.0
    note = (note + "; " if note else "") + f"float pipeline, k <= {upto}"
    return Claim(_label(c, st, suffix + "[float]"), worst <= tol, worst, 0.0, tol, origin, note,
                 c.get("discrepancy", ""))


def _rel_err(got: np.ndarray, want: np.ndarray) -> np.ndarray:
    den = np.abs(want)
    return np.where(den > 0, np.abs(got - want) / np.where(den > 0, den, 1.0), np.abs(got - want))


def _stated_note(c, st, ctx, expr, where, disc) -> str:
    stated = dsl.parse_scalar(str(c["stated"]))
    ks = range(st.start, ctx.oracle_horizon + 1)
    a = oracle.exact_values(stated, st.start, ctx.oracle_horizon)
    b = oracle.exact_values(expr, st.start, ctx.oracle_horizon)
    diff = [k for j, k in enumerate(ks) if (where is None or (k % 2 == 0) == (where == "even"))
            and a[j] != b[j]]
    tail = (f"stated form {c['stated']} differs at {len(diff)} of {len(ks)} indices"
            + (f", first at k={diff[0]}" if diff else ""))
    return f"{disc} ({tail})" if disc else tail


def _claim_bound(ctx: Context, c: dict) -> Claim:
    st = ctx.setting(c.get("setting"))
    expr = dsl.parse_scalar(str(c["expr"]))
    power = int(c.get("power", 1))
    orc = ctx.oracle(st, c["sequence"])
    viol, stated_viol = 0, 0
    stated = dsl.parse_scalar(str(c["stated"])) if "stated" in c else None
    for j, t in enumerate(orc.t):
        k = st.start + j
        if t**power > dsl.eval_exact(expr, k):
            viol += 1
        if stated is not None and t**power > dsl.eval_exact(stated, k):
            stated_viol += 1
    disc = c.get("discrepancy", "")
    if stated is not None:
        disc += f" (stated bound {c['stated']} fails at {stated_viol} of {len(orc.t)} indices)"
    lhs = "t_k" if power == 1 else f"t_k^{power}"
    note = c.get("note", "") or f"{lhs} <= {c['expr']} in exact arithmetic, k <= {ctx.oracle_horizon}"
    return Claim(_label(c, st, f"bound[{lhs} <= {c['expr']}]"), viol == 0, viol, 0, 0.0,
                 c.get("origin", "oracle"), note, disc)


def _claim_value(ctx: Context, c: dict) -> Claim:
    st = ctx.setting(c.get("setting"))
    k = int(c["k"])
    origin = c.get("origin", "oracle")
    note = c.get("note", "")
    if "greater_than" in c:
        got = ctx.series(st, c["sequence"]).at(k)
        g = float(c["greater_than"])
        return Claim(_label(c, st, f"t_{k}>{c['greater_than']}"), got > g, got, g, None, origin, note)
    expected = dsl.parse_scalar(str(c["expected"]))
    if c.get("oracle"):
        got = ctx.oracle(st, c["sequence"]).at(k)
        want = dsl.eval_exact(expected, k)
        return Claim(_label(c, st, f"oracle_t_{k}"), _exact_equal(got, want), got, want, 0.0, origin,
                     (note + "; " if note else "") + "exact oracle")
    got = ctx.series(st, c["sequence"]).at(k)
    want = float(dsl.eval_array(expected, [k])[0])
    tol = float(c.get("tol", 0.0))
    ok = got == want if tol == 0 else abs(got - want) <= tol * abs(want)
    return Claim(_label(c, st, f"t_{k}"), bool(ok), got, want, tol, origin,
                 (note + "; " if note else "") + ("exact float equality" if tol == 0 else "relative tolerance"))


def _claim_partial_sum(ctx: Context, c: dict) -> Claim:
    st = ctx.setting(c.get("setting"))
    k = int(c["k"])
    s = ctx.s(st, c["sequence"])
    got = float(np.sum(s[: k - st.start + 1]))
    g = float(c["greater_than"])
    return Claim(_label(c, st, f"partial_sum_{k}>{c['greater_than']}"), got > g, got, g, None,
                 c.get("origin", "oracle"), c.get("note", ""))


def _claim_cauchy(ctx: Context, c: dict) -> Claim:
    st = ctx.setting(c.get("setting"))
    a, b = int(c["from"]), int(c["to"])
    sums = sp.streamed_partial_sums(st.sequence(c["sequence"]), st.scheme(), b, [a, b], st.modulus,
                                    wm.ExprGenerator(st.exponents))
    inc = sums[b] - sums[a]
    tol = float(c["tol"])
    note = f"partial sums streamed to k={b}; P({a}) = {sums[a]:.17g}"
    if inc == 0:
        note += "; the remaining terms are below the resolution of the running sum"
    return Claim(_label(c, st, f"cauchy[{a},{b}]"), abs(inc) < tol, inc, 0.0, tol,
                 c.get("origin", "oracle"), note)


def _claim_limit(ctx: Context, c: dict) -> Claim:
    st = ctx.setting(c.get("setting"))
    ts = ctx.series(st, c["sequence"])
    L = float(dsl.eval_array(dsl.parse_scalar(str(c["value"])), [1])[0])
    tail = ts.t[(3 * len(ts.t)) // 4:]
    dev = float(np.max(np.abs(tail - L)))
    tol = float(c["tol"])
    note = c.get("note", "") or f"max |t_k - L| over k >= {ts.start + (3 * len(ts.t)) // 4}"
    disc = c.get("discrepancy", "")
    if "stated" in c:
        disc += f" (stated limit {c['stated']}, measured tail {float(tail[-1]):.17g})"
    return Claim(_label(c, st, f"limit[{c['value']}]"), dev <= tol, dev, 0.0, tol,
                 c.get("origin", "oracle"), note, disc)


def _claim_values_set(ctx: Context, c: dict) -> Claim:
    st = ctx.setting(c.get("setting"))
    ts = ctx.series(st, c["sequence"])
    tail = ts.t[(3 * len(ts.t)) // 4:]
    got = sorted({float(x) for x in tail})
    want = sorted(float(dsl.eval_array(dsl.parse_scalar(str(v)), [1])[0]) for v in c["values"])
    disc = c.get("discrepancy", "")
    if "stated" in c:
        disc += f" (stated values {' '.join(map(str, c['stated']))})"
    return Claim(_label(c, st, "tail_values"), got == want, got, want, 0.0, c.get("origin", "oracle"),
                 "distinct t_k over the last quarter, exact float equality", disc)


def _claim_verdict(ctx: Context, c: dict) -> Claim:
    st = ctx.setting(c.get("setting"))
    space = sp.Space.parse(str(c["space"]))
    strict = bool(c.get("strict", False))
    base = st.base(c["sequence"]) if space.kind == "c" and not strict else None
    ts = ctx.series(st, c["sequence"], base=base) if base is not None else ctx.series(st, c["sequence"])
    s = sp.scalar_series(ts, st.modulus, ctx.exponents(st))
    target = sp.C0 if (space.kind == "c" and strict) else space
    v = sp.diagnose(s, target, start=st.start)
    want = sp.CONSISTENT if c["expected"] == "consistent" else sp.INCONSISTENT
    reading = " (strict reading)" if strict else ""
    return Claim(_label(c, st, f"verdict[{space}{reading}]"), v.verdict == want, v.verdict, want, None,
                 "verdict", f"{v.note} at horizon {v.horizon}", c.get("discrepancy", ""))


def _claim_dominated(ctx: Context, c: dict) -> Claim:
    st = ctx.setting(c.get("setting"))
    ks = np.arange(st.start, ctx.horizon + 1)
    dy = wm.distances(st.sequence(c["sequence"]), ks)
    dx = wm.distances(st.sequence(c["by"]), ks)
    viol = int(np.sum(dy > dx))
    note = f"d(Y_k, 0) <= d(X_k, 0) for k <= {ctx.horizon}"
    _, v = st.scheme().weights(ks)
    if np.all(v >= 0):
        sviol = int(np.sum(ctx.s(st, c["sequence"]) > ctx.s(st, c["by"])))
        viol += sviol
        note += f"; s_k(Y) <= s_k(X) ({sviol} violations)"
    else:
        note += "; weights change sign, so s_k is not compared"
    return Claim(_label(c, st, f"dominated_by[{c['by']}]"), viol == 0, viol, 0, 0.0, "construction", note)


def _claim_zero_pattern(ctx: Context, c: dict) -> Claim:
    st = ctx.setting(c.get("setting"))
    ks = np.arange(st.start, ctx.horizon + 1)
    zy = wm.distances(st.sequence(c["sequence"]), ks) == 0
    zx = wm.distances(st.sequence(c["like"]), ks) == 0
    diff = int(np.sum(zx != zy))
    return Claim(_label(c, st, f"zero_pattern[{c['like']}]"), diff == 0, diff, 0, 0.0, "construction",
                 f"Y_k = 0 exactly when X_k = 0, k <= {ctx.horizon}")


CLAIM_KINDS = {
    "closed_form": _claim_closed_form,
    "bound": _claim_bound,
    "value": _claim_value,
    "partial_sum": _claim_partial_sum,
    "cauchy": _claim_cauchy,
    "limit": _claim_limit,
    "values_set": _claim_values_set,
    "verdict": _claim_verdict,
    "dominated": _claim_dominated,
    "zero_pattern": _claim_zero_pattern,
}


def _oracle_claims(ctx: Context) -> list[Claim]:
    """Float pipeline against the exact oracle for every DSL sequence."""
    out = []
    bindings = ctx.spec.extra.get("oracle_params") or [{}]
    for st in ctx.spec.settings:
        for name, node in st.sequences.items():
            for params in (bindings if _names(node) else [{}]):
                ts = ctx.series(st, name, params)
                orc = ctx.oracle(st, name, params)
                err, at = oracle.max_relative_error(ts.t[: len(orc.t)], orc.t)
                tag = "".join(f"[{k}={v}]" for k, v in sorted(params.items()))
                prefix = f"{st.name}." if st.name != "main" else ""
                out.append(Claim(
                    f"{prefix}{name}{tag}.pipeline_vs_oracle", err <= ORACLE_RTOL, err, 0.0, ORACLE_RTOL,
                    "oracle",
                    f"max relative error over k <= {ctx.oracle_horizon}"
                    + (f" (worst at k={st.start + at})" if at >= 0 else "")
                    + ("" if orc.exact else "; oracle switched to 60-digit arithmetic"),
                ))
    return out


# -- case-specific claim builders ------------------------------------------------

def _nonsymmetric(ctx: Context) -> list[Claim]:
    st = ctx.setting()
    ks = np.arange(st.start, ctx.horizon + 1)
    out = []
    counts = {}
    for name in ("X", "Y"):
        d = wm.distances(st.sequence(name), ks)
        last = d[(3 * len(d)) // 4:]
        counts[name] = (int(np.sum(last == 1)), int(np.sum(last == 0)), bool(np.all((d == 0) | (d == 1))))
    ok = all(a > 0 and b > 0 and c for a, b, c in counts.values())
    out.append(Claim(
        "Y_is_rearrangement_of_X", ok,
        " ".join(f"{n}:{a}/{b}" for n, (a, b, _) in counts.items()), "both counts positive", None,
        "construction",
        "both sequences take only the values 0 and 1 and keep taking both in the last quarter "
        "(ones/zeros shown), so Y is a rearrangement of X",
    ))
    return out


def _nonalgebra(ctx: Context) -> list[Claim]:
    st = ctx.setting()
    ks = np.arange(st.start, ctx.horizon + 1)
    xy = st.sequence("XY").batch(ks)
    k3 = ks.astype(float) ** 3
    bad = int(np.sum((xy.lower[:, 0] != -k3) | (xy.upper[:, 0] != k3)))
    return [Claim("XY.support_is_k_cubed", bad == 0, bad, 0, 0.0, "construction",
                  f"the alpha = 0 cut of X_k Y_k is [-k^3, k^3] for k <= {ctx.horizon}")]


def _random_triangular(rng, n: int, scale: np.ndarray) -> FuzzyArray:
    pts = np.sort(rng.normal(size=(n, 3)), axis=1) * scale[:, None]
    return FuzzyArray.triangular(pts[:, 0], pts[:, 1], pts[:, 2])


def _solid_mechanism(ctx: Context) -> list[Claim]:
    pairs = int(ctx.spec.extra.get("random_pairs", 200))
    length = int(ctx.spec.extra.get("random_length", 256))
    rng = ctx.rng
    names = sorted(mod.CATALOG_MODULI)
    viol = dviol = 0
    zero_ok = True
    for j in range(pairs):
        x = _random_triangular(rng, length, rng.uniform(0.1, 10, length))
        lam = rng.uniform(0, 1, length)
        lam[rng.random(length) < 0.2] = 0.0
        y = x.scale(lam)
        if j % 10 == 0:
            y = FuzzyArray.crisp(np.zeros(length))
        scheme = wm.WeightScheme(
            wm.ArrayGenerator(rng.uniform(0.01, 10, length)), wm.ArrayGenerator(rng.uniform(0.01, 10, length))
        )
        f = mod.CATALOG_MODULI[names[int(rng.integers(len(names)))]]
        r = sp.ExponentSeq.over(wm.ArrayGenerator(rng.uniform(0.5, 2, length)), 1, length)
        tx = wm.transform(wm.ArraySequence(x), scheme, length)
        ty = wm.transform(wm.ArraySequence(y), scheme, length)
        dviol += int(np.sum(y.norms() > x.norms()))
        sx, sy = sp.scalar_series(tx, f, r), sp.scalar_series(ty, f, r)
        viol += int(np.sum(sy > sx))
        if j % 10 == 0:
            zero_ok &= bool(np.all(sy == 0))
    return [
        Claim("random_pairs.distance_domination", dviol == 0, dviol, 0, 0.0, "construction",
              f"{pairs} random pairs of length {length}, Y_k = c_k X_k with c_k in [0, 1]"),
        Claim("random_pairs.s_domination", viol == 0, viol, 0, 0.0, "inequality",
              "s_k(Y) <= s_k(X) for every k, positive random weights, random catalog modulus, r_k in [0.5, 2]"),
        Claim("zero_sequence.s_is_zero", zero_ok, zero_ok, True, None, "construction",
              "every tenth pair uses Y = 0, giving s_k(Y) = 0"),
    ]


def _dsl_number(x: float) -> str:
    return repr(round(float(x), 6))


def _quasilinear(ctx: Context) -> list[Claim]:
    st = ctx.setting()
    rng = ctx.rng
    pairs = int(ctx.spec.extra.get("random_pairs", 20))
    spaces_ok = mech = 0
    total = 0
    worst = 0.0
    for _ in range(pairs):
        texts = []
        for _ in range(2):
            a, b, c = sorted(rng.uniform(-3, 3, 3))
            p = rng.uniform(0.3, 1.5)
            texts.append(
                f"tri({_dsl_number(a)}/k^{_dsl_number(p)}, {_dsl_number(b)}/k^{_dsl_number(p)}, "
                f"{_dsl_number(c)}/k^{_dsl_number(p)})"
            )
        lam = rng.uniform(-5, 5)
        seqs = {
            "X": texts[0],
            "Y": texts[1],
            "X+Y": f"{texts[0]} + {texts[1]}",
            "cX": f"{_dsl_number(lam)}*{texts[0]}",
        }
        s = {}
        for key, text in seqs.items():
            ts = wm.transform(wm.ExprSequence(dsl.parse_fuzzy(text)), st.scheme(), ctx.horizon)
            s[key] = sp.scalar_series(ts, st.modulus, ctx.exponents(st))
            total += 1
            spaces_ok += sp.diagnose(s[key], sp.C0).consistent
        r = ctx.exponents(st)
        bound_sum = r.C_H * (s["X"] + s["Y"])
        bound_scale = np.power(max(1.0, math.ceil(abs(lam))), r.values) * s["X"]
        for got, bound in ((s["X+Y"], bound_sum), (s["cX"], bound_scale)):
            excess = np.max((got - bound) / np.maximum(bound, 1e-300))
            worst = max(worst, float(excess))
            mech += int(np.sum(got > bound * (1 + 1e-12)))
    return [
        Claim("random.c0_closure", spaces_ok == total, spaces_ok, total, None, "verdict",
              f"{pairs} random c0 pairs: X, Y, X + Y and cX all consistent with c0"),
        Claim("random.pointwise_bounds", mech == 0, mech, 0, 1e-12, "inequality",
              "s(X+Y) <= C_H (s(X) + s(Y)) and s(cX) <= ceil(|c|)^r s(X) termwise; "
              f"largest relative excess {worst:.3g}"),
    ]


def _completeness(ctx: Context) -> list[Claim]:
    st = ctx.setting()
    fam, lim = ctx.spec.extra["family"], ctx.spec.extra["limit"]
    size = int(ctx.spec.extra.get("family_size", 40))
    after = int(ctx.spec.extra.get("ratio_after", 10))
    scheme = st.scheme()
    r = ctx.exponents(st)
    xs = {n: st.sequence(fam, {"n": n}) for n in range(1, size + 1)}
    x = st.sequence(lim)
    d_lim = np.array([sp.metric_D(xs[n], x, scheme, st.modulus, r, ctx.horizon).value for n in xs])
    ns = np.arange(1, size + 1)
    closed = (1.0 / (ns + 1.0)) ** (1.0 / r.M)  # rat(1/n) = 1/(n+1), largest at the smallest exponent r_1 = 1
    cf_err = float(np.max(np.abs(d_lim - closed) / closed))
    ratios = d_lim[1:] / d_lim[:-1]
    mono = bool(np.all(np.diff(d_lim) < 0))
    ratio_ok = bool(np.all(ratios[after - 1:] < 1))
    tri_viol, worst = 0, -math.inf
    pair_d = {}
    for n in range(1, size + 1):
        for m in range(n + 1, size + 1):
            dnm = sp.metric_D(xs[n], xs[m], scheme, st.modulus, r, ctx.horizon).value
            pair_d[n, m] = dnm
            gap = dnm - (d_lim[n - 1] + d_lim[m - 1])
            worst = max(worst, gap)
            tri_viol += int(gap > 1e-9)
    tails = [max(v for (a, b), v in pair_d.items() if a >= n0) for n0 in range(1, size)]
    cauchy = bool(np.all(np.diff(tails) <= 0))
    zero = wm.ConstantSequence(ZERO)
    d0 = sp.metric_D(x, x, scheme, st.modulus, r, ctx.horizon).value
    return [
        Claim("D(Xn,X).closed_form", cf_err <= 1e-12, cf_err, 0.0, 1e-12, "oracle",
              "D(X^n, X) = (1/(n+1))^(1/M), since d(X^n_k, X_k) = 1/n for every k"),
        Claim("D(Xn,X).strictly_decreasing", mono, mono, True, None, "inequality",
              f"n = 1..{size}; D(X^{size}, X) = {d_lim[-1]:.6g}"),
        Claim(f"D(Xn,X).ratios_below_1_after_n={after}", ratio_ok, float(np.max(ratios[after - 1:])), 1.0,
              None, "inequality", "largest ratio D(X^(n+1), X)/D(X^n, X)"),
        Claim("D.triangle_through_limit", tri_viol == 0, tri_viol, 0, 1e-9, "inequality",
              f"D(X^n, X^m) <= D(X^n, X) + D(X, X^m) for all n < m <= {size}; largest gap {worst:.3g}"),
        Claim("D.cauchy_tails_shrink", cauchy, tails[-1], tails[0], None, "inequality",
              "sup over m > n >= N of D(X^n, X^m) is non-increasing in N"),
        Claim("D(X,X)=0", d0 == 0, d0, 0.0, 0.0, "construction", ""),
        Claim("D(X,0)_finite", math.isfinite(sp.metric_D(x, zero, scheme, st.modulus, r, ctx.horizon).value),
              True, True, None, "construction", "the limit stays at finite distance from 0"),
    ]


def _kspace(ctx: Context) -> list[Claim]:
    st = ctx.setting()
    fam = ctx.spec.extra["family"]
    size = int(ctx.spec.extra.get("family_size", 50))
    indices = [int(i) for i in ctx.spec.extra.get("indices", [1, 10, 100])]
    rep = sp.projection_check(
        lambda n: st.sequence(fam, {"n": n}), range(1, size + 1), indices, st.scheme(), st.modulus,
        ctx.exponents(st), ctx.horizon,
    )
    worst = 0.0
    for i, vals in rep.pointwise.items():
        want = 1.0 / (np.arange(1, size + 1) + i)
        worst = max(worst, float(np.max(np.abs(np.array(vals) - want) / want)))
    out = [
        Claim("D(Xn,0).decreasing", rep.D_decreasing, rep.family_D[-1], rep.family_D[0], None, "inequality",
              f"D(X^n, 0) for n = 1..{size} (first and last shown)"),
        Claim("projections.decreasing", rep.pointwise_decreasing, rep.pointwise_decreasing, True, None,
              "inequality", f"d(X^n_i, 0) non-increasing in n for i in {indices}"),
        Claim("projections.closed_form", worst <= 1e-15, worst, 0.0, 1e-15, "construction",
              "d(X^n_i, 0) = 1/(n + i)"),
    ]
    for i, vals in rep.pointwise.items():
        out.append(Claim(f"projection_{i}.final", vals[-1] <= 1.0 / (size + i) * (1 + 1e-15), vals[-1],
                         1.0 / (size + i), 1e-15, "construction", f"d(X^{size}_{i}, 0)"))
    return out


# relation cases ------------------------------------------------------------------

def _modulus(text) -> mod.ModulusFn:
    return dsl.parse_modulus(str(text))


def _verdicts(ctx: Context, f: mod.ModulusFn, r_text: str, spaces, strict_c=False) -> dict:
    r = wm.ExprGenerator(dsl.parse_scalar(str(r_text)))
    rs = np.asarray(r.values(np.arange(1, ctx.horizon + 1)), dtype=float)
    out = {}
    for e in library_sequences():
        s = sp._powered(f, ctx.library_t(e), rs)
        for space in spaces:
            target = sp.C0 if (space.kind == "c" and strict_c) else space
            out[e.name, str(space)] = sp.diagnose(s, target).consistent
    return out


def _implication(name, premise: dict, conclusion: dict, origin="verdict", note="", discrepancy="") -> Claim:
    keys = [k for k in premise if premise[k]]
    bad = sorted(f"{a}/{b}" for a, b in keys if not conclusion[a, b])
    held = len(keys)
    text = f"{held} premise-consistent (sequence, space) pairs"
    if bad:
        text += "; failing: " + ", ".join(bad)
    return Claim(name, not bad, len(bad), 0, None, origin, (note + "; " if note else "") + text, discrepancy)


def _spaces(ctx, default):
    return [sp.Space.parse(s) for s in ctx.spec.extra.get("spaces", default)]


def _library_series_blocks(ctx: Context, f: mod.ModulusFn) -> list[SeriesBlock]:
    ks = np.arange(1, ctx.horizon + 1)
    return [SeriesBlock("library", e.name, ks, ctx.library_t(e), np.asarray(f(ctx.library_t(e)), dtype=float))
            for e in library_sequences()]


def _samples_le(f, g) -> tuple[int, float]:
    ts = mod.default_samples()
    fv, gv = np.asarray(f(ts), dtype=float), np.asarray(g(ts), dtype=float)
    return int(np.sum(fv > gv * (1 + 1e-15))), float(np.max(fv - gv))


def _modulus_pointwise(ctx: Context) -> list[Claim]:
    spaces = _spaces(ctx, ["c", "c0", "l1", "linf"])
    out = []
    for pair in ctx.spec.extra["pairs"]:
        f, g = _modulus(pair["f"]), _modulus(pair["g"])
        tag = f"[{f} <= {g}]"
        nviol, _ = _samples_le(f, g)
        out.append(Claim(f"pointwise{tag}", nviol == 0, nviol, 0, 1e-15, "inequality",
                         f"f(t) <= g(t) on {len(mod.default_samples())} log-spaced samples"))
        mech = 0
        for e in library_sequences():
            t = ctx.library_t(e)
            mech += int(np.sum(np.asarray(f(t)) > np.asarray(g(t)) * (1 + 1e-15)))
        out.append(Claim(f"mechanism{tag}", mech == 0, mech, 0, 1e-15, "inequality",
                         "s_k under f never exceeds s_k under g on the test sequences"))
        out.append(_implication(f"inclusion{tag}", _verdicts(ctx, g, "1", spaces), _verdicts(ctx, f, "1", spaces),
                                note="g-consistent implies f-consistent"))
    return out


def _modulus_sum(ctx: Context) -> list[Claim]:
    spaces = _spaces(ctx, ["c", "c0", "l1", "linf"])
    out = []
    for pair in ctx.spec.extra["pairs"]:
        f, g = _modulus(pair["f"]), _modulus(pair["g"])
        h = mod.mod_sum(f, g)
        vf, vg, vh = (_verdicts(ctx, m, "1", spaces) for m in (f, g, h))
        both = {k: vf[k] and vg[k] for k in vf}
        out.append(_implication(f"intersection_in_sum[{f}, {g}]", both, vh,
                                note=f"consistent under {f} and {g} implies consistent under {h}"))
    return out


def _modulus_compose(ctx: Context) -> list[Claim]:
    spaces = _spaces(ctx, ["c", "c0"])
    out = []
    for pair in ctx.spec.extra["pairs"]:
        f, g = _modulus(pair["f"]), _modulus(pair["g"])
        gf = mod.compose(g, f)
        out.append(_implication(f"composition[{f} -> {gf}]", _verdicts(ctx, f, "1", spaces),
                                _verdicts(ctx, gf, "1", spaces),
                                note=f"consistent under {f} implies consistent under {gf}"))
    return out


def _all_catalog_sequences() -> list[tuple[str, wm.WeightScheme, wm.ExprSequence]]:
    """Every parameter-free DSL sequence in the catalog plus the test library."""
    seen, out = set(), []
    for e in library_sequences():
        key = (dsl.to_text(e.u), dsl.to_text(e.v), dsl.to_text(e.sequence))
        seen.add(key)
        out.append((e.name, e.scheme, wm.ExprSequence(e.sequence)))
    for cid in catalog_ids():
        spec = load_catalog_case(cid)
        for st in spec.settings:
            if st.params:
                continue
            for name, node in st.sequences.items():
                key = (dsl.to_text(st.u), dsl.to_text(st.v), dsl.to_text(node))
                if key not in seen:
                    seen.add(key)
                    out.append((f"{cid}.{st.name}.{name}", st.scheme(), wm.ExprSequence(node)))
    return out


def _modulus_power_equiv(ctx: Context) -> list[Claim]:
    st = ctx.setting()
    f = st.modulus
    spaces = _spaces(ctx, ["c", "c0"])
    out = []
    g = mod.beta(f)
    exact = g.beta_exact
    out.append(Claim(f"beta[{f}]", exact is not None and exact > 0 and abs(g.beta_estimate - exact) <= 1e-6,
                     g.beta_estimate, exact, 1e-6, "inequality",
                     f"sampled inf f(t)/t (attained near t = {g.sample_min:.3g}) against the closed form"))
    seqs = _all_catalog_sequences()
    ts = {name: wm.transform(seq, scheme, ctx.horizon).t for name, scheme, seq in seqs}
    plain = {(n, str(sp_)): sp.diagnose(t, sp_).consistent for n, t in ts.items() for sp_ in spaces}
    for n in ctx.spec.extra.get("iterations", [2]):
        chk = mod.check_iterate_growth(f, int(n))
        out.append(Claim(f"iterate_growth[{f}, n={n}]", chk.violations == 0, chk.violations, 0, 1e-12,
                         "inequality",
                         f"f^n(t) >= beta_hat^n t on the sample grid, beta_hat = {chk.beta_hat:.17g}, "
                         f"smallest ratio {chk.worst_ratio:.6g}"))
        fn = mod.iterate(f, int(n))
        it = {(nm, str(sp_)): sp.diagnose(np.asarray(fn(t), dtype=float), sp_).consistent
              for nm, t in ts.items() for sp_ in spaces}
        diff = sorted(f"{a}/{b}" for a, b in plain if plain[a, b] != it[a, b])
        out.append(Claim(f"verdicts_coincide[{fn}]", not diff, len(diff), 0, None, "verdict",
                         f"{len(plain)} (sequence, space) pairs over every catalog sequence"
                         + ("; differing: " + ", ".join(diff) if diff else "")))
    if "contrast" in ctx.spec.extra:
        h = _modulus(ctx.spec.extra["contrast"])
        n = int(ctx.spec.extra.get("iterations", [2])[0])
        hn = mod.iterate(h, n)
        it = {(nm, str(sp_)): sp.diagnose(np.asarray(hn(t), dtype=float), sp_).consistent
              for nm, t in ts.items() for sp_ in spaces}
        diff = sorted(f"{a}/{b}" for a, b in plain if plain[a, b] != it[a, b])
        out.append(Claim(f"contrast[{hn}]", h.beta_exact() == 0 and bool(diff), len(diff), ">= 1", None,
                         "verdict",
                         f"{h} has growth constant 0 and its iterate changes verdicts: " + ", ".join(diff)))
    return out


def _bounded_remark(ctx: Context) -> list[Claim]:
    linf = [sp.LINF]
    f = ctx.setting().modulus
    g = _modulus(ctx.spec.extra["compose_with"])
    h = _modulus(ctx.spec.extra["bounded_modulus"])
    n = int(ctx.spec.extra.get("iterations", 2))
    out = []
    for m in dict.fromkeys((g, h)):
        out.append(Claim(f"bounded[{m}]", m.bounded(), m.bounded(), True, None, "construction",
                         f"{m} is bounded on [0, infinity)"))
    vf = _verdicts(ctx, f, "1", linf)
    gf = mod.compose(g, f)
    vgf = _verdicts(ctx, gf, "1", linf)
    extra = sorted(a for (a, _), ok in vgf.items() if ok and not vf[a, "linf"])
    out.append(_implication(f"linf_composition[{f} -> {gf}]", vf, vgf,
                            note="sequences gained: " + (", ".join(extra) or "none")))
    hn = mod.iterate(h, n)
    vid = _verdicts(ctx, mod.ID, "1", linf)
    vhn = _verdicts(ctx, hn, "1", linf)
    out.append(_implication(f"linf_iterate[{hn}]", vid, vhn, note="plain linf-consistent implies consistent under "
                            f"{hn}"))
    every = all(vhn.values())
    out.append(Claim(f"linf_everything_bounded[{hn}]", every, sum(vhn.values()), len(vhn), None, "verdict",
                     "a bounded modulus makes every test sequence bounded"))
    return out


def _exponent_mono(ctx: Context) -> list[Claim]:
    spaces = _spaces(ctx, ["c0", "l1", "c"])
    f = ctx.setting().modulus
    base = _verdicts(ctx, f, "1", spaces)
    out = []
    for q in ctx.spec.extra.get("larger_exponents", ["2"]):
        out.append(_implication(f"inclusion[r=1 -> q={q}]", base, _verdicts(ctx, f, q, spaces),
                                note="r_k <= q_k"))
    osc = ctx.spec.extra.get("oscillating_exponents")
    if osc:
        non_c = [s for s in spaces if s.kind != "c"]
        if non_c:
            out.append(_implication(f"inclusion[r=1 -> q={osc}] (c0, lp)", _verdicts(ctx, f, "1", non_c),
                                    _verdicts(ctx, f, osc, non_c), note="r_k <= q_k"))
        strict = [sp.C]
        out.append(_implication(f"inclusion[r=1 -> q={osc}] (c, strict reading)",
                                _verdicts(ctx, f, "1", strict, strict_c=True),
                                _verdicts(ctx, f, osc, strict, strict_c=True)))
        vc, vq = _verdicts(ctx, f, "1", strict), _verdicts(ctx, f, osc, strict)
        lost = sorted(a for (a, _), ok in vc.items() if ok and not vq[a, "c"])
        out.append(Claim(
            f"c_needs_convergent_exponents[q={osc}]", bool(lost), len(lost), ">= 1", None, "verdict",
            "sequences in c under r = 1 but not under the oscillating q: " + ", ".join(lost),
            "under the convergent reading of c the inclusion for c needs q_k to converge: a limit L "
            "other than 0 or 1 makes L^q_k oscillate; for c0, l1 and the strict reading of c it holds",
        ))
    # mechanism: s^q <= s^r wherever f(t) <= 1
    viol = 0
    for e in library_sequences():
        ft = np.asarray(f(ctx.library_t(e)), dtype=float)
        small = ft <= 1
        viol += int(np.sum(np.power(ft[small], 2.0) > ft[small]))
    out.append(Claim("mechanism[f(t) <= 1 => f(t)^q <= f(t)^r]", viol == 0, viol, 0, 0.0, "inequality",
                     "checked with q = 2, r = 1 on the test sequences"))
    return out


def _exponent_bounded_ratio(ctx: Context) -> list[Claim]:
    f = ctx.setting().modulus
    rng = ctx.rng
    count = int(ctx.spec.extra.get("random_series", 200))
    length = int(ctx.spec.extra.get("random_length", 512))
    viol = 0
    worst = 0.0
    for _ in range(count):
        t = np.exp(rng.uniform(-6, 3, length))
        r = rng.uniform(0.5, 2, length)
        rho = rng.uniform(1, 3, length)
        q = r * rho
        ft = np.asarray(f(t), dtype=float)
        sr, sq = np.power(ft, r), np.power(ft, q)
        m_star = float(np.max(sr))
        c_h = sp.subadditivity_constant(float(np.max(q)))
        bound = c_h * (m_star + m_star ** float(np.max(rho)))
        worst = max(worst, float(np.max(sq)) / bound)
        viol += int(np.max(sq) > bound)
    out = [Claim("random.sup_bound", viol == 0, viol, 0, None, "inequality",
                 f"sup s^q <= C_H (M + M^(sup q/r)) with M = sup s^r on {count} random bounded series; "
                 f"largest ratio to the bound {worst:.3g}")]
    linf = [sp.LINF]
    base = _verdicts(ctx, f, "1", linf)
    for q in ctx.spec.extra.get("larger_exponents", ["2"]):
        out.append(_implication(f"linf_inclusion[r=1 -> q={q}]", base, _verdicts(ctx, f, q, linf),
                                note="q_k / r_k bounded"))
    return out


_BUILDERS = {
    "nonsymmetric": _nonsymmetric,
    "nonalgebra": _nonalgebra,
    "solid_mechanism": _solid_mechanism,
    "quasilinear_closure": _quasilinear,
    "completeness_demo": _completeness,
    "kspace_projection": _kspace,
    "modulus_pointwise": _modulus_pointwise,
    "modulus_sum": _modulus_sum,
    "modulus_compose": _modulus_compose,
    "modulus_power_equiv": _modulus_power_equiv,
    "bounded_remark": _bounded_remark,
    "exponent_mono": _exponent_mono,
    "exponent_bounded_ratio": _exponent_bounded_ratio,
}

_LIBRARY_CASES = {
    "modulus_pointwise", "modulus_sum", "modulus_compose", "modulus_power_equiv",
    "bounded_remark", "exponent_mono", "exponent_bounded_ratio",
}


# -- running -------------------------------------------------------------------------

def run_spec(spec: CaseSpec, seed: int = 0, horizon: int | None = None) -> CaseReport:
    """Evaluate every claim of a case (catalog or user supplied)."""
    t0 = time.perf_counter()
    ctx = Context(spec, seed, horizon)
    claims: list[Claim] = []
    for c in spec.extra.get("claims", []) or []:
        kind = c.get("kind")
        if kind not in CLAIM_KINDS:
            raise ValueError(f"case {spec.id!r}: unknown claim kind {kind!r}")
        claims.append(CLAIM_KINDS[kind](ctx, c))
    if spec.id in _BUILDERS:
        claims.extend(_BUILDERS[spec.id](ctx))
    claims.extend(_oracle_claims(ctx))
    series = []
    for st in spec.settings:
        for name, node in st.sequences.items():
            params = (spec.extra.get("oracle_params") or [{}])[0] if _names(node) else None
            ts = ctx.series(st, name, params)
            series.append(SeriesBlock(st.name, name, ts.k, ts.t, ctx.s(st, name, params)))
    if spec.id in _LIBRARY_CASES:
        series.extend(_library_series_blocks(ctx, spec.setting().modulus))
    meta = {"settings": [st.to_dict() for st in spec.settings]}
    for key in ("reading",):
        if key in spec.extra:
            meta[key] = spec.extra[key]
    return CaseReport(spec.id, spec.title, ctx.horizon, seed, claims, series, meta, time.perf_counter() - t0)


def run_case(case_id: str, seed: int = 0, horizon: int | None = None) -> CaseReport:
    return run_spec(load_catalog_case(case_id), seed, horizon)


def select_cases(pattern: str | None = None) -> list[str]:
    ids = catalog_ids()
    if not pattern:
        return ids
    return [i for i in ids if fnmatch.fnmatchcase(i, pattern)]


@dataclass
class RunSummary:
    reports: list[CaseReport]

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.reports)

    @property
    def exit_code(self) -> int:
        return 0 if self.passed else 1

    def __len__(self):
        return len(self.reports)

    def to_dict(self) -> dict:
        return {
            "cases": len(self.reports),
            "passed": sum(r.passed for r in self.reports),
            "status": "pass" if self.passed else "fail",
            "results": {r.id: ("pass" if r.passed else "fail") for r in self.reports},
        }


def _run_one(args):
    case_id, seed, out = args
    rep = run_case(case_id, seed)
    if out is not None:
        rep.write(out)
    rep.series = []  # keep the inter-process payload small
    return rep


def run_all(pattern: str | None = None, seed: int = 0, out_dir=None, jobs: int = 1) -> RunSummary:
    """Run every catalog case whose id matches the glob ``pattern``.

    Reports are written per case (atomically) when ``out_dir`` is given, plus
    ``summary.json`` at the top level. Results do not depend on ``jobs``.
    """
    ids = select_cases(pattern)
    work = [(i, seed, out_dir) for i in ids]
    if jobs > 1 and len(ids) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            reports = list(pool.map(_run_one, work))
    else:
        reports = [_run_one(w) for w in work]
    summary = RunSummary(reports)
    if out_dir is not None:
        path = Path(out_dir)
        path.mkdir(parents=True, exist_ok=True)
        (path / "summary.json").write_text(json.dumps(summary.to_dict(), indent=2, sort_keys=True) + "\n")
    return summary


def brute_force_oracle(spec: CaseSpec | str, horizon: int | None = None) -> dict:
    """Exact reference values for every DSL sequence of a case.

    Returns ``{(setting, sequence, params): {"t": [...], "s": [...], "partial": [...], "exact": bool}}``
    with values as :class:`~fractions.Fraction` (or 60-digit mpmath numbers once
    a rational accumulator grows too large).
    """
    if isinstance(spec, str):
        spec = load_catalog_case(spec)
    n = min(horizon or spec.horizon, ORACLE_HORIZON) if horizon is None else horizon
    out = {}
    bindings = spec.extra.get("oracle_params") or [{}]
    for st in spec.settings:
        for name, node in st.sequences.items():
            for params in (bindings if _names(node) else [{}]):
                orc = oracle.transform_exact(node, st.u, st.v, st.start, n, params=dict(params))
                s = oracle.scalar_series_exact(orc, st.modulus, st.exponents, dict(params))
                out[st.name, name, _key(params)] = {
                    "t": list(orc.t),
                    "s": s,
                    "partial": oracle.partial_sums_exact(s),
                    "exact": orc.exact,
                }
    return out
