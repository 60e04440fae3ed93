"""Command line front end: ``fuzzyseq <validate|dist|transform|classify|theorems>``.

Exit codes: 0 success, 1 validation failure (invalid fuzzy number, failed
claim), 2 usage error (bad arguments, missing or unparsable input file).
Numbers are printed with 17 significant digits.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
from pathlib import Path

import yaml

from . import harness
from . import spaces as sp
from . import weighted_mean as wm
from .casefile import CaseFileError, CaseSpec, load_case
from .dsl import DslSyntaxError
from .fuzzy import FuzzyNumber, from_document, metric_d, parse_shorthand, validate

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


class ValidationFailure(Exception):
    pass


def _g(x: float) -> str:
    return f"{float(x):.17g}"


def _read(path: str) -> str:
    p = Path(path)
    if not p.is_file():
        raise UsageError(f"{path}: no such file")
    try:
        return p.read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise UsageError(f"{path}: cannot read: {exc}") from None


def _document(path: str):
    """Decoded YAML/JSON document; shorthand files decode to a plain string."""
    text = _read(path)
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError:
        raise ValidationFailure(f"{path}: not a fuzzy-number document") from None
    return doc


def _levels(doc):
    if isinstance(doc, dict) and "levels" in doc:
        return doc["levels"]
    return doc


def _fuzzy(path: str) -> FuzzyNumber:
    doc = _document(path)
    try:
        return parse_shorthand(doc) if isinstance(doc, str) else from_document(doc)
    except (ValueError, TypeError, KeyError) as exc:
        raise ValidationFailure(f"{path}: {exc}") from None


def _case(source: str) -> CaseSpec:
    """A case file path, or the id of a shipped catalog case."""
    if not Path(source).exists() and source in harness.catalog_ids():
        return harness.load_catalog_case(source)
    text = _read(source)
    try:
        return load_case(text)
    except (CaseFileError, DslSyntaxError) as exc:
        raise UsageError(f"{source}: {exc}") from None


def _emit(text: str, out: str | None):
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


# -- subcommands -----------------------------------------------------------------

def cmd_validate(args) -> int:
    doc = _document(args.path)
    if isinstance(doc, str):
        try:
            parse_shorthand(doc)
            violations = []
        except ValueError as exc:
            violations = [("grid", "", str(exc))]
    elif isinstance(doc, (list, dict)):
        rep = validate(_levels(doc))
        violations = [(v.clause, "" if v.alpha is None else _g(v.alpha), v.message) for v in rep.violations]
    else:
        violations = [("grid", "", "expected a list of alpha levels")]
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["path", "valid", "clause", "alpha", "message"])
        if not violations:
            w.writerow([args.path, "true", "", "", ""])
        for clause, alpha, msg in violations:
            w.writerow([args.path, "false", clause, alpha, msg])
        _emit(buf.getvalue(), args.out)
    else:
        lines = [f"path: {args.path}", f"valid: {'true' if not violations else 'false'}"]
        for clause, alpha, msg in violations:
            lines.append(f"violation: clause {clause}" + (f" at alpha {alpha}" if alpha else "") + f": {msg}")
        _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK if not violations else EXIT_FAIL


def cmd_dist(args) -> int:
    x, y = _fuzzy(args.a), _fuzzy(args.b)
    d = metric_d(x, y)
    if args.format == "csv":
        _emit(f"a,b,d\n{args.a},{args.b},{_g(d)}\n", args.out)
    else:
        _emit(_g(d) + "\n", args.out)
    return EXIT_OK


def _pick(spec: CaseSpec, setting: str | None, sequence: str | None):
    try:
        settings = [spec.setting(setting)] if setting else list(spec.settings)
    except KeyError as exc:
        raise UsageError(str(exc.args[0])) from None
    out = []
    for st in settings:
        if st.params:
            raise UsageError(f"setting {st.name!r} has free parameters {list(st.params)}; "
                             "the command line cannot bind them")
        names = [sequence] if sequence else list(st.sequences)
        for n in names:
            if n not in st.sequences:
                raise UsageError(f"no sequence {n!r} in setting {st.name!r}")
            out.append((st, n))
    if not out:
        raise UsageError("the case defines no sequences")
    return out


def _horizon(spec: CaseSpec, st, override):
    h = override or st.horizon or spec.horizon
    if h < st.start:
        raise UsageError(f"horizon {h} precedes the start index {st.start}")
    return h


def cmd_transform(args) -> int:
    spec = _case(args.case)
    picks = _pick(spec, args.setting, args.sequence)
    single = len(picks) == 1
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n", delimiter="," if args.format == "csv" else " ")
    w.writerow((["k"] if single else ["setting", "sequence", "k"]) + ["t_k", "s_k"])
    for st, name in picks:
        h = _horizon(spec, st, args.horizon)
        ts = wm.transform(st.sequence(name), st.scheme(), h)
        s = sp.scalar_series(ts, st.modulus, st.exponent_seq(h))
        prefix = [] if single else [st.name, name]
        for k, t, sk in zip(ts.k, ts.t, s):
            w.writerow(prefix + [int(k), _g(t), _g(sk)])
    _emit(buf.getvalue(), args.out)
    return EXIT_OK


def cmd_classify(args) -> int:
    spec = _case(args.case)
    try:
        space = sp.Space.parse(args.space)
        tols = sp.Tolerances(tol=args.tol) if args.tol is not None else sp.DEFAULT_TOL
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    rows = []
    for st, name in _pick(spec, args.setting, args.sequence):
        h = _horizon(spec, st, args.horizon)
        cl = sp.classify(
            st.sequence(name), st.scheme(), space, h, st.modulus, st.exponent_seq(h),
            base=st.base(name), strict_c=args.strict_c, tolerances=tols,
        )
        rows.append((st.name, name, cl.verdict))
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["setting", "sequence", "space", "verdict", "horizon", "note", "diagnostics"])
        for st_name, name, v in rows:
            w.writerow([st_name, name, v.space, v.verdict, v.horizon, v.note, _diag_text(v.diagnostics)])
        _emit(buf.getvalue(), args.out)
    else:
        lines = []
        for st_name, name, v in rows:
            label = name if st_name == "main" else f"{st_name}.{name}"
            lines.append(f"{label}: {v.verdict} ({v.space}, horizon {v.horizon})")
            lines.append(f"  note: {v.note}")
            for key in sorted(v.diagnostics):
                lines.append(f"  {key}: {_value(v.diagnostics[key])}")
        _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def _value(x) -> str:
    if isinstance(x, bool):
        return str(x).lower()
    if isinstance(x, float):
        return _g(x)
    return str(x)


def _diag_text(d: dict) -> str:
    return ";".join(f"{k}={_value(d[k])}" for k in sorted(d))


def cmd_theorems(args) -> int:
    ids = harness.select_cases(args.filter)
    if not ids:
        raise UsageError(f"no catalog case matches {args.filter!r}")
    summary = harness.run_all(args.filter, seed=args.seed, out_dir=args.out, jobs=args.jobs)
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["case", "status", "claims", "failed"])
        for r in summary.reports:
            w.writerow([r.id, "pass" if r.passed else "fail", len(r.claims), " ".join(c.name for c in r.failures)])
        sys.stdout.write(buf.getvalue())
    else:
        for r in summary.reports:
            sys.stdout.write(f"{'PASS' if r.passed else 'FAIL'} {r.id} ({len(r.claims)} claims)\n")
            for c in r.failures:
                sys.stdout.write(f"  failed: {c.name}: measured {harness._fmt(c.measured)}, "
                                 f"expected {harness._fmt(c.expected)}\n")
        passed = sum(r.passed for r in summary.reports)
        sys.stdout.write(f"{passed}/{len(summary)} cases passed\n")
    return summary.exit_code


# -- argument parsing ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fuzzyseq", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp_, out_help="write output to this file instead of stdout"):
        sp_.add_argument("--format", choices=("text", "csv"), default="text")
        sp_.add_argument("--out", help=out_help)

    v = sub.add_parser("validate", help="check a fuzzy-number file")
    v.add_argument("path")
    common(v)
    v.set_defaults(func=cmd_validate)

    d = sub.add_parser("dist", help="metric distance between two fuzzy-number files")
    d.add_argument("a")
    d.add_argument("b")
    common(d)
    d.set_defaults(func=cmd_dist)

    for name, func, helptext in (
        ("transform", cmd_transform, "print k, t_k, s_k for a case file"),
        ("classify", cmd_classify, "finite-horizon membership verdicts for a case file"),
    ):
        c = sub.add_parser(name, help=helptext)
        c.add_argument("case", help="case file, or the id of a shipped catalog case")
        c.add_argument("--horizon", type=_positive_int)
        c.add_argument("--setting")
        c.add_argument("--sequence")
        if name == "classify":
            c.add_argument("--space", required=True, help="l1, lp:<p>, c0, c or linf")
            c.add_argument("--tol", type=float)
            c.add_argument("--strict-c", action="store_true", help="read c as convergence to 0")
        common(c)
        c.set_defaults(func=func, format=("csv" if name == "transform" else "text"))

    t = sub.add_parser("theorems", help="run the case catalog and write reports")
    t.add_argument("--filter", help="glob over case ids, e.g. 'modulus_*'")
    t.add_argument("--out", help="report directory (reports/<case_id>/...)")
    t.add_argument("--seed", type=int, default=0)
    t.add_argument("--jobs", type=_positive_int, default=1)
    t.add_argument("--format", choices=("text", "csv"), default="text")
    t.set_defaults(func=cmd_theorems)
    return p


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return v


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValidationFailure as exc:
        print(f"invalid: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except wm.GeneratorError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
