"""The theorem catalog: case selection, claim evaluation, reports."""

from __future__ import annotations

import csv
import json
from fractions import Fraction

import pytest

from fuzzyseq import harness
from fuzzyseq.casefile import load_case


def test_catalog_ids():
    ids = harness.catalog_ids()
    assert len(ids) == 17
    assert "nonsymmetric" in ids
    assert not any(i.startswith("_") for i in ids)


def test_unknown_case():
    with pytest.raises(harness.UnknownCase):
        harness.run_case("no_such_case")
    with pytest.raises(harness.UnknownCase):
        harness.load_catalog_case("_test_sequences")


def test_select_by_glob():
    assert harness.select_cases("modulus_*") == [
        "modulus_compose", "modulus_pointwise", "modulus_power_equiv", "modulus_sum",
    ]
    assert harness.select_cases("nothing*") == []
    assert harness.select_cases(None) == harness.catalog_ids()


def test_run_all_filter(tmp_path):
    summary = harness.run_all("modulus_*", out_dir=tmp_path)
    assert len(summary) == 4
    assert summary.passed and summary.exit_code == 0
    assert sorted(p.name for p in tmp_path.iterdir() if p.is_dir()) == harness.select_cases("modulus_*")
    top = json.loads((tmp_path / "summary.json").read_text())
    assert top["cases"] == 4 and top["status"] == "pass"


def test_every_catalog_case_passes(catalog_reports):
    summary, _ = catalog_reports
    failing = {r.id: [c.name for c in r.failures] for r in summary.reports if not r.passed}
    assert failing == {}


def test_every_dsl_sequence_checked_against_oracle(catalog_reports):
    summary, _ = catalog_reports
    for r in summary.reports:
        spec = harness.load_catalog_case(r.id)
        n_seq = sum(len(st.sequences) for st in spec.settings)
        oracle_claims = [c for c in r.claims if c.name.endswith("pipeline_vs_oracle")]
        assert len(oracle_claims) >= n_seq, r.id
        assert all(c.measured <= 1e-12 for c in oracle_claims)


def test_report_files(catalog_reports):
    _, out = catalog_reports
    case = out / "nonsymmetric"
    assert {p.name for p in case.iterdir()} == {"claims.csv", "series.csv", "summary.json"}
    rows = {r["claim"]: r for r in csv.DictReader((case / "claims.csv").open())}
    assert rows["X.t_10000"]["measured"] == "0.01"
    assert rows["Y.t_10000"]["measured"] == "0.5"
    assert all(r["status"] == "pass" for r in rows.values())
    summary = json.loads((case / "summary.json").read_text())
    assert summary["status"] == "pass" and summary["seed"] == 0
    assert "runtime" not in json.dumps(summary)
    series = list(csv.DictReader((case / "series.csv").open()))
    ks = [int(r["k"]) for r in series if r["sequence"] == "X"]
    assert ks[:100] == list(range(1, 101)) and ks[-1] == 10_000


def test_discrepancies_are_recorded(catalog_reports):
    _, out = catalog_reports
    s = json.loads((out / "nonalgebra" / "summary.json").read_text())
    assert any("2k+1" in d["note"] for d in s["discrepancies"])
    s = json.loads((out / "nonsolid_c" / "summary.json").read_text())
    assert "reading" in s


def test_claim_kinds_on_a_user_case():
    spec = load_case("""
id: user_case
horizon: 2000
scheme: {u: 1/k, v: "1"}
sequences:
  X: crisp(1/k)
  Y: select(k odd, crisp(1), crisp(0))
  Z: crisp(2)
claims:
  - {kind: closed_form, sequence: Y, expr: floor((k + 1)/2)/k, exact: true}
  - {kind: value, sequence: Y, k: 3, expected: 2/3, oracle: true}
  - {kind: value, sequence: X, k: 1, expected: 1}
  - {kind: limit, sequence: Y, value: 1/2, tol: 1.0e-3}
  - {kind: values_set, sequence: Z, values: [2]}
  - {kind: verdict, sequence: X, space: c0, expected: consistent}
  - {kind: verdict, sequence: X, space: l1, expected: inconsistent}
  - {kind: partial_sum, sequence: X, k: 2000, greater_than: 5}
""")
    rep = harness.run_spec(spec, seed=3)
    assert rep.seed == 3
    assert rep.passed, [(c.name, c.measured) for c in rep.failures]
    assert rep.claim("Y.oracle_t_3").measured == Fraction(2, 3)
    assert len(rep.claims) == 11  # eight declared plus three oracle comparisons


def test_failing_claim_is_reported_not_raised():
    spec = load_case("""
id: wrong
horizon: 100
scheme: {u: 1/k, v: "1"}
sequences: {X: crisp(1)}
claims:
  - {kind: value, sequence: X, k: 10, expected: 2}
  - {kind: verdict, sequence: X, space: c0, expected: consistent}
""")
    rep = harness.run_spec(spec)
    assert not rep.passed
    assert {c.name for c in rep.failures} == {"X.t_10", "X.verdict[c0]"}
    assert "fail" in rep.claims_csv()


def test_unknown_claim_kind():
    spec = load_case("id: bad\nscheme: {u: 1/k, v: '1'}\nsequences: {X: crisp(1)}\nclaims: [{kind: nope}]")
    with pytest.raises(ValueError, match="unknown claim kind"):
        harness.run_spec(spec)


def test_seed_only_affects_random_cases():
    a = harness.run_case("solid_mechanism", seed=0)
    b = harness.run_case("solid_mechanism", seed=0)
    c = harness.run_case("solid_mechanism", seed=1)
    assert a.claims_csv() == b.claims_csv()
    assert c.passed
    assert harness.run_case("cesaro_constant", seed=5).claims_csv() == harness.run_case("cesaro_constant").claims_csv()


def test_brute_force_oracle():
    ref = harness.brute_force_oracle("cesaro_constant", horizon=20)
    ((key, val),) = ref.items()
    assert key == ("main", "X", ())
    assert val["exact"] and all(t == 1 for t in val["t"])
    assert val["partial"][-1] == 20
    ref = harness.brute_force_oracle("completeness_demo", horizon=5)
    assert ("main", "Xn", (("n", 7),)) in ref


def test_library():
    lib = harness.library_sequences()
    assert len(lib) == 12
    assert len({e.name for e in lib}) == 12
