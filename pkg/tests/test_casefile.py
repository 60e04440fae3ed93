"""Case files: loading, inheritance of settings and error reporting."""

from __future__ import annotations

import numpy as np
import pytest

from fuzzyseq import weighted_mean as wm
from fuzzyseq.casefile import CaseFileError, load_case

MINIMAL = """
id: demo
title: demo case
horizon: 50
scheme: {u: 1/k, v: "1"}
modulus: rat
exponents: 2 - 1/k
sequences:
  X: crisp(1)
  Y: tri(-1/k, 0, 1/k)
bases:
  X: crisp(1)
claims:
  - {kind: verdict, sequence: X, space: linf, expected: consistent}
"""


def test_load_minimal_text():
    spec = load_case(MINIMAL)
    assert spec.id == "demo" and spec.horizon == 50
    st = spec.setting()
    assert st.name == "main"
    assert str(st.modulus) == "rat"
    assert set(st.sequences) == {"X", "Y"}
    assert spec.extra["claims"][0]["space"] == "linf"
    ts = wm.transform(st.sequence("X"), st.scheme(), 10)
    assert np.all(ts.t == 1.0)
    assert st.base("X").is_crisp()
    assert st.base("Y") is None
    r = st.exponent_seq()
    assert r.horizon == 50 and r.H == pytest.approx(2 - 1 / 50)


def test_load_from_path_and_dict(tmp_path):
    p = tmp_path / "demo.yaml"
    p.write_text(MINIMAL)
    a = load_case(p)
    b = load_case(str(p))
    import yaml

    c = load_case(yaml.safe_load(MINIMAL))
    assert a.setting().to_dict() == b.setting().to_dict() == c.setting().to_dict()


def test_settings_inherit_and_override():
    spec = load_case("""
id: multi
scheme: {u: 1/k, v: "1"}
sequences: {X: crisp(1)}
settings:
  - {name: a}
  - {name: b, modulus: "id + rat", scheme: {u: "1/k^2", v: k}}
""")
    a, b = spec.setting("a"), spec.setting("b")
    assert str(a.modulus) == "id" and str(b.modulus) == "id + rat"
    assert set(b.sequences) == {"X"}
    assert b.to_dict()["scheme"] == {"u": "1 / k^2", "v": "k"}  # canonical printing
    with pytest.raises(KeyError):
        spec.setting("c")


def test_params():
    spec = load_case("""
id: p
scheme: {u: 1/k, v: "1"}
params: [n]
sequences: {X: "crisp(1/n)"}
""")
    st = spec.setting()
    ts = wm.transform(st.sequence("X", {"n": 4}), st.scheme({"n": 4}), 3)
    assert np.all(ts.t == 0.25)


@pytest.mark.parametrize(
    "text, fragment",
    [
        ("id: x\nsequences: {X: crisp(1)}", "scheme needs u and v"),
        ("id: x\nscheme: {u: 1/k, v: '1'}\nsequences: {X: '1/k'}", "sequences.X"),
        ("id: x\nscheme: {u: 1/k +, v: '1'}", "scheme.u"),
        ("id: x\nscheme: {u: 1/k, v: '1'}\nmodulus: pow 3", "modulus"),
        ("- just\n- a list", "mapping"),
        ("id: [unclosed", "invalid YAML"),
        ("id: x\nscheme: {u: 1/k, v: '1'}\nsettings: [{name: a, colour: red}]", "unknown keys"),
    ],
)
def test_errors(text, fragment):
    with pytest.raises((CaseFileError, ValueError)) as exc:
        load_case(text)
    assert fragment in str(exc.value)
