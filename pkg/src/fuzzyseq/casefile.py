"""Case files: YAML documents describing schemes, moduli, exponents and sequences.

A minimal case::

    id: cesaro_constant
    horizon: 1000
    start_index: 1
    modulus: id
    exponents: "1"
    scheme: {u: 1/k, v: "1"}
    sequences:
      X: crisp(1)

``settings`` may hold a list of mappings with the same keys (plus ``name``);
each inherits anything it does not override from the top level. ``bases``
maps sequence names to a fuzzy expression used as the base point for the
convergent reading of ``c``. ``params`` lists free names (besides ``k``) that
sequences may use, bound at evaluation time.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import yaml

from . import dsl
from . import weighted_mean as wm
from .modulus import ModulusFn
from .spaces import ExponentSeq

_KEYS = {"name", "scheme", "start_index", "modulus", "exponents", "sequences", "bases", "params", "horizon"}


class CaseFileError(ValueError):
    pass


@dataclass(frozen=True)
class Setting:
    name: str
    u: dsl.Node
    v: dsl.Node
    start: int
    modulus: ModulusFn
    exponents: dsl.Node
    sequences: dict = field(default_factory=dict)  # name -> fuzzy Node
    bases: dict = field(default_factory=dict)
    params: tuple = ()
    horizon: int = 1000

    def scheme(self, params=None) -> wm.WeightScheme:
        bound = tuple((params or {}).items())
        return wm.WeightScheme(
            wm.ExprGenerator(self.u, bound),
            wm.ExprGenerator(self.v, bound),
            self.start,
            f"u = {dsl.to_text(self.u)}, v = {dsl.to_text(self.v)}",
        )

    def sequence(self, name: str, params=None) -> wm.ExprSequence:
        return wm.ExprSequence(self.sequences[name], tuple((params or {}).items()))

    def base(self, name: str):
        node = self.bases.get(name)
        if node is None:
            return None
        return dsl.eval_array(node, [self.start])[0]

    def exponent_seq(self, horizon: int | None = None) -> ExponentSeq:
        return ExponentSeq.over(wm.ExprGenerator(self.exponents), self.start, horizon or self.horizon)

    def to_dict(self) -> dict:
        d = {
            "name": self.name,
            "scheme": {"u": dsl.to_text(self.u), "v": dsl.to_text(self.v)},
            "start_index": self.start,
            "modulus": str(self.modulus),
            "exponents": dsl.to_text(self.exponents),
            "horizon": self.horizon,
            "sequences": {k: dsl.to_text(v) for k, v in self.sequences.items()},
        }
        if self.bases:
            d["bases"] = {k: dsl.to_text(v) for k, v in self.bases.items()}
        if self.params:
            d["params"] = list(self.params)
        return d


@dataclass(frozen=True)
class CaseSpec:
    id: str
    title: str
    horizon: int
    settings: tuple[Setting, ...]
    extra: dict = field(default_factory=dict)

    def setting(self, name: str | None = None) -> Setting:
        if name is None:
            return self.settings[0]
        for s in self.settings:
            if s.name == name:
                return s
        raise KeyError(f"case {self.id!r} has no setting {name!r}")


def _parse(text, what, fn, params=()):
    try:
        return fn(str(text), params) if params is not None else fn(str(text))
    except dsl.DslSyntaxError as exc:
        raise CaseFileError(f"{what}: {exc}") from None


def _setting(raw: dict, defaults: dict, name: str) -> Setting:
    unknown = set(raw) - _KEYS
    if unknown:
        raise CaseFileError(f"setting {name!r}: unknown keys {sorted(unknown)}")
    merged = {**defaults, **raw}
    scheme = merged.get("scheme")
    if not isinstance(scheme, dict) or "u" not in scheme or "v" not in scheme:
        raise CaseFileError(f"setting {name!r}: scheme needs u and v")
    params = tuple(merged.get("params", ()) or ())
    seqs = merged.get("sequences") or {}
    if not isinstance(seqs, dict):
        raise CaseFileError(f"setting {name!r}: sequences must be a mapping")
    try:
        modulus = dsl.parse_modulus(str(merged.get("modulus", "id")))
    except dsl.DslSyntaxError as exc:
        raise CaseFileError(f"setting {name!r} modulus: {exc}") from None
    return Setting(
        name=str(merged.get("name", name)),
        u=_parse(scheme["u"], f"{name}.scheme.u", dsl.parse_scalar, params),
        v=_parse(scheme["v"], f"{name}.scheme.v", dsl.parse_scalar, params),
        start=int(merged.get("start_index", 1)),
        modulus=modulus,
        exponents=_parse(merged.get("exponents", "1"), f"{name}.exponents", dsl.parse_scalar, ()),
        sequences={
            k: _parse(v, f"{name}.sequences.{k}", dsl.parse_fuzzy, params) for k, v in seqs.items()
        },
        bases={
            k: _parse(v, f"{name}.bases.{k}", dsl.parse_fuzzy, ())
            for k, v in (merged.get("bases") or {}).items()
        },
        params=params,
        horizon=int(merged.get("horizon", 1000)),
    )


def load_case(source) -> CaseSpec:
    """Load from a path, a YAML string or an already decoded mapping."""
    if isinstance(source, dict):
        doc = source
    else:
        text = Path(source).read_text(encoding="utf-8") if _is_path(source) else str(source)
        try:
            doc = yaml.safe_load(text)
        except yaml.YAMLError as exc:
            raise CaseFileError(f"invalid YAML: {exc}") from None
    if not isinstance(doc, dict):
        raise CaseFileError("a case file must be a mapping")
    top = {k: v for k, v in doc.items() if k in _KEYS - {"name"}}
    raw_settings = doc.get("settings")
    if raw_settings:
        settings = tuple(
            _setting({k: v for k, v in s.items()}, top, s.get("name", f"s{i}"))
            for i, s in enumerate(raw_settings)
        )
    else:
        settings = (_setting({}, top, "main"),)
    extra = {k: v for k, v in doc.items() if k not in _KEYS and k not in ("id", "title", "settings")}
    return CaseSpec(
        id=str(doc.get("id", "case")),
        title=str(doc.get("title", "")),
        horizon=int(doc.get("horizon", 1000)),
        settings=settings,
        extra=extra,
    )


def _is_path(source) -> bool:
    if isinstance(source, Path):
        return True
    s = str(source)
    return "\n" not in s and (s.endswith((".yaml", ".yml")) or Path(s).is_file())
