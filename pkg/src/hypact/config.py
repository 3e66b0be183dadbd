"""Experiment configuration: schema validation and object construction.

A config is one JSON document::

    {"version": 1,
     "groups": {name: {...}}, "actions": {name: {...}},
     "quasimorphisms": {name: {...}}, "extensions": {name: {...}},
     "experiments": [{"name": ..., "command": ..., ...}, ...]}

Unknown fields anywhere are rejected.  Names are resolved lazily by
:class:`Registry`, which memoizes every constructed object.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

import jsonschema

from .errors import ContractError, StructuralError
from .extensions import CenterDecomposition, CentralExtension
from .groups import (AmalgamatedProduct, AnosovTorus, BaumslagSolitar, CyclicGroup, Crystallographic,
                     DirectProduct, Element, FreeAbelian, Group, Heisenberg, QuotientGroup)
from .quasimorph import (Quasimorphism, busemann_quasimorphism, floor_quasimorphism, heisenberg_coordinate,
                         linear_form, residue_quasimorphism, t_exponent)
from .scalar import parse_scalar
from .spaces import (BassSerreTree, CayleyAction, QuasiLine, QuotientSpace, SpaceAction, anosov_uhp_actions,
                     bs_uhp_action)

__all__ = ["CONFIG_VERSION", "COMMANDS", "load_config", "validate_config", "Registry"]

CONFIG_VERSION = 1
MAX_RADIUS = 24

COMMANDS = ("balls", "properness", "cobound", "euler", "retraction", "crysto", "qm", "quotient",
            "dominance", "obstruction")

_words = {"type": "array", "items": {"type": "string"}}
_matrix = {"type": "array", "items": {"type": "array", "items": {"type": "integer"}}}
_name = {"type": "string", "minLength": 1}
_radius = {"type": "integer", "minimum": 0}
_scalar = {"oneOf": [{"type": "integer"}, {"type": "string"}]}


def _obj(required: dict, optional: dict | None = None) -> dict:
    props = {**required, **(optional or {})}
    return {"type": "object", "properties": props, "required": list(required), "additionalProperties": False}


def _family(tag: str, required: dict | None = None, optional: dict | None = None) -> dict:
    return _obj({"family": {"const": tag}, **(required or {})}, {"generators": _words, **(optional or {})})


GROUP_SCHEMA = {"oneOf": [
    _family("heisenberg"),
    _family("bs", {"n": {"type": "integer", "minimum": 2}}),
    _family("crystallographic", {"rank": {"type": "integer", "minimum": 1}, "point_generators": {"type": "array", "items": _matrix}}),
    _family("anosov-torus", {"matrix": _matrix}),
    _family("free-abelian", {"rank": {"type": "integer", "minimum": 1}}),
    _family("cyclic", {"order": {"type": "integer", "minimum": 1}}),
    _family("direct-product", {"factors": {"type": "array", "items": _name, "minItems": 2}}),
    _family("amalgamated-product", {"H": _name, "K": _name, "z_H": _words, "z_K": _words}),
    _family("central-quotient", {"base": _name, "central": _words}),
]}

ACTION_SCHEMA = {"oneOf": [
    _obj({"model": {"const": "uhp"}, "group": _name},
         {"eigendirection": {"enum": ["expanding", "contracting"]}}),
    _obj({"model": {"const": "bass-serre"}, "group": _name}),
    _obj({"model": {"const": "quasi-line"}, "quasimorphism": _name}),
    _obj({"model": {"const": "cayley"}, "group": _name}, {"lineal": {"type": "boolean"}}),
    _obj({"model": {"const": "quotient"}, "base": _name, "central": {"type": "string"}},
         {"window": {"type": "integer", "minimum": 1}}),
]}

QM_SCHEMA = {"oneOf": [
    _obj({"tag": {"const": "coordinate"}, "group": _name, "coordinate": {"enum": ["a", "b"]}}),
    _obj({"tag": {"const": "linear"}, "group": _name, "coefficients": {"type": "array", "items": _scalar}}),
    _obj({"tag": {"const": "t-exponent"}, "group": _name}),
    _obj({"tag": {"const": "floor"}, "group": _name, "coefficients": {"type": "array", "items": _scalar}}),
    _obj({"tag": {"const": "residue"}, "group": _name, "slope": {"type": "integer"},
          "modulus": {"type": "integer", "minimum": 1}}),
    _obj({"tag": {"const": "busemann"}, "action": _name}, {"depth": {"type": "integer", "minimum": 2}}),
]}

SECTION_SCHEMA = {"oneOf": [
    {"const": "normal-form-lift"},
    _obj({"tag": {"const": "normal-form-lift"}}),
    _obj({"tag": {"const": "square-twist"}, "coordinate": {"type": "integer", "minimum": 0},
          "central": {"type": "integer", "minimum": 0}}),
    _obj({"tag": {"const": "parity-twist"}, "coordinate": {"type": "integer", "minimum": 0},
          "torsion": {"type": "integer", "minimum": 0}}),
    _obj({"tag": {"const": "corrupt"}, "generator": {"type": "string"}, "image": {"type": "string"}}),
]}

EXTENSION_SCHEMA = _obj({"group": _name, "free": _words},
                        {"torsion": _words, "section": SECTION_SCHEMA})

_exp_common = {"name": _name}
EXPERIMENT_SCHEMA = {"oneOf": [
    _obj({**_exp_common, "command": {"const": "balls"}, "group": _name, "radius": _radius},
         {"budget": {"type": "integer", "minimum": 1}}),
    _obj({**_exp_common, "command": {"const": "properness"}, "group": _name,
          "actions": {"type": "array", "items": _name, "minItems": 1}, "radius": _radius,
          "thresholds": {"type": "array", "items": _scalar}}),
    _obj({**_exp_common, "command": {"const": "cobound"}, "action": _name, "radius": _radius},
         {"window": _scalar, "rectangle": {"type": "array", "items": _scalar, "minItems": 4, "maxItems": 4},
          "grid": {"type": "integer", "minimum": 1}}),
    _obj({**_exp_common, "command": {"const": "euler"}, "extension": _name, "radius": _radius},
         {"identity_radius": _radius}),
    _obj({**_exp_common, "command": {"const": "retraction"}, "extension": _name,
          "quasimorphisms": {"type": "array", "items": _name}, "radius": _radius}),
    _obj({**_exp_common, "command": {"const": "crysto"}, "rank": {"type": "integer", "minimum": 1},
          "matrices": {"type": "array", "items": _matrix}}),
    _obj({**_exp_common, "command": {"const": "qm"}, "quasimorphisms": {"type": "array", "items": _name, "minItems": 1},
          "radius": _radius},
         {"elements": _words, "exponents": {"type": "array", "items": {"type": "integer", "minimum": 1}},
          "lines": {"type": "array", "items": _name}}),
    _obj({**_exp_common, "command": {"const": "quotient"}, "action": _name, "radius": _radius}),
    _obj({**_exp_common, "command": {"const": "dominance"}, "group": _name, "S": _words, "T": _words,
          "radius": _radius}),
    _obj({**_exp_common, "command": {"const": "obstruction"}, "group": _name, "radius": _radius}),
]}

CONFIG_SCHEMA = {
    "type": "object",
    "properties": {
        "version": {"const": CONFIG_VERSION},
        "groups": {"type": "object", "additionalProperties": GROUP_SCHEMA},
        "actions": {"type": "object", "additionalProperties": ACTION_SCHEMA},
        "quasimorphisms": {"type": "object", "additionalProperties": QM_SCHEMA},
        "extensions": {"type": "object", "additionalProperties": EXTENSION_SCHEMA},
        "experiments": {"type": "array", "items": EXPERIMENT_SCHEMA},
    },
    "required": ["version", "experiments"],
    "additionalProperties": False,
}


def validate_config(data: Any) -> dict:
    """Check ``data`` against the schema; raises :class:`ContractError` with a one-line reason."""
    validator = jsonschema.Draft202012Validator(CONFIG_SCHEMA)
    error = jsonschema.exceptions.best_match(validator.iter_errors(data))
    if error is not None:
        where = "/".join(str(p) for p in error.absolute_path) or "<root>"
        raise ContractError(f"invalid config at {where}: {error.message}")
    names = [e["name"] for e in data["experiments"]]
    dupes = sorted({n for n in names if names.count(n) > 1})
    if dupes:
        raise ContractError(f"duplicate experiment names: {', '.join(dupes)}")
    for e in data["experiments"]:
        if e.get("radius", 0) > MAX_RADIUS:
            raise ContractError(f"experiment {e['name']}: radius {e['radius']} exceeds the limit {MAX_RADIUS}")
    return data


def load_config(path: str | Path) -> dict:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ContractError(f"cannot read config {path}: {exc.strerror}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ContractError(f"config {path} is not valid JSON: {exc.msg} at line {exc.lineno}") from None
    return validate_config(data)


class Registry:
    """Builds and memoizes the named objects of a validated config."""

    def __init__(self, config: dict):
        self.config = config
        self._groups: dict[str, Group] = {}
        self._actions: dict[str, SpaceAction] = {}
        self._qms: dict[str, Quasimorphism] = {}
        self._exts: dict[str, CentralExtension] = {}
        self._resolving: set[str] = set()

    def _entry(self, section: str, name: str) -> dict:
        entry = self.config.get(section, {}).get(name)
        if entry is None:
            raise ContractError(f"unknown {section[:-1]} reference {name!r}")
        key = f"{section}:{name}"
        if key in self._resolving:
            raise ContractError(f"circular reference through {name!r}")
        return entry

    # -- groups ---------------------------------------------------------------
    def group(self, name: str) -> Group:
        if name in self._groups:
            return self._groups[name]
        entry = self._entry("groups", name)
        self._resolving.add(f"groups:{name}")
        try:
            g = self._build_group(entry)
        finally:
            self._resolving.discard(f"groups:{name}")
        if "generators" in entry:
            g = g.with_generators(entry["generators"])
        self._groups[name] = g
        return g

    def _build_group(self, entry: dict) -> Group:
        fam = entry["family"]
        if fam == "heisenberg":
            return Heisenberg()
        if fam == "bs":
            return BaumslagSolitar(entry["n"])
        if fam == "crystallographic":
            return Crystallographic(entry["rank"], entry["point_generators"])
        if fam == "anosov-torus":
            return AnosovTorus(entry["matrix"])
        if fam == "free-abelian":
            return FreeAbelian(entry["rank"])
        if fam == "cyclic":
            return CyclicGroup(entry["order"])
        if fam == "direct-product":
            return DirectProduct(*[self.group(f) for f in entry["factors"]])
        if fam == "amalgamated-product":
            h, k = self.group(entry["H"]), self.group(entry["K"])
            return AmalgamatedProduct(h, k, [h.word(w) for w in entry["z_H"]], [k.word(w) for w in entry["z_K"]])
        if fam == "central-quotient":
            base = self.group(entry["base"])
            return QuotientGroup(base, [base.word(w) for w in entry["central"]])
        raise ContractError(f"unknown family {fam}")  # unreachable after validation

    # -- quasimorphisms ---------------------------------------------------------
    def quasimorphism(self, name: str) -> Quasimorphism:
        if name in self._qms:
            return self._qms[name]
        entry = self._entry("quasimorphisms", name)
        tag = entry["tag"]
        if tag == "busemann":
            q = busemann_quasimorphism(self.action(entry["action"]), entry.get("depth", 32))
        else:
            g = self.group(entry["group"])
            if tag == "coordinate":
                q = heisenberg_coordinate(_require(g, Heisenberg), entry["coordinate"])
            elif tag == "linear":
                q = linear_form(_require(g, FreeAbelian), _scalars(entry["coefficients"]))
            elif tag == "t-exponent":
                q = t_exponent(g)
            elif tag == "floor":
                q = floor_quasimorphism(_require(g, FreeAbelian), _scalars(entry["coefficients"]))
            else:
                q = residue_quasimorphism(_require(g, FreeAbelian), entry["slope"], entry["modulus"])
        q.name = name
        self._qms[name] = q
        return q

    # -- actions ------------------------------------------------------------------
    def action(self, name: str) -> SpaceAction:
        if name in self._actions:
            return self._actions[name]
        entry = self._entry("actions", name)
        self._resolving.add(f"actions:{name}")
        try:
            a = self._build_action(entry)
        finally:
            self._resolving.discard(f"actions:{name}")
        a.name = name
        self._actions[name] = a
        return a

    def _build_action(self, entry: dict) -> SpaceAction:
        model = entry["model"]
        if model == "uhp":
            g = self.group(entry["group"])
            if isinstance(g, BaumslagSolitar):
                if "eigendirection" in entry:
                    raise ContractError("eigendirection applies to Anosov tori only")
                return bs_uhp_action(g)
            if isinstance(g, AnosovTorus):
                expanding, contracting = anosov_uhp_actions(g)
                return contracting if entry.get("eigendirection") == "contracting" else expanding
            raise ContractError(f"no upper half-plane action for the {g.family} family")
        if model == "bass-serre":
            return BassSerreTree(_require(self.group(entry["group"]), BaumslagSolitar))
        if model == "quasi-line":
            return QuasiLine(self.quasimorphism(entry["quasimorphism"]))
        if model == "cayley":
            return CayleyAction(self.group(entry["group"]), lineal=entry.get("lineal", False))
        base = self.action(entry["base"])
        return QuotientSpace(base, base.group.word(entry["central"]), entry.get("window", 64))

    # -- extensions -----------------------------------------------------------------
    def extension(self, name: str) -> CentralExtension:
        if name in self._exts:
            return self._exts[name]
        entry = self._entry("extensions", name)
        E = self.group(entry["group"])
        center = CenterDecomposition(E, [E.word(w) for w in entry["free"]],
                                     [E.word(w) for w in entry.get("torsion", [])])
        ext = CentralExtension(center, name=name)
        section = entry.get("section", "normal-form-lift")
        if isinstance(section, dict) and section["tag"] != "normal-form-lift":
            ext = ext.with_section(build_section(ext, section), section["tag"], name)
        self._exts[name] = ext
        return ext


def _scalars(values) -> list:
    try:
        return [parse_scalar(v) for v in values]
    except ValueError as exc:
        raise ContractError(str(exc)) from None


def _require(g: Group, cls):
    if not isinstance(g, cls):
        raise ContractError(f"expected a {cls.__name__} group, got {g.family}")
    return g


def _flat(t):
    if isinstance(t, tuple):
        for x in t:
            yield from _flat(x)
    else:
        yield t


def build_section(ext: CentralExtension, entry: dict):
    """Section builders: twists of the normal-form lift by central elements, or a corrupted lift."""
    E, Z = ext.E, ext.Z
    tag = entry["tag"]

    def coord(g: Element) -> int:
        vals = list(_flat(ext.G.lift(g).nf))
        if entry["coordinate"] >= len(vals):
            raise StructuralError(f"normal forms have only {len(vals)} coordinates")
        return vals[entry["coordinate"]]

    if tag == "square-twist":
        z = Z.free[entry["central"]]
        return lambda g: E.mul(ext.G.lift(g), E.power(z, coord(g) ** 2))
    if tag == "parity-twist":
        t = Z.torsion[entry["torsion"]]
        return lambda g: E.mul(ext.G.lift(g), E.power(t, coord(g) % 2))
    # corrupt: one generator is sent to a word that is not a lift of it
    target = ext.G.project(E.word(entry["generator"]))
    image = E.word(entry["image"])
    return lambda g: image if g == target else ext.G.lift(g)
