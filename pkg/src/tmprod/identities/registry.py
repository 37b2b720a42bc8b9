"""User registry files: JSON entries that extend (or, explicitly, shadow) the catalog.

Each entry has ``id``, ``weight``, ``n0``, ``factors`` ([[alpha, beta, exp], ...]) and
optionally ``expected`` (closed-form text) and ``family`` ({a_poly, b_poly, m0, C}).
With ``family`` present the product is the transformed double product and
``factors`` is informational.  Factors whose beta is a coefficient list describe
a double product over (m, n); ``m0``, ``outer_weight`` and ``collapsed_rhs``
([A, B], inner product B(m)/A(m)) complete it.
"""

from __future__ import annotations

import json
from pathlib import Path

from ..evaluator import DoubleProductSpec, ProductSpec
from ..polynomials import normalize
from ..sequences import parse_weight
from ..terms import FactoredTerm
from .catalog import FamilyDef, IdentityEntry, InvalidFamily, remark_transform
from .expr import parse_closed_form, to_text


class RegistryError(ValueError):
    pass


def family_to_json(f: FamilyDef) -> dict:
    return {"a_poly": list(f.a_of_m), "b_poly": list(f.b_of_m), "m0": f.m0, "C": f.C}


def entry_to_json(entry: IdentityEntry) -> dict:
    spec = entry.spec
    out = {"id": entry.id}
    if isinstance(spec, DoubleProductSpec):
        out["weight"] = spec.weight.label
        out["n0"] = spec.n0
        out["factors"] = [[a, list(beta), e] for a, beta, e in spec.inner]
        out["m0"] = spec.m0
        out["outer_weight"] = spec.outer_weight.label
        if spec.collapsed_rhs is not None:
            out["collapsed_rhs"] = [list(p) for p in spec.collapsed_rhs]
    else:
        out["weight"] = spec.weight.label
        out["n0"] = spec.n0
        out["factors"] = spec.term.to_triples()
    if entry.expected is not None:
        out["expected"] = to_text(entry.expected)
    if entry.family is not None:
        out["family"] = family_to_json(entry.family)
    return out


def entry_from_json(obj: dict) -> IdentityEntry:
    try:
        id = str(obj["id"])
        expected = obj.get("expected")
        expr = None if expected is None else parse_closed_form(expected)
        if "family" in obj:
            fam = obj["family"]
            f = FamilyDef(normalize(fam["a_poly"]), normalize(fam["b_poly"]), int(fam["m0"]), fam.get("C"))
            if expr is None and f.C is not None:
                expr = parse_closed_form(f.C)
            spec = remark_transform(f)
            return IdentityEntry(id, spec, expr, obj.get("source", "registry"), obj.get("notes", ""), family=f)
        n0 = int(obj.get("n0", 0))
        if any(isinstance(t[1], list) for t in obj["factors"]):
            return IdentityEntry(id, _double_from_json(obj, n0), expr, obj.get("source", "registry"),
                                 obj.get("notes", ""))
        term = FactoredTerm.from_triples([tuple(int(x) for x in t) for t in obj["factors"]], n0)
        spec = ProductSpec(term, parse_weight(obj.get("weight", "epsilon")), n0)
        return IdentityEntry(id, spec, expr, obj.get("source", "registry"), obj.get("notes", ""))
    except (KeyError, TypeError, ValueError, InvalidFamily, SyntaxError) as exc:
        raise RegistryError(f"bad registry entry {obj.get('id', '?') if isinstance(obj, dict) else obj!r}: {exc}") \
            from None


def _double_from_json(obj: dict, n0: int) -> DoubleProductSpec:
    """Factors [alpha, beta_poly, exp] with beta a coefficient list in the outer index m."""
    inner = tuple((int(a), normalize(beta if isinstance(beta, list) else [beta]), int(e))
                  for a, beta, e in obj["factors"])
    rhs = obj.get("collapsed_rhs")
    return DoubleProductSpec(inner, parse_weight(obj.get("weight", "epsilon")),
                             parse_weight(obj.get("outer_weight", "one")), int(obj.get("m0", 1)), n0,
                             None if rhs is None else (normalize(rhs[0]), normalize(rhs[1])))


def load_registry(source) -> list[IdentityEntry]:
    """Entries from a path, a JSON string, a dict, or a list of dicts."""
    if isinstance(source, (str, Path)) and Path(source).exists():
        doc = json.loads(Path(source).read_text())
    elif isinstance(source, str):
        doc = json.loads(source)
    else:
        doc = source
    if isinstance(doc, dict):
        doc = doc.get("entries", [doc])
    entries = [entry_from_json(o) for o in doc]
    ids = [e.id for e in entries]
    dupes = sorted({i for i in ids if ids.count(i) > 1})
    if dupes:
        raise RegistryError(f"duplicate ids in registry: {', '.join(dupes)}")
    return entries


def merge_entries(builtin: list[IdentityEntry], extra: list[IdentityEntry],
                  allow_override: bool = False) -> list[IdentityEntry]:
    """Builtins in catalog order (shadowed ones replaced in place), then new registry ids."""
    by_id = {e.id: e for e in extra}
    clash = [e.id for e in builtin if e.id in by_id]
    if clash and not allow_override:
        raise RegistryError(f"registry shadows builtin ids {', '.join(clash)}; pass --allow-override")
    known = {e.id for e in builtin}
    return [by_id.get(e.id, e) for e in builtin] + [e for e in extra if e.id not in known]
