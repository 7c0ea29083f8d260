"""Strict JSON reading and writing for quivers, automorphisms, species, representations and Hall elements.

Every object field is required and unknown fields are rejected.
"""
from __future__ import annotations

import json
from fractions import Fraction
from typing import Any, Mapping

from .errors import ParseError
from .quiver_core import AbsValuedQuiver, Quiver, QuiverAutomorphism, RelValuedQuiver
from .species_tensor import BimoduleSummand, FqSpecies


def dumps(obj: Any) -> str:
    """Canonical JSON: sorted keys, fixed separators."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def loads(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed JSON: {exc}") from None


def _obj(x, keys: set, where: str, optional: set = frozenset()) -> dict:
    if not isinstance(x, dict):
        raise ParseError(f"{where}: expected an object")
    missing = keys - set(x)
    extra = set(x) - keys - set(optional)
    if missing:
        raise ParseError(f"{where}: missing field(s) {', '.join(sorted(missing))}")
    if extra:
        raise ParseError(f"{where}: unknown field(s) {', '.join(sorted(extra))}")
    return x


def _int(x, where: str) -> int:
    if isinstance(x, bool) or not isinstance(x, int):
        raise ParseError(f"{where}: expected an integer")
    return x


def _str(x, where: str) -> str:
    if not isinstance(x, str):
        raise ParseError(f"{where}: expected a string")
    return x


def _list(x, where: str) -> list:
    if not isinstance(x, list):
        raise ParseError(f"{where}: expected an array")
    return x


# ---------------------------------------------------------------------------
# quivers

def _flavor(doc: dict) -> str:
    arrows = _list(doc["arrows"], "arrows")
    verts = _list(doc["vertices"], "vertices")
    vkeys = {frozenset(v) for v in verts if isinstance(v, dict)}
    akeys = {frozenset(a) for a in arrows if isinstance(a, dict)}
    has_d = any("d" in k for k in vkeys)
    if any("dij" in k or "dji" in k for k in akeys):
        return "relative"
    if has_d or any("m" in k for k in akeys):
        return "absolute"
    return "plain"


def quiver_from_json(doc) -> Quiver | AbsValuedQuiver | RelValuedQuiver:
    """Read any flavor, chosen by which value fields are present."""
    doc = _obj(doc, {"vertices", "arrows"}, "quiver")
    flavor = _flavor(doc)
    vkeys = {"id", "d"} if flavor == "absolute" else {"id"}
    akeys = {"id", "tail", "head"} | ({"m"} if flavor == "absolute" else {"dij", "dji"} if flavor == "relative" else set())
    verts, d = [], {}
    for k, v in enumerate(doc["vertices"]):
        v = _obj(v, vkeys, f"vertices[{k}]")
        vid = _str(v["id"], f"vertices[{k}].id")
        verts.append(vid)
        if flavor == "absolute":
            d[vid] = _int(v["d"], f"vertices[{k}].d")
    if len(set(verts)) != len(verts):
        raise ParseError("duplicate vertex id")
    arrows = []
    for k, a in enumerate(doc["arrows"]):
        a = _obj(a, akeys, f"arrows[{k}]")
        row = [_str(a["id"], f"arrows[{k}].id"), _str(a["tail"], f"arrows[{k}].tail"), _str(a["head"], f"arrows[{k}].head")]
        if flavor == "absolute":
            row.append(_int(a["m"], f"arrows[{k}].m"))
        elif flavor == "relative":
            row += [_int(a["dij"], f"arrows[{k}].dij"), _int(a["dji"], f"arrows[{k}].dji")]
        arrows.append(tuple(row))
    if len({a[0] for a in arrows}) != len(arrows):
        raise ParseError("duplicate arrow id")
    if flavor == "absolute":
        return AbsValuedQuiver(Quiver.build(verts, [a[:3] for a in arrows]), d, {a[0]: a[3] for a in arrows})
    if flavor == "relative":
        return RelValuedQuiver.build(verts, arrows)
    return Quiver.build(verts, arrows)


def plain_quiver(obj) -> Quiver:
    if isinstance(obj, Quiver):
        return obj
    if isinstance(obj, AbsValuedQuiver) and all(x == 1 for x in list(obj.d.values()) + list(obj.m.values())):
        return obj.quiver
    raise ParseError("expected a quiver without values")


def abs_quiver(obj) -> AbsValuedQuiver:
    if isinstance(obj, AbsValuedQuiver):
        return obj
    if isinstance(obj, Quiver):
        return AbsValuedQuiver.trivial(obj)
    raise ParseError("expected an absolute valued quiver")


def rel_quiver(obj) -> RelValuedQuiver:
    if isinstance(obj, RelValuedQuiver):
        return obj
    if isinstance(obj, Quiver):
        return RelValuedQuiver(obj, {a.id: (1, 1) for a in obj.arrows})
    raise ParseError("expected a relative valued quiver")


def quiver_to_json(obj) -> dict:
    if isinstance(obj, AbsValuedQuiver):
        return {"vertices": [{"id": v, "d": obj.d[v]} for v in obj.quiver.vertices],
                "arrows": [{"id": a.id, "tail": a.tail, "head": a.head, "m": obj.m[a.id]} for a in obj.quiver.arrows]}
    if isinstance(obj, RelValuedQuiver):
        return {"vertices": [{"id": v} for v in obj.quiver.vertices],
                "arrows": [{"id": a.id, "tail": a.tail, "head": a.head, "dij": obj.dval[a.id][0], "dji": obj.dval[a.id][1]}
                           for a in obj.quiver.arrows]}
    return {"vertices": [{"id": v} for v in obj.vertices],
            "arrows": [{"id": a.id, "tail": a.tail, "head": a.head} for a in obj.arrows]}


def automorphism_from_json(doc) -> QuiverAutomorphism:
    doc = _obj(doc, {"vertex_map", "arrow_map"}, "automorphism")
    maps = []
    for key in ("vertex_map", "arrow_map"):
        m = doc[key]
        if not isinstance(m, dict):
            raise ParseError(f"{key}: expected an object")
        maps.append({str(k): _str(v, f"{key}.{k}") for k, v in m.items()})
    return QuiverAutomorphism(maps[0], maps[1])


def automorphism_to_json(s: QuiverAutomorphism) -> dict:
    return {"vertex_map": dict(s.vertex_map), "arrow_map": dict(s.arrow_map)}


# ---------------------------------------------------------------------------
# species

def species_from_json(doc, q: int | None = None) -> FqSpecies:
    """Species document, or a valued quiver plus ``q`` for the untwisted species."""
    from .finite_field import prime_power

    if isinstance(doc, dict) and "base" not in doc:
        if q is None:
            raise ParseError("a valued quiver needs --q to become a species")
        p, e = prime_power(q)
        return FqSpecies.untwisted(abs_quiver(quiver_from_json(doc)), p, e)
    doc = _obj(doc, {"base", "vertices", "arrows"}, "species")
    base = _obj(doc["base"], {"p", "e"}, "base")
    p, e = _int(base["p"], "base.p"), _int(base["e"], "base.e")
    if q is not None and q != p ** e:
        raise ParseError(f"--q {q} disagrees with the species base {p}^{e}")
    d = {}
    for k, v in enumerate(_list(doc["vertices"], "vertices")):
        v = _obj(v, {"id", "d"}, f"vertices[{k}]")
        d[_str(v["id"], f"vertices[{k}].id")] = _int(v["d"], f"vertices[{k}].d")
    arrows = []
    for k, a in enumerate(_list(doc["arrows"], "arrows")):
        where = f"arrows[{k}]"
        if isinstance(a, dict) and "summands" in a:
            a = _obj(a, {"id", "tail", "head", "summands"}, where)
            summands = []
            for j, sm in enumerate(_list(a["summands"], where + ".summands")):
                sm = _obj(sm, {"m", "ltwist", "rtwist"}, f"{where}.summands[{j}]")
                summands.append(BimoduleSummand(_int(sm["m"], "m"), _int(sm["ltwist"], "ltwist"), _int(sm["rtwist"], "rtwist")))
        else:
            a = _obj(a, {"id", "tail", "head", "m", "ltwist", "rtwist"}, where)
            summands = [BimoduleSummand(_int(a["m"], where + ".m"), _int(a["ltwist"], where + ".ltwist"),
                                        _int(a["rtwist"], where + ".rtwist"))]
        arrows.append((_str(a["id"], where + ".id"), _str(a["tail"], where + ".tail"), _str(a["head"], where + ".head"), summands))
    if len({a[0] for a in arrows}) != len(arrows) or len(d) != len(doc["vertices"]):
        raise ParseError("duplicate ids")
    return FqSpecies.build(p, e, d, arrows)


def species_to_json(s: FqSpecies) -> dict:
    arrows = []
    for a in s.shape.quiver.arrows:
        summands = s.bimodules[a.id]
        if len(summands) == 1:
            sm = summands[0]
            arrows.append({"id": a.id, "tail": a.tail, "head": a.head, "m": sm.m, "ltwist": sm.ltwist, "rtwist": sm.rtwist})
        else:
            arrows.append({"id": a.id, "tail": a.tail, "head": a.head, "summands": [sm.to_json() for sm in summands]})
    return {"base": {"p": s.p, "e": s.e},
            "vertices": [{"id": v, "d": s.shape.d[v]} for v in s.shape.quiver.vertices], "arrows": arrows}


# ---------------------------------------------------------------------------
# representations and Hall elements

def representation_from_json(doc, s: FqSpecies):
    from .representations import make_representation

    doc = _obj(doc, {"dims", "matrices"}, "representation")
    if not isinstance(doc["dims"], dict) or not isinstance(doc["matrices"], dict):
        raise ParseError("representation: dims and matrices must be objects")
    dims = {k: _int(v, f"dims.{k}") for k, v in doc["dims"].items()}
    return make_representation(s, dims, doc["matrices"])


def label_from_json(doc):
    from .representations import IsoClassLabel

    doc = _obj(doc, {"dims", "code"}, "class")
    return IsoClassLabel(tuple(_int(x, "dims") for x in _list(doc["dims"], "dims")), _int(doc["code"], "code"))


def _fraction(x, where: str) -> Fraction:
    if isinstance(x, int) and not isinstance(x, bool):
        return Fraction(x)
    if not isinstance(x, str):
        raise ParseError(f"{where}: expected a rational string")
    try:
        return Fraction(x)
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"{where}: malformed rational {x!r}") from None


def hall_element_from_json(doc, alg):
    """Terms whose class is either a label {dims, code} or a representation {dims, matrices}."""
    from .hall_algebra import HallElement

    doc = _obj(doc, {"terms"}, "element")
    pairs = []
    for k, t in enumerate(_list(doc["terms"], "terms")):
        t = _obj(t, {"class", "a", "b"}, f"terms[{k}]")
        cls = t["class"]
        if isinstance(cls, dict) and "matrices" in cls:
            lab = alg.label(representation_from_json(cls, alg.species))
        else:
            lab = alg.label(alg.rep(label_from_json(cls)))
        pairs.append((lab, alg.scalar(_fraction(t["a"], f"terms[{k}].a"), _fraction(t["b"], f"terms[{k}].b"))))
    return HallElement.build(pairs)
