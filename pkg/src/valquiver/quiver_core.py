"""Quivers, valued quivers, automorphisms, folding and unfolding, crushing."""
from __future__ import annotations

import itertools
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, lcm
from typing import Dict, Iterable, Mapping, Optional

from .errors import NotConnected, SizeLimitExceeded, ValidationError

DEFAULT_CAP = 10 ** 6


class InvalidQuiver(ValidationError):
    pass


class InvalidAutomorphism(ValidationError):
    pass


class InconsistentValuation(ValidationError):
    pass


@dataclass(frozen=True)
class Arrow:
    id: str
    tail: str
    head: str


@dataclass(frozen=True)
class Quiver:
    vertices: tuple
    arrows: tuple

    @classmethod
    def build(cls, vertices: Iterable, arrows: Iterable) -> "Quiver":
        """Build from vertex ids and (id, tail, head) triples."""
        arr = tuple(a if isinstance(a, Arrow) else Arrow(str(a[0]), str(a[1]), str(a[2])) for a in arrows)
        return cls(tuple(str(v) for v in vertices), arr)

    @property
    def arrow_ids(self) -> tuple:
        return tuple(a.id for a in self.arrows)

    def arrow(self, aid: str) -> Arrow:
        for a in self.arrows:
            if a.id == aid:
                return a
        raise KeyError(aid)

    def tail(self, aid: str) -> str:
        return self.arrow(aid).tail

    def head(self, aid: str) -> str:
        return self.arrow(aid).head

    def arrow_map(self) -> Dict[str, Arrow]:
        return {a.id: a for a in self.arrows}

    def opposite(self) -> "Quiver":
        return Quiver(self.vertices, tuple(Arrow(a.id, a.head, a.tail) for a in self.arrows))


@dataclass(frozen=True)
class AbsValuedQuiver:
    quiver: Quiver
    d: Mapping
    m: Mapping

    @classmethod
    def build(cls, d: Mapping, arrows: Iterable) -> "AbsValuedQuiver":
        """``d`` maps vertex -> value; arrows are (id, tail, head, m)."""
        arrows = list(arrows)
        q = Quiver.build(list(d), [a[:3] for a in arrows])
        return cls(q, {str(k): int(v) for k, v in d.items()}, {str(a[0]): int(a[3]) for a in arrows})

    @classmethod
    def trivial(cls, q: Quiver) -> "AbsValuedQuiver":
        return cls(q, {v: 1 for v in q.vertices}, {a.id: 1 for a in q.arrows})

    def __eq__(self, other):
        return (isinstance(other, AbsValuedQuiver) and self.quiver == other.quiver
                and dict(self.d) == dict(other.d) and dict(self.m) == dict(other.m))

    def __hash__(self):
        return hash((self.quiver, tuple(sorted(self.d.items())), tuple(sorted(self.m.items()))))


@dataclass(frozen=True)
class RelValuedQuiver:
    quiver: Quiver
    dval: Mapping  # arrow -> (d_ij, d_ji) for rho: i -> j

    @classmethod
    def build(cls, vertices: Iterable, arrows: Iterable) -> "RelValuedQuiver":
        """Arrows are (id, tail, head, d_ij, d_ji)."""
        arrows = list(arrows)
        q = Quiver.build(vertices, [a[:3] for a in arrows])
        return cls(q, {str(a[0]): (int(a[3]), int(a[4])) for a in arrows})

    def __eq__(self, other):
        return (isinstance(other, RelValuedQuiver) and self.quiver == other.quiver
                and {k: tuple(v) for k, v in self.dval.items()} == {k: tuple(v) for k, v in other.dval.items()})

    def __hash__(self):
        return hash((self.quiver, tuple(sorted((k, tuple(v)) for k, v in self.dval.items()))))


@dataclass(frozen=True)
class QuiverAutomorphism:
    vertex_map: Mapping
    arrow_map: Mapping

    @classmethod
    def identity(cls, q: Quiver) -> "QuiverAutomorphism":
        return cls({v: v for v in q.vertices}, {a.id: a.id for a in q.arrows})

    def __eq__(self, other):
        return (isinstance(other, QuiverAutomorphism) and dict(self.vertex_map) == dict(other.vertex_map)
                and dict(self.arrow_map) == dict(other.arrow_map))

    def __hash__(self):
        return hash((tuple(sorted(self.vertex_map.items())), tuple(sorted(self.arrow_map.items()))))

    def power(self, k: int) -> "QuiverAutomorphism":
        vm = {v: v for v in self.vertex_map}
        am = {a: a for a in self.arrow_map}
        if k < 0:
            inv = self.inverse()
            return inv.power(-k)
        for _ in range(k):
            vm = {v: self.vertex_map[w] for v, w in vm.items()}
            am = {a: self.arrow_map[b] for a, b in am.items()}
        return QuiverAutomorphism(vm, am)

    def inverse(self) -> "QuiverAutomorphism":
        return QuiverAutomorphism({w: v for v, w in self.vertex_map.items()},
                                  {b: a for a, b in self.arrow_map.items()})


@dataclass(frozen=True)
class Path:
    """A path written right to left: ``arrows[0]`` is applied last.

    A trivial path has no arrows and ``tail == head``.
    """
    tail: str
    head: str
    arrows: tuple = ()

    @property
    def length(self) -> int:
        return len(self.arrows)

    def label(self) -> str:
        return "e_" + self.tail if not self.arrows else "*".join(self.arrows)


@dataclass
class ValidationReport:
    violations: list = field(default_factory=list)
    connected: bool = True
    acyclic: bool = True

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        return {"valid": self.ok, "violations": list(self.violations),
                "connected": self.connected, "acyclic": self.acyclic}


# ---------------------------------------------------------------------------
# validation

def _components(vertices, arrows) -> list[set]:
    adj = defaultdict(set)
    for a in arrows:
        adj[a.tail].add(a.head)
        adj[a.head].add(a.tail)
    seen, comps = set(), []
    for v in vertices:
        if v in seen:
            continue
        comp, stack = set(), [v]
        while stack:
            x = stack.pop()
            if x in comp:
                continue
            comp.add(x)
            stack.extend(adj[x] - comp)
        seen |= comp
        comps.append(comp)
    return comps


def is_connected(q: Quiver) -> bool:
    return len(_components(q.vertices, q.arrows)) <= 1


def is_acyclic(q: Quiver) -> bool:
    indeg = Counter(a.head for a in q.arrows)
    out = defaultdict(list)
    for a in q.arrows:
        out[a.tail].append(a.head)
    ready = [v for v in q.vertices if indeg[v] == 0]
    seen = 0
    while ready:
        v = ready.pop()
        seen += 1
        for w in out[v]:
            indeg[w] -= 1
            if indeg[w] == 0:
                ready.append(w)
    return seen == len(q.vertices)


def validate_quiver(q: Quiver) -> ValidationReport:
    rep = ValidationReport()
    vset = set()
    for v in q.vertices:
        if not isinstance(v, str):
            rep.violations.append(f"vertex id {v!r} is not a string")
        if v in vset:
            rep.violations.append(f"duplicate vertex {v}")
        vset.add(v)
    aset = set()
    good = []
    for a in q.arrows:
        if a.id in aset:
            rep.violations.append(f"duplicate arrow {a.id}")
        aset.add(a.id)
        if a.tail not in vset or a.head not in vset:
            rep.violations.append(f"unknown endpoint on arrow {a.id}")
            continue
        if a.tail == a.head:
            rep.violations.append(f"loop {a.id} at vertex {a.tail}")
        good.append(a)
    rep.connected = len(_components(list(vset), good)) <= 1
    rep.acyclic = is_acyclic(Quiver(tuple(vset), tuple(good)))
    return rep


def validate_abs(g: AbsValuedQuiver) -> ValidationReport:
    rep = validate_quiver(g.quiver)
    for v in g.quiver.vertices:
        dv = g.d.get(v)
        if not isinstance(dv, int) or dv < 1:
            rep.violations.append(f"vertex {v} needs a positive integer value")
    for a in g.quiver.arrows:
        mv = g.m.get(a.id)
        if not isinstance(mv, int) or mv < 1:
            rep.violations.append(f"arrow {a.id} needs a positive integer value")
            continue
        for end in (a.tail, a.head):
            dv = g.d.get(end)
            if isinstance(dv, int) and dv >= 1 and mv % dv:
                rep.violations.append(f"arrow {a.id}: value {mv} is not a multiple of d({end}) = {dv}")
    if set(g.d) - set(g.quiver.vertices):
        rep.violations.append("values given for unknown vertices")
    if set(g.m) - set(g.quiver.arrow_ids):
        rep.violations.append("values given for unknown arrows")
    return rep


def _solve_weights(d: RelValuedQuiver, vertices) -> Dict[str, Fraction]:
    """Propagate d_ij f_j = d_ji f_i over a spanning tree of one component."""
    root = min(vertices)
    f = {root: Fraction(1)}
    nbrs = defaultdict(list)
    for a in d.quiver.arrows:
        if a.tail in vertices:
            nbrs[a.tail].append(a)
            nbrs[a.head].append(a)
    queue = [root]
    tree = set()
    while queue:
        v = queue.pop(0)
        for a in sorted(nbrs[v], key=lambda a: a.id):
            dij, dji = d.dval[a.id]
            if a.tail == v and a.head not in f:
                f[a.head] = f[v] * dji / dij
                tree.add(a.id)
                queue.append(a.head)
            elif a.head == v and a.tail not in f:
                f[a.tail] = f[v] * dij / dji
                tree.add(a.id)
                queue.append(a.tail)
    for a in d.quiver.arrows:
        if a.tail in vertices and a.id not in tree:
            dij, dji = d.dval[a.id]
            if dij * f[a.head] != dji * f[a.tail]:
                raise InconsistentValuation(f"arrow {a.id} closes an inconsistent cycle")
    return f


def validate_relative(d: RelValuedQuiver) -> ValidationReport:
    rep = validate_quiver(d.quiver)
    for a in d.quiver.arrows:
        val = d.dval.get(a.id)
        if (not isinstance(val, (tuple, list)) or len(val) != 2
                or not all(isinstance(x, int) and x >= 1 for x in val)):
            rep.violations.append(f"arrow {a.id} needs a pair of positive integers")
    if rep.ok:
        for comp in _components(d.quiver.vertices, d.quiver.arrows):
            try:
                _solve_weights(d, comp)
            except InconsistentValuation as exc:
                rep.violations.append(str(exc))
    return rep


def _require(rep: ValidationReport, what: str) -> None:
    if not rep.ok:
        raise InvalidQuiver(f"invalid {what}: " + "; ".join(rep.violations))


# ---------------------------------------------------------------------------
# the functor from absolute to relative valuations and its normalized inverse

def functor_F(g: AbsValuedQuiver) -> RelValuedQuiver:
    _require(validate_abs(g), "absolute valued quiver")
    dval = {a.id: (g.m[a.id] // g.d[a.head], g.m[a.id] // g.d[a.tail]) for a in g.quiver.arrows}
    return RelValuedQuiver(g.quiver, dval)


def lift_relative(d: RelValuedQuiver) -> AbsValuedQuiver:
    """The unique absolute valuation with gcd of vertex values 1 mapping to ``d``."""
    rep = validate_quiver(d.quiver)
    _require(rep, "relative valued quiver")
    if not rep.connected:
        raise NotConnected("lift_relative needs a connected quiver")
    if not d.quiver.vertices:
        return AbsValuedQuiver(d.quiver, {}, {})
    f = _solve_weights(d, set(d.quiver.vertices))
    den = lcm(*(x.denominator for x in f.values()))
    ints = {v: int(x * den) for v, x in f.items()}
    g = gcd(*ints.values())
    dv = {v: ints[v] // g for v in d.quiver.vertices}
    m = {a.id: d.dval[a.id][0] * dv[a.head] for a in d.quiver.arrows}
    return AbsValuedQuiver(d.quiver, dv, m)


# ---------------------------------------------------------------------------
# automorphisms, folding, unfolding

def validate_automorphism(q: Quiver, s: QuiverAutomorphism) -> list[str]:
    out = []
    vs, ids = set(q.vertices), set(q.arrow_ids)
    if set(s.vertex_map) != vs or set(s.vertex_map.values()) != vs:
        out.append("vertex map is not a bijection on the vertices")
    if set(s.arrow_map) != ids or set(s.arrow_map.values()) != ids:
        out.append("arrow map is not a bijection on the arrows")
    if out:
        return out
    amap = q.arrow_map()
    for a in q.arrows:
        b = amap[s.arrow_map[a.id]]
        if s.vertex_map[a.tail] != b.tail or s.vertex_map[a.head] != b.head:
            out.append(f"arrow {a.id}: endpoints are not respected")
    return out


def _orbits(perm: Mapping) -> list[list]:
    seen, out = set(), []
    for x in sorted(perm):
        if x in seen:
            continue
        orb, y = [], x
        while y not in seen:
            seen.add(y)
            orb.append(y)
            y = perm[y]
        out.append(orb)
    return out


def vertex_orbits(q: Quiver, s: QuiverAutomorphism) -> list[list]:
    return _orbits(s.vertex_map)


def arrow_orbits(q: Quiver, s: QuiverAutomorphism) -> list[list]:
    return _orbits(s.arrow_map)


def fold(q: Quiver, s: QuiverAutomorphism) -> AbsValuedQuiver:
    """Collapse orbits. Each orbit is labelled by its lexicographically least member."""
    bad = validate_automorphism(q, s)
    if bad:
        raise InvalidAutomorphism("; ".join(bad))
    vorb = {}
    d = {}
    for orb in _orbits(s.vertex_map):
        label = min(orb)
        d[label] = len(orb)
        for v in orb:
            vorb[v] = label
    amap = q.arrow_map()
    arrows, m = [], {}
    for orb in _orbits(s.arrow_map):
        label = min(orb)
        a = amap[label]
        arrows.append(Arrow(label, vorb[a.tail], vorb[a.head]))
        m[label] = len(orb)
    quiver = Quiver(tuple(sorted(d)), tuple(sorted(arrows, key=lambda a: a.id)))
    return AbsValuedQuiver(quiver, d, m)


def _rep(x: int, y: int) -> int:
    """Representative of x mod y in {1, ..., y}."""
    r = x % y
    return r if r else y


def unfold(g: AbsValuedQuiver) -> tuple[Quiver, QuiverAutomorphism]:
    _require(validate_abs(g), "absolute valued quiver")
    verts, vmap = [], {}
    for i in g.quiver.vertices:
        for j in range(1, g.d[i] + 1):
            name = f"v:{i}:{j}"
            verts.append(name)
            vmap[name] = f"v:{i}:{_rep(j + 1, g.d[i])}"
    arrows, amap = [], {}
    for rho in g.quiver.arrows:
        mr, dt, dh = g.m[rho.id], g.d[rho.tail], g.d[rho.head]
        for k in range(1, mr + 1):
            name = f"a:{rho.id}:{k}"
            arrows.append(Arrow(name, f"v:{rho.tail}:{_rep(k, dt)}", f"v:{rho.head}:{_rep(k, dh)}"))
            amap[name] = f"a:{rho.id}:{_rep(k + 1, mr)}"
    return Quiver(tuple(verts), tuple(arrows)), QuiverAutomorphism(vmap, amap)


def strip_unfold_labels(g: AbsValuedQuiver) -> AbsValuedQuiver:
    """Rename orbit labels ``v:x:1`` / ``a:r:1`` (as produced by folding an unfolding) back to x / r."""
    def base(label: str) -> str:
        parts = label.split(":")
        if len(parts) >= 3 and parts[0] in ("v", "a"):
            return ":".join(parts[1:-1])
        return label
    arrows = tuple(Arrow(base(a.id), base(a.tail), base(a.head)) for a in g.quiver.arrows)
    quiver = Quiver(tuple(base(v) for v in g.quiver.vertices), arrows)
    return AbsValuedQuiver(quiver, {base(k): v for k, v in g.d.items()}, {base(k): v for k, v in g.m.items()})


def canonical_order(g: AbsValuedQuiver) -> AbsValuedQuiver:
    q = g.quiver
    return AbsValuedQuiver(Quiver(tuple(sorted(q.vertices)), tuple(sorted(q.arrows, key=lambda a: a.id))),
                           dict(g.d), dict(g.m))


# ---------------------------------------------------------------------------
# crushing

def _parallel_groups(q: Quiver) -> list[tuple[tuple[str, str], list[Arrow]]]:
    groups: dict = {}
    for a in q.arrows:
        groups.setdefault((a.tail, a.head), []).append(a)
    return list(groups.items())


def crushed_arrow_id(ids: Iterable[str]) -> str:
    ids = sorted(ids)
    return ids[0] if len(ids) == 1 else "+".join(ids)


def crush_abs(g: AbsValuedQuiver) -> AbsValuedQuiver:
    arrows, m = [], {}
    for (t, h), group in _parallel_groups(g.quiver):
        aid = crushed_arrow_id(a.id for a in group)
        arrows.append(Arrow(aid, t, h))
        m[aid] = sum(g.m[a.id] for a in group)
    return AbsValuedQuiver(Quiver(g.quiver.vertices, tuple(arrows)), dict(g.d), m)


def crush_rel(d: RelValuedQuiver) -> RelValuedQuiver:
    arrows, dval = [], {}
    for (t, h), group in _parallel_groups(d.quiver):
        aid = crushed_arrow_id(a.id for a in group)
        arrows.append(Arrow(aid, t, h))
        dval[aid] = (sum(d.dval[a.id][0] for a in group), sum(d.dval[a.id][1] for a in group))
    return RelValuedQuiver(Quiver(d.quiver.vertices, tuple(arrows)), dval)


def crush_quiver(q: Quiver) -> Quiver:
    return crush_abs(AbsValuedQuiver.trivial(q)).quiver


# ---------------------------------------------------------------------------
# morphisms of valued quivers

def _is_quiver_morphism(src: Quiver, dst: Quiver, vmap: Mapping, amap: Mapping) -> bool:
    if set(vmap) != set(src.vertices) or set(amap) != set(src.arrow_ids):
        return False
    dmap = dst.arrow_map()
    if not set(vmap.values()) <= set(dst.vertices):
        return False
    for a in src.arrows:
        b = dmap.get(amap[a.id])
        if b is None or vmap[a.tail] != b.tail or vmap[a.head] != b.head:
            return False
    return True


def check_valued_morphism(src, dst, vmap: Mapping, amap: Mapping) -> bool:
    if type(src) is not type(dst):
        raise ValidationError("source and target must be the same flavour of valued quiver")
    if not _is_quiver_morphism(src.quiver, dst.quiver, vmap, amap):
        return False
    if isinstance(src, AbsValuedQuiver):
        return (all(dst.d[vmap[v]] == src.d[v] for v in src.quiver.vertices)
                and all(dst.m[amap[a]] == src.m[a] for a in src.quiver.arrow_ids))
    return all(tuple(dst.dval[amap[a]]) == tuple(src.dval[a]) for a in src.quiver.arrow_ids)


def enumerate_valued_morphisms(src, dst, cap: int = DEFAULT_CAP) -> int:
    """Count morphisms src -> dst in the category matching the inputs' flavour."""
    if type(src) is not type(dst):
        raise ValidationError("source and target must be the same flavour of valued quiver")
    nv, nw = len(src.quiver.vertices), len(dst.quiver.vertices)
    if nw ** nv > cap:
        raise SizeLimitExceeded(f"{nw}^{nv} candidate vertex maps exceed the cap {cap}")
    absolute = isinstance(src, AbsValuedQuiver)

    def value(g, aid):
        return g.m[aid] if absolute else tuple(g.dval[aid])

    by_ends = defaultdict(list)
    for b in dst.quiver.arrows:
        by_ends[(b.tail, b.head)].append(value(dst, b.id))
    total = 0
    for images in itertools.product(dst.quiver.vertices, repeat=nv):
        vmap = dict(zip(src.quiver.vertices, images))
        if absolute and any(dst.d[vmap[v]] != src.d[v] for v in src.quiver.vertices):
            continue
        count = 1
        for a in src.quiver.arrows:
            count *= sum(1 for val in by_ends[(vmap[a.tail], vmap[a.head])] if val == value(src, a.id))
            if not count:
                break
        total += count
    return total


# ---------------------------------------------------------------------------
# paths

def paths_up_to(q: Quiver, L: int) -> Dict[int, list]:
    """All paths of length 0..L grouped by length."""
    out = {0: [Path(v, v) for v in q.vertices]}
    by_tail = defaultdict(list)
    for a in q.arrows:
        by_tail[a.tail].append(a)
    for n in range(1, L + 1):
        nxt = []
        for p in out[n - 1]:
            for a in by_tail[p.head]:
                nxt.append(Path(p.tail, a.head, (a.id,) + p.arrows))
        out[n] = nxt
    return out


def apply_to_path(s: QuiverAutomorphism, p: Path) -> Path:
    return Path(s.vertex_map[p.tail], s.vertex_map[p.head], tuple(s.arrow_map[a] for a in p.arrows))


def path_orbits(q: Quiver, s: QuiverAutomorphism, L: int) -> Dict[int, list]:
    paths = paths_up_to(q, L)
    out = {}
    for n, plist in paths.items():
        seen, orbs = set(), []
        for p in plist:
            if p in seen:
                continue
            orb, x = [], p
            while x not in seen:
                seen.add(x)
                orb.append(x)
                x = apply_to_path(s, x)
            orbs.append(orb)
        out[n] = orbs
    return out


def sigma_orbit_count(q: Quiver, s: QuiverAutomorphism, L: int) -> list[int]:
    bad = validate_automorphism(q, s)
    if bad:
        raise InvalidAutomorphism("; ".join(bad))
    orbs = path_orbits(q, s, L)
    return [len(orbs[n]) for n in range(L + 1)]
