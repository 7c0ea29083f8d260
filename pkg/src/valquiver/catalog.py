"""Small named quivers and valued quivers used by tests, acceptance and the CLI."""
from __future__ import annotations

from .quiver_core import AbsValuedQuiver, Quiver, QuiverAutomorphism


def five_vertex_fold() -> tuple[Quiver, QuiverAutomorphism]:
    """Star-like quiver 1 -> {2, 4}, with double arrows 2 -> 3 and 4 -> 5; sigma swaps the branches."""
    q = Quiver.build("12345", [("a1", "1", "2"), ("a2", "1", "4"), ("a3", "2", "3"),
                               ("a4", "2", "3"), ("a5", "4", "5"), ("a6", "4", "5")])
    s = QuiverAutomorphism({"1": "1", "2": "4", "3": "5", "4": "2", "5": "3"},
                           {"a1": "a2", "a2": "a1", "a3": "a5", "a5": "a3", "a4": "a6", "a6": "a4"})
    return q, s


def five_vertex_fold_crossed() -> tuple[Quiver, QuiverAutomorphism]:
    """Same fold as ``five_vertex_fold`` but with crossed second-level arrows."""
    q = Quiver.build("abcde", [("b1", "a", "b"), ("b2", "a", "d"), ("b3", "b", "c"),
                               ("b4", "b", "e"), ("b5", "d", "c"), ("b6", "d", "e")])
    s = QuiverAutomorphism({"a": "a", "b": "d", "c": "e", "d": "b", "e": "c"},
                           {"b1": "b2", "b2": "b1", "b3": "b6", "b6": "b3", "b4": "b5", "b5": "b4"})
    return q, s


def complete_bipartite_3_2() -> tuple[Quiver, QuiverAutomorphism]:
    """Three sources each joined to two sinks; sigma cycles the sources and swaps the sinks."""
    sources, sinks = ["s1", "s2", "s3"], ["t1", "t2"]
    arrows = [(f"{s}{t}", s, t) for s in sources for t in sinks]
    q = Quiver.build(sources + sinks, arrows)
    vm = {"s1": "s2", "s2": "s3", "s3": "s1", "t1": "t2", "t2": "t1"}
    am = {f"{s}{t}": f"{vm[s]}{vm[t]}" for s in sources for t in sinks}
    return q, QuiverAutomorphism(vm, am)


def swapped_outer_a3() -> tuple[Quiver, QuiverAutomorphism]:
    """1 -> 2 <- 3 with sigma swapping the outer vertices and the two arrows."""
    q = Quiver.build("123", [("alpha", "1", "2"), ("beta", "3", "2")])
    s = QuiverAutomorphism({"1": "3", "2": "2", "3": "1"}, {"alpha": "beta", "beta": "alpha"})
    return q, s


def a2() -> AbsValuedQuiver:
    return AbsValuedQuiver.build({"1": 1, "2": 1}, [("a", "1", "2", 1)])


def kronecker() -> AbsValuedQuiver:
    return AbsValuedQuiver.build({"1": 1, "2": 1}, [("a", "1", "2", 1), ("b", "1", "2", 1)])


def b2() -> AbsValuedQuiver:
    return AbsValuedQuiver.build({"1": 1, "2": 2}, [("a", "1", "2", 2)])


def g2() -> AbsValuedQuiver:
    return AbsValuedQuiver.build({"1": 1, "2": 3}, [("a", "1", "2", 3)])


def three_six_two() -> AbsValuedQuiver:
    """(3) --6--> (2)."""
    return AbsValuedQuiver.build({"1": 3, "2": 2}, [("a", "1", "2", 6)])


def two_three_six() -> AbsValuedQuiver:
    """(2) --6--> (3)."""
    return AbsValuedQuiver.build({"1": 2, "2": 3}, [("a", "1", "2", 6)])


def halving_arrow() -> AbsValuedQuiver:
    """(2) --2--> (1)."""
    return AbsValuedQuiver.build({"1": 2, "2": 1}, [("rho", "1", "2", 2)])


def doubled_halving_arrow() -> AbsValuedQuiver:
    """(4) --4--> (2)."""
    return AbsValuedQuiver.build({"1": 4, "2": 2}, [("rho", "1", "2", 4)])


def halving_chain() -> AbsValuedQuiver:
    """(4) --4--> (2) --2--> (1)."""
    return AbsValuedQuiver.build({"1": 4, "2": 2, "3": 1},
                                 [("alpha", "1", "2", 4), ("beta", "2", "3", 2)])
