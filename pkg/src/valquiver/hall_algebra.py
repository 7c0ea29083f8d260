"""The twisted Ringel-Hall algebra of a finite-field species.

Scalars live in Q[v]/(v^2 - q).  Basis elements are isomorphism classes,
named by the canonical labels of ``representations``.
"""
from __future__ import annotations

import threading
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Iterable, Mapping

from . import representations as rp
from .errors import ValidationError
from .forms_roots import cartan_matrix, euler_form, symmetric_form
from .quiver_core import DEFAULT_CAP
from .species_tensor import FqSpecies


@dataclass(frozen=True)
class HallScalar:
    """a + b v with v^2 = q."""
    a: Fraction
    b: Fraction
    q: int

    @classmethod
    def of(cls, a, b=0, q: int = 2) -> "HallScalar":
        return cls(Fraction(a), Fraction(b), q)

    def _check(self, other: "HallScalar") -> None:
        if self.q != other.q:
            raise ValidationError("scalars over different q")

    def __add__(self, other):
        if not isinstance(other, HallScalar):
            other = HallScalar.of(other, 0, self.q)
        self._check(other)
        return HallScalar(self.a + other.a, self.b + other.b, self.q)

    __radd__ = __add__

    def __neg__(self):
        return HallScalar(-self.a, -self.b, self.q)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, HallScalar):
            other = HallScalar.of(other, 0, self.q)
        self._check(other)
        return HallScalar(self.a * other.a + self.q * self.b * other.b,
                          self.a * other.b + self.b * other.a, self.q)

    __rmul__ = __mul__

    def inverse(self) -> "HallScalar":
        norm = self.a * self.a - self.q * self.b * self.b
        if norm == 0:
            raise ZeroDivisionError("scalar is not invertible")
        return HallScalar(self.a / norm, -self.b / norm, self.q)

    def __truediv__(self, other):
        if not isinstance(other, HallScalar):
            other = HallScalar.of(other, 0, self.q)
        return self * other.inverse()

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def to_json(self) -> dict:
        return {"a": _frac(self.a), "b": _frac(self.b)}

    def __str__(self) -> str:
        return f"{self.a} + {self.b}v"


def _frac(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def v_power(n: int, q: int) -> HallScalar:
    """v^n for any integer n."""
    base = HallScalar.of(0, 1, q) if n >= 0 else HallScalar.of(0, Fraction(1, q), q)
    out = HallScalar.of(1, 0, q)
    for _ in range(abs(n)):
        out = out * base
    return out


# ---------------------------------------------------------------------------
# quantum binomials

def _laurent_mul(x: dict, y: dict) -> dict:
    out = defaultdict(int)
    for i, a in x.items():
        for j, b in y.items():
            out[i + j] += a * b
    return {k: c for k, c in out.items() if c}


def _laurent_add(x: dict, y: dict) -> dict:
    out = defaultdict(int, x)
    for k, c in y.items():
        out[k] += c
    return {k: c for k, c in out.items() if c}


def quantum_binomial_laurent(m: int, k: int) -> dict:
    """[m choose k] as a Laurent polynomial in t (exponent -> coefficient), by q-Pascal."""
    if not 0 <= k <= m:
        raise ValidationError("need 0 <= k <= m")
    row = {0: {0: 1}}
    for n in range(1, m + 1):
        new = {}
        for j in range(0, min(n, k) + 1):
            term = {}
            if j <= n - 1:
                term = _laurent_mul({-j: 1}, row.get(j, {}))
            if j >= 1:
                term = _laurent_add(term, _laurent_mul({n - j: 1}, row.get(j - 1, {})))
            new[j] = term
        row = new
    return row[k]


def quantum_binomial(m: int, k: int, d: int, q: int) -> HallScalar:
    """[m choose k] evaluated at t = v^d."""
    total = HallScalar.of(0, 0, q)
    for exp, c in quantum_binomial_laurent(m, k).items():
        total = total + v_power(exp * d, q) * c
    return total


# ---------------------------------------------------------------------------
# elements

@dataclass(frozen=True)
class HallElement:
    terms: Mapping  # IsoClassLabel -> HallScalar, no zero entries

    @classmethod
    def build(cls, pairs: Iterable) -> "HallElement":
        acc: dict = {}
        for lab, c in pairs:
            acc[lab] = acc[lab] + c if lab in acc else c
        return cls({k: c for k, c in acc.items() if not c.is_zero()})

    def __add__(self, other: "HallElement") -> "HallElement":
        return HallElement.build(list(self.terms.items()) + list(other.terms.items()))

    def __neg__(self):
        return HallElement({k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c: HallScalar) -> "HallElement":
        return HallElement.build((k, c * x) for k, x in self.terms.items())

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        return isinstance(other, HallElement) and dict(self.terms) == dict(other.terms)

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def to_json(self) -> dict:
        return {"terms": [{"class": lab.to_json(), **c.to_json()} for lab, c in sorted(self.terms.items())]}


@dataclass(frozen=True)
class HallTensor:
    terms: Mapping  # (label, label) -> HallScalar

    @classmethod
    def build(cls, pairs: Iterable) -> "HallTensor":
        acc: dict = {}
        for key, c in pairs:
            acc[key] = acc[key] + c if key in acc else c
        return cls({k: c for k, c in acc.items() if not c.is_zero()})

    def __add__(self, other):
        return HallTensor.build(list(self.terms.items()) + list(other.terms.items()))

    def __eq__(self, other):
        return isinstance(other, HallTensor) and dict(self.terms) == dict(other.terms)

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def is_zero(self) -> bool:
        return not self.terms

    def to_json(self) -> dict:
        return {"terms": [{"left": a.to_json(), "right": b.to_json(), **c.to_json()}
                          for (a, b), c in sorted(self.terms.items())]}


# ---------------------------------------------------------------------------
# the algebra

class HallAlgebra:
    """Structure constants of H(s) at q = |base field|, computed on demand and memoized."""

    def __init__(self, species: FqSpecies, cap: int = DEFAULT_CAP):
        self.species = species
        self.q = species.q
        self.cap = cap
        self.shape = species.shape
        self.vertices = tuple(species.shape.quiver.vertices)
        self._lock = threading.Lock()
        self._ext: dict = {}
        self._prod: dict = {}
        self._aut: dict = {}

    # scalars and basis elements
    def scalar(self, a, b=0) -> HallScalar:
        return HallScalar.of(a, b, self.q)

    def zero_label(self) -> rp.IsoClassLabel:
        return rp.IsoClassLabel(tuple(0 for _ in self.vertices), 0)

    def one(self) -> HallElement:
        return HallElement({self.zero_label(): self.scalar(1)})

    def zero(self) -> HallElement:
        return HallElement({})

    def label(self, V: rp.Representation) -> rp.IsoClassLabel:
        return rp.canonical_label(V, self.cap)

    def element(self, V: rp.Representation, c=None) -> HallElement:
        return HallElement({self.label(V): c if c is not None else self.scalar(1)})

    def simple(self, v: str) -> HallElement:
        return self.element(rp.simple(self.species, v))

    def rep(self, lab: rp.IsoClassLabel) -> rp.Representation:
        return rp.label_representation(self.species, lab)

    def classes(self, dims) -> list:
        return rp.enumerate_reps(self.species, dims, self.cap)

    # memoized tables
    def aut(self, lab: rp.IsoClassLabel) -> int:
        """|Aut| by orbit-stabilizer: |prod GL| / |orbit|."""
        with self._lock:
            hit = self._aut.get(lab)
        if hit is None:
            table = rp.orbit_table(self.species, lab.dims, self.cap)
            hit = rp.group_order(self.species, lab.dims) // table.sizes[lab.code]
            with self._lock:
                self._aut[lab] = hit
        return hit

    def extensions(self, C: rp.IsoClassLabel, sub_dims: tuple) -> dict:
        """(quotient label, sub label) -> number of such subrepresentations of C."""
        key = (C, sub_dims)
        with self._lock:
            hit = self._ext.get(key)
        if hit is None:
            hit = dict(rp.extension_table(self.rep(C), sub_dims, self.cap))
            with self._lock:
                self._ext[key] = hit
        return hit

    def hall_number(self, A, B, C) -> int:
        return self.extensions(C, B.dims).get((A, B), 0)

    def euler(self, x: tuple, y: tuple) -> int:
        return euler_form(self.shape, x, y)

    def symmetric(self, x: tuple, y: tuple) -> int:
        return symmetric_form(self.shape, x, y)

    # products
    def basis_product(self, A: rp.IsoClassLabel, B: rp.IsoClassLabel) -> HallElement:
        key = (A, B)
        with self._lock:
            hit = self._prod.get(key)
        if hit is not None:
            return hit
        dims = tuple(a + b for a, b in zip(A.dims, B.dims))
        twist = v_power(self.euler(A.dims, B.dims), self.q)
        pairs = []
        for C in self.classes(dims):
            g = self.hall_number(A, B, C)
            if g:
                pairs.append((C, twist * g))
        result = HallElement.build(pairs)
        with self._lock:
            self._prod[key] = result
        return result

    def product(self, x: HallElement, y: HallElement) -> HallElement:
        pairs = []
        for A, a in x.terms.items():
            for B, b in y.terms.items():
                for C, c in self.basis_product(A, B).terms.items():
                    pairs.append((C, a * b * c))
        return HallElement.build(pairs)

    def power(self, x: HallElement, n: int) -> HallElement:
        out = self.one()
        for _ in range(n):
            out = self.product(out, x)
        return out

    def monomial(self, word: Iterable[str]) -> HallElement:
        out = self.one()
        for v in word:
            out = self.product(out, self.simple(v))
        return out

    # coproduct and form
    def basis_delta(self, A: rp.IsoClassLabel) -> HallTensor:
        pairs = []
        aut_a = self.aut(A)
        for sub in product(*(range(n + 1) for n in A.dims)):
            for (B, C), g in self.extensions(A, tuple(sub)).items():
                coeff = v_power(self.euler(B.dims, C.dims), self.q) * Fraction(g * self.aut(B) * self.aut(C), aut_a)
                pairs.append(((B, C), coeff))
        return HallTensor.build(pairs)

    def delta(self, x: HallElement) -> HallTensor:
        pairs = []
        for A, a in x.terms.items():
            for key, c in self.basis_delta(A).terms.items():
                pairs.append((key, a * c))
        return HallTensor.build(pairs)

    def form(self, x: HallElement, y: HallElement) -> HallScalar:
        total = self.scalar(0)
        for A, a in x.terms.items():
            b = y.terms.get(A)
            if b is not None:
                total = total + a * b * Fraction(1, self.aut(A))
        return total

    def tensor(self, x: HallElement, y: HallElement) -> HallTensor:
        return HallTensor.build(((A, B), a * b) for A, a in x.terms.items() for B, b in y.terms.items())

    def tensor_product(self, s: HallTensor, t: HallTensor) -> HallTensor:
        """(a (x) b)(c (x) d) = v^{(deg b, deg c)} ac (x) bd."""
        pairs = []
        for (a, b), x in s.terms.items():
            for (c, d), y in t.terms.items():
                twist = v_power(self.symmetric(b.dims, c.dims), self.q)
                ac = self.basis_product(a, c)
                bd = self.basis_product(b, d)
                for A, s1 in ac.terms.items():
                    for B, s2 in bd.terms.items():
                        pairs.append(((A, B), twist * x * y * s1 * s2))
        return HallTensor.build(pairs)

    def tensor_form(self, s: HallTensor, t: HallTensor) -> HallScalar:
        total = self.scalar(0)
        for (a, b), x in s.terms.items():
            y = t.terms.get((a, b))
            if y is not None:
                total = total + x * y * Fraction(1, self.aut(a) * self.aut(b))
        return total

    def degree(self, x: HallElement) -> set:
        return {lab.dims for lab in x.terms}


def hall_product(alg: HallAlgebra, x: HallElement, y: HallElement) -> HallElement:
    return alg.product(x, y)


def comultiplication(alg: HallAlgebra, x: HallElement) -> HallTensor:
    return alg.delta(x)


def green_form(alg: HallAlgebra, x: HallElement, y: HallElement) -> HallScalar:
    return alg.form(x, y)


def serre_element(alg: HallAlgebra, i: str, j: str) -> HallElement:
    if i == j:
        raise ValidationError("Serre relations need two distinct vertices")
    C = cartan_matrix(alg.shape)
    pos = {v: k for k, v in enumerate(C.vertices)}
    n = 1 - C[pos[i], pos[j]]
    d = alg.shape.d[i]
    Ei, Ej = alg.simple(i), alg.simple(j)
    total = alg.zero()
    for k in range(n + 1):
        coeff = quantum_binomial(n, k, d, alg.q) * (-1) ** k
        term = alg.product(alg.product(alg.power(Ei, k), Ej), alg.power(Ei, n - k))
        total = total + term.scale(coeff)
    return total


def serre_check(alg: HallAlgebra, i: str, j: str) -> bool:
    return serre_element(alg, i, j).is_zero()


def simple_monomials(vertices, max_degree: int) -> list[tuple]:
    out = [()]
    for n in range(1, max_degree + 1):
        out += [w for w in product(vertices, repeat=n)]
    return out


@dataclass
class BialgebraReport:
    associativity: list = field(default_factory=list)
    delta_multiplicative: list = field(default_factory=list)
    adjointness: list = field(default_factory=list)
    grading: list = field(default_factory=list)
    checked: int = 0

    @property
    def passed(self) -> bool:
        return not (self.associativity or self.delta_multiplicative or self.adjointness or self.grading)

    def to_json(self) -> dict:
        return {"pass": self.passed, "checked": self.checked,
                "failures": {"associativity": self.associativity, "delta_multiplicative": self.delta_multiplicative,
                             "adjointness": self.adjointness, "grading": self.grading}}


def bialgebra_checks(alg: HallAlgebra, words: Iterable[tuple], max_degree: int | None = None) -> BialgebraReport:
    """Check the bialgebra conditions on products of simple monomials.

    Triples (a, b, c) of the given words are used for associativity and
    adjointness and pairs for multiplicativity of the coproduct; with
    ``max_degree`` only combinations of that total degree or less are tried.
    """
    words = list(words)
    rep = BialgebraReport()
    elems = {w: alg.monomial(w) for w in words}
    limit = max_degree if max_degree is not None else float("inf")
    for w in words:
        x = elems[w]
        want = tuple(sum(1 for c in w if c == v) for v in alg.vertices)
        if any(lab.dims != want for lab in x.terms):
            rep.grading.append(list(w))
        if any(lab.dims != tuple(b + c for b, c in zip(B.dims, C.dims))
               for lab in x.terms for (B, C) in alg.basis_delta(lab).terms):
            rep.grading.append(list(w))
    for a, b in product(words, repeat=2):
        if len(a) + len(b) > limit:
            continue
        lhs = alg.delta(alg.product(elems[a], elems[b]))
        rhs = alg.tensor_product(alg.delta(elems[a]), alg.delta(elems[b]))
        rep.checked += 1
        if lhs != rhs:
            rep.delta_multiplicative.append([list(a), list(b)])
    for a, b, c in product(words, repeat=3):
        if len(a) + len(b) + len(c) > limit:
            continue
        xa, xb, xc = elems[a], elems[b], elems[c]
        rep.checked += 1
        if alg.product(alg.product(xa, xb), xc) != alg.product(xa, alg.product(xb, xc)):
            rep.associativity.append([list(a), list(b), list(c)])
        if len(a) == len(b) + len(c):
            if alg.tensor_form(alg.delta(xa), alg.tensor(xb, xc)) != alg.form(xa, alg.product(xb, xc)):
                rep.adjointness.append([list(a), list(b), list(c)])
    return rep
