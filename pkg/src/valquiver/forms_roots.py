"""Bilinear forms, generalized Cartan matrices, Weyl reflections and roots of valued quivers.

Dimension vectors are tuples ordered like ``g.quiver.vertices``; functions also
accept a mapping keyed by vertex.  Relative valued quivers are first lifted to
the absolute valued quiver with coprime vertex values.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Mapping, Sequence, Union

from .errors import NotConnected, SizeLimitExceeded, ValidationError
from .quiver_core import DEFAULT_CAP, AbsValuedQuiver, RelValuedQuiver, is_connected, lift_relative

FINITE, AFFINE, INDEFINITE = "Finite", "Affine", "Indefinite"


class IndexMismatch(ValidationError):
    pass


class LoopPresent(ValidationError):
    pass


Valued = Union[AbsValuedQuiver, RelValuedQuiver]
VectorLike = Union[Sequence[int], Mapping[str, int]]


def as_absolute(g: Valued) -> AbsValuedQuiver:
    return lift_relative(g) if isinstance(g, RelValuedQuiver) else g


def vec(g: Valued, x: VectorLike) -> tuple[int, ...]:
    """Normalize ``x`` to a tuple in vertex order."""
    verts = as_absolute(g).quiver.vertices
    if isinstance(x, Mapping):
        if set(x) - set(verts):
            raise IndexMismatch("vector has entries for unknown vertices: " + ", ".join(sorted(set(x) - set(verts))))
        return tuple(int(x.get(v, 0)) for v in verts)
    x = tuple(int(c) for c in x)
    if len(x) != len(verts):
        raise IndexMismatch(f"vector of length {len(x)} for a quiver with {len(verts)} vertices")
    return x


def basis_vector(g: Valued, i: str) -> tuple[int, ...]:
    verts = as_absolute(g).quiver.vertices
    if i not in verts:
        raise IndexMismatch(f"unknown vertex {i}")
    return tuple(int(v == i) for v in verts)


def euler_form(g: Valued, x: VectorLike, y: VectorLike) -> int:
    g = as_absolute(g)
    x, y = vec(g, x), vec(g, y)
    pos = {v: k for k, v in enumerate(g.quiver.vertices)}
    total = sum(g.d[v] * x[k] * y[k] for v, k in pos.items())
    for a in g.quiver.arrows:
        total -= g.m[a.id] * x[pos[a.tail]] * y[pos[a.head]]
    return total


def symmetric_form(g: Valued, x: VectorLike, y: VectorLike) -> int:
    return euler_form(g, x, y) + euler_form(g, y, x)


def tits_form(g: Valued, x: VectorLike) -> int:
    return euler_form(g, x, x)


def symmetric_matrix(g: Valued) -> list[list[int]]:
    g = as_absolute(g)
    basis = [basis_vector(g, v) for v in g.quiver.vertices]
    return [[symmetric_form(g, a, b) for b in basis] for a in basis]


@dataclass(frozen=True)
class CartanMatrix:
    vertices: tuple
    entries: tuple  # row-major tuple of tuples
    symmetrizer: tuple

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def rows(self) -> list[list[int]]:
        return [list(r) for r in self.entries]

    def symmetrized(self) -> list[list[int]]:
        return [[self.symmetrizer[i] * c for c in row] for i, row in enumerate(self.entries)]

    def to_json(self) -> dict:
        return {"vertices": list(self.vertices), "matrix": self.rows(), "symmetrizer": list(self.symmetrizer)}


def cartan_matrix(g: Valued) -> CartanMatrix:
    g = as_absolute(g)
    verts = g.quiver.vertices
    pos = {v: k for k, v in enumerate(verts)}
    n = len(verts)
    c = [[2 if i == j else 0 for j in range(n)] for i in range(n)]
    for a in g.quiver.arrows:
        if a.tail == a.head:
            raise LoopPresent(f"arrow {a.id} is a loop")
        if g.m[a.id] % g.d[a.tail] or g.m[a.id] % g.d[a.head]:
            raise ValidationError(f"arrow {a.id}: value {g.m[a.id]} is not a multiple of both end values")
        i, j = pos[a.tail], pos[a.head]
        c[i][j] -= g.m[a.id] // g.d[a.tail]
        c[j][i] -= g.m[a.id] // g.d[a.head]
    return CartanMatrix(tuple(verts), tuple(tuple(r) for r in c), tuple(g.d[v] for v in verts))


def simple_reflection(g: Valued, i: str, x: VectorLike) -> tuple[int, ...]:
    """r_i(x) = x - 2 (x, e_i)/(e_i, e_i) e_i."""
    g = as_absolute(g)
    x = vec(g, x)
    ei = basis_vector(g, i)
    num = 2 * symmetric_form(g, x, ei)
    den = symmetric_form(g, ei, ei)
    if num % den:
        raise ArithmeticError("reflection coefficient is not integral")
    k = num // den
    return tuple(a - k * b for a, b in zip(x, ei))


def _closure(g: AbsValuedQuiver, seeds, B: int, cap: int) -> list[tuple[int, ...]]:
    seen, order = set(), []
    queue = deque()
    for s in seeds:
        if s not in seen and max(map(abs, s)) <= B:
            seen.add(s)
            queue.append(s)
    while queue:
        x = queue.popleft()
        order.append(x)
        for v in g.quiver.vertices:
            y = simple_reflection(g, v, x)
            if y not in seen and max(map(abs, y)) <= B:
                seen.add(y)
                if len(seen) > cap:
                    raise SizeLimitExceeded("root enumeration exceeded the cap")
                queue.append(y)
    return order


def real_roots_up_to(g: Valued, B: int, cap: int = DEFAULT_CAP) -> list[tuple[int, ...]]:
    """Real roots with all |coordinates| <= B, sorted."""
    if B < 1:
        raise ValidationError("coordinate bound must be at least 1")
    g = as_absolute(g)
    seeds = []
    for v in g.quiver.vertices:
        e = basis_vector(g, v)
        seeds += [e, tuple(-c for c in e)]
    return sorted(_closure(g, seeds, B, cap))


def positive(roots) -> list[tuple[int, ...]]:
    return sorted(r for r in roots if all(c >= 0 for c in r))


def _support_connected(g: AbsValuedQuiver, x: tuple) -> bool:
    verts = [v for v, c in zip(g.quiver.vertices, x) if c]
    if not verts:
        return False
    vs = set(verts)
    adj = {v: set() for v in verts}
    for a in g.quiver.arrows:
        if a.tail in vs and a.head in vs:
            adj[a.tail].add(a.head)
            adj[a.head].add(a.tail)
    seen, stack = {verts[0]}, [verts[0]]
    while stack:
        for w in adj[stack.pop()]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return seen == vs


def fundamental_set_member(g: Valued, x: VectorLike) -> bool:
    """Nonzero x >= 0 with connected support and (x, e_i) <= 0 for every vertex."""
    g = as_absolute(g)
    x = vec(g, x)
    if any(c < 0 for c in x) or not any(x):
        return False
    if not _support_connected(g, x):
        return False
    return all(symmetric_form(g, x, basis_vector(g, v)) <= 0 for v in g.quiver.vertices)


def fundamental_set_up_to(g: Valued, B: int, cap: int = DEFAULT_CAP) -> list[tuple[int, ...]]:
    g = as_absolute(g)
    n = len(g.quiver.vertices)
    if (B + 1) ** n > cap:
        raise SizeLimitExceeded("fundamental-set search space exceeds the cap")
    return [x for x in product(range(B + 1), repeat=n) if fundamental_set_member(g, x)]


def imaginary_roots_up_to(g: Valued, B: int, cap: int = DEFAULT_CAP) -> list[tuple[int, ...]]:
    """Weyl orbits of the fundamental set and its negative, within coordinate bound B."""
    g = as_absolute(g)
    fund = fundamental_set_up_to(g, B, cap)
    seeds = fund + [tuple(-c for c in x) for x in fund]
    return sorted(_closure(g, seeds, B, cap))


def is_real_root(g: Valued, x: VectorLike, B: int | None = None) -> bool:
    x = vec(g, x)
    bound = B if B is not None else max(1, max(map(abs, x)))
    return x in set(real_roots_up_to(g, bound))


def is_imaginary_root(g: Valued, x: VectorLike, B: int | None = None) -> bool:
    x = vec(g, x)
    bound = B if B is not None else max(1, max(map(abs, x)))
    return x in set(imaginary_roots_up_to(g, bound))


# ---------------------------------------------------------------------------
# exact integer linear algebra

def integer_kernel(rows: list[list[int]]) -> list[tuple[int, ...]]:
    """Lattice basis of {x in Z^n : A x = 0}, in row-echelon (Hermite) form."""
    n = len(rows[0]) if rows else 0
    if n == 0:
        return []
    # column operations on [A ; I]; columns of U above zero columns of A U span the kernel
    A = [list(r) for r in rows]
    U = [[int(i == j) for j in range(n)] for i in range(n)]
    m = len(A)
    col = 0
    for r in range(m):
        if col >= n:
            break
        while True:
            nz = [j for j in range(col, n) if A[r][j]]
            if not nz:
                break
            piv = min(nz, key=lambda j: abs(A[r][j]))
            _swap_cols(A, U, col, piv)
            done = True
            for j in range(col + 1, n):
                if A[r][j]:
                    f = A[r][j] // A[r][col]
                    _addcol(A, U, j, col, -f)
                    if A[r][j]:
                        done = False
            if done:
                col += 1
                break
    kernel = [[U[i][j] for i in range(n)] for j in range(col, n)]
    return _row_hermite(kernel)


def _swap_cols(A, U, i, j):
    for M in (A, U):
        for row in M:
            row[i], row[j] = row[j], row[i]


def _addcol(A, U, dst, src, f):
    for M in (A, U):
        for row in M:
            row[dst] += f * row[src]


def _row_hermite(rows: list[list[int]]) -> list[tuple[int, ...]]:
    rows = [list(r) for r in rows]
    if not rows:
        return []
    n = len(rows[0])
    r = 0
    for c in range(n):
        while True:
            nz = [i for i in range(r, len(rows)) if rows[i][c]]
            if not nz:
                break
            piv = min(nz, key=lambda i: abs(rows[i][c]))
            rows[r], rows[piv] = rows[piv], rows[r]
            others = [i for i in range(r + 1, len(rows)) if rows[i][c]]
            if not others:
                break
            for i in others:
                f = rows[i][c] // rows[r][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        if r < len(rows) and rows[r][c]:
            if rows[r][c] < 0:
                rows[r] = [-a for a in rows[r]]
            for i in range(r):
                f = rows[i][c] // rows[r][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
            r += 1
    return [tuple(x) for x in rows[:r]]


def stable_lattice(g: Valued) -> list[tuple[int, ...]]:
    """Integer basis of the radical of the symmetric form: vectors fixed by every reflection."""
    return integer_kernel(symmetric_matrix(as_absolute(g)))


def _psd_rank(mat: list[list[int]]) -> tuple[bool, int]:
    """(is positive semidefinite, rank) for a symmetric integer matrix, exactly."""
    a = [[Fraction(x) for x in row] for row in mat]
    rank = 0
    while a:
        n = len(a)
        if any(a[i][i] < 0 for i in range(n)):
            return False, rank
        k = next((i for i in range(n) if a[i][i] > 0), None)
        if k is None:
            return all(x == 0 for row in a for x in row), rank
        piv = a[k][k]
        rest = [i for i in range(n) if i != k]
        a = [[a[i][j] - a[i][k] * a[k][j] / piv for j in rest] for i in rest]
        rank += 1
    return True, rank


def classify_type(g: Valued) -> str:
    g = as_absolute(g)
    if not is_connected(g.quiver):
        raise NotConnected("classification needs a connected valued quiver")
    sym = cartan_matrix(g).symmetrized()
    psd, rank = _psd_rank(sym)
    n = len(sym)
    if psd and rank == n:
        return FINITE
    if psd and rank == n - 1:
        return AFFINE
    return INDEFINITE


def determinant(mat: list[list[int]]) -> int:
    a = [[Fraction(x) for x in row] for row in mat]
    n, det = len(a), Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if a[r][c]), None)
        if piv is None:
            return 0
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            det = -det
        det *= a[c][c]
        for r in range(c + 1, n):
            f = a[r][c] / a[c][c]
            a[r] = [x - f * y for x, y in zip(a[r], a[c])]
    return int(det)
