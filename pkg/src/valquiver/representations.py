"""Representations of finite-field species, computed by flattening everything to GF(p).

A representation assigns K_i^{n_i} to each vertex and to each arrow a matrix
over K_h of shape n_h x (m n_t / d_h) describing f: M (x)_{K_t} V_t -> V_h.
Tensor columns are indexed k * n_t + j for the basis element b_k (x) v_j,
where b_0, b_1, ... run through the powers of each summand's generator, one
summand after the other.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations, product
from typing import Mapping, Optional

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from . import finite_field as ff
from . import modp
from .errors import SizeLimitExceeded, ValidationError
from .quiver_core import DEFAULT_CAP, Quiver, QuiverAutomorphism, vertex_orbits
from .species_tensor import BimoduleSummand, FqSpecies, SpeciesFields, require_valid


class SpeciesMismatch(ValidationError):
    pass


class NotSigmaConstant(ValidationError):
    pass


# ---------------------------------------------------------------------------
# flattened description of a species

class _ArrowData:
    def __init__(self, ctx: "_Context", aid: str):
        s = ctx.species
        a = s.shape.quiver.arrow(aid)
        self.id, self.tail, self.head = aid, a.tail, a.head
        dt, dh = s.shape.d[a.tail], s.shape.d[a.head]
        self.summands = s.bimodules[aid]
        self.fields = [ctx.sf.field(sm.m) for sm in self.summands]
        self.sizes = [F.n for F in self.fields]
        self.Md = sum(self.sizes)
        self.kh_dim = sum(sm.m // dh for sm in self.summands)
        Kt, Kh = ctx.field[a.tail], ctx.field[a.head]
        self.left_basis = np.stack([self._action(ctx, Kh, dh, c, left=True) for c in range(Kh.n)])
        self.right_basis = np.stack([self._action(ctx, Kt, dt, c, left=False) for c in range(Kt.n)])
        # b_k: powers of each summand generator
        cols = []
        off = 0
        for sm, F, size in zip(self.summands, self.fields, self.sizes):
            A = ff.arith(F)
            x = 1
            for _ in range(sm.m // dh):
                v = np.zeros(self.Md, dtype=np.int64)
                v[off:off + size] = A.vec(x)
                cols.append(v)
                x = A.mul(x, A.gen)
            off += size
        self.b = cols
        Dh = Kh.n
        B = np.zeros((self.Md, self.Md), dtype=np.int64)
        for k, bk in enumerate(cols):
            for c in range(Dh):
                B[:, k * Dh + c] = self.left_basis[c] @ bk % ctx.p
        self.coord = modp.inverse(B, ctx.p)  # M -> K_h coordinates, (k, coefficient) order

    def _action(self, ctx, K, d, c, left):
        """F_p matrix of the left or right action of the basis element x^c of K on M."""
        AK = ff.arith(K)
        k = AK.pow(AK.gen, c) if c else 1
        blocks = []
        for sm, F in zip(self.summands, self.fields):
            inc = ctx.sf.inclusion(d, sm.m)
            twist = sm.ltwist if left else sm.rtwist
            img = ff.arith(F).frob(inc.map_int(k), ctx.e * twist)
            blocks.append(ff.arith(F).mul_matrix(img))
        return modp.block_diag(blocks)

    def right(self, k_vec: np.ndarray, p: int) -> np.ndarray:
        return np.tensordot(k_vec, self.right_basis, axes=1) % p

    def left(self, k_vec: np.ndarray, p: int) -> np.ndarray:
        return np.tensordot(k_vec, self.left_basis, axes=1) % p


class _Context:
    def __init__(self, s: FqSpecies):
        require_valid(s)
        self.species = s
        self.p, self.e = s.p, s.e
        self.sf = SpeciesFields(s)
        self.vertices = tuple(s.shape.quiver.vertices)
        self.field = {v: self.sf.vertex_field(v) for v in self.vertices}
        self.arith = {v: ff.arith(F) for v, F in self.field.items()}
        self.D = {v: F.n for v, F in self.field.items()}
        self.mul_basis = {}
        for v, F in self.field.items():
            A = self.arith[v]
            self.mul_basis[v] = np.stack([A.mul_matrix(A.pow(A.gen, c) if c else 1) for c in range(F.n)])
        self.arrows = {aid: _ArrowData(self, aid) for aid in s.shape.quiver.arrow_ids}
        self.primitive = {v: _primitive_element(F) for v, F in self.field.items()}

    def mul(self, v: str, k: int) -> np.ndarray:
        return self.arith[v].mul_matrix(k)


def _primitive_element(F: ff.FieldDesc) -> int:
    A = ff.arith(F)
    order = F.order - 1
    if order == 1:
        return 1
    primes = ff._prime_factors(order)
    for x in range(1, F.order):
        if all(A.pow(x, order // r) != 1 for r in primes):
            return x
    raise ArithmeticError("no primitive element")


@lru_cache(maxsize=64)
def context(s: FqSpecies) -> _Context:
    return _Context(s)


# ---------------------------------------------------------------------------
# representations

@dataclass(frozen=True)
class Representation:
    species: FqSpecies
    dims: tuple  # (vertex, n) pairs in vertex order
    matrices: tuple  # (arrow id, matrix as tuple of row tuples) in arrow order

    @property
    def dim(self) -> dict:
        return dict(self.dims)

    @property
    def mats(self) -> dict:
        return dict(self.matrices)

    def dim_vector(self) -> tuple:
        return tuple(n for _, n in self.dims)

    def is_zero(self) -> bool:
        return not any(self.dim_vector())

    def to_json(self) -> dict:
        ctx = context(self.species)
        mats = {}
        for aid, mat in self.matrices:
            A = ctx.arith[ctx.arrows[aid].head]
            mats[aid] = [[A.to_coeffs(x) for x in row] for row in mat]
        return {"dims": dict(self.dims), "matrices": mats}


def arrow_shape(s: FqSpecies, aid: str, dims: Mapping) -> tuple[int, int]:
    a = s.shape.quiver.arrow(aid)
    m, dh = s.shape.m[aid], s.shape.d[a.head]
    return dims[a.head], m * dims[a.tail] // dh


def make_representation(s: FqSpecies, dims, matrices: Optional[Mapping] = None) -> Representation:
    """Build a representation; entries are field elements encoded as ints (or coefficient lists)."""
    ctx = context(s)
    if not isinstance(dims, Mapping):
        dims = dict(zip(ctx.vertices, dims))
    if set(dims) - set(ctx.vertices):
        raise ValidationError("dimensions given for unknown vertices")
    dims = {v: int(dims.get(v, 0)) for v in ctx.vertices}
    if any(n < 0 for n in dims.values()):
        raise ValidationError("dimensions must be nonnegative")
    matrices = dict(matrices or {})
    if set(matrices) - set(ctx.arrows):
        raise ValidationError("matrices given for unknown arrows")
    out = []
    for aid, ad in ctx.arrows.items():
        rows, cols = arrow_shape(s, aid, dims)
        A = ctx.arith[ad.head]
        mat = matrices.get(aid)
        if mat is None:
            mat = [[0] * cols for _ in range(rows)]
        mat = [list(r) for r in mat]
        if rows == 0 and mat in ([], [[]]):
            mat = []
        if len(mat) != rows or any(len(r) != cols for r in mat):
            raise ValidationError(f"arrow {aid}: matrix must be {rows} x {cols}")
        fixed = []
        for r in mat:
            row = []
            for x in r:
                val = A.from_coeffs(x) if isinstance(x, (list, tuple)) else int(x)
                if not 0 <= val < A.field.order:
                    raise ValidationError(f"arrow {aid}: entry {x} is not a field element")
                row.append(val)
            fixed.append(tuple(row))
        out.append((aid, tuple(fixed)))
    return Representation(s, tuple((v, dims[v]) for v in ctx.vertices), tuple(out))


def zero_rep(s: FqSpecies) -> Representation:
    return make_representation(s, {})


def simple(s: FqSpecies, v: str) -> Representation:
    if v not in s.shape.quiver.vertices:
        raise ValidationError(f"unknown vertex {v}")
    return make_representation(s, {v: 1})


def dim_vector(V: Representation) -> tuple:
    return V.dim_vector()


def _same_species(V: Representation, W: Representation) -> None:
    if V.species != W.species:
        raise SpeciesMismatch("representations belong to different species")


def direct_sum(V: Representation, W: Representation) -> Representation:
    _same_species(V, W)
    s = V.species
    dv, dw = V.dim, W.dim
    ctx = context(s)
    mats = {}
    for aid, ad in ctx.arrows.items():
        t = ad.tail
        A, B = V.mats[aid], W.mats[aid]
        rows_v, rows_w = dv[ad.head], dw[ad.head]
        nt_v, nt_w = dv[t], dw[t]
        nt = nt_v + nt_w
        mat = [[0] * (ad.kh_dim * nt) for _ in range(rows_v + rows_w)]
        for k in range(ad.kh_dim):
            for i in range(rows_v):
                for j in range(nt_v):
                    mat[i][k * nt + j] = A[i][k * nt_v + j]
            for i in range(rows_w):
                for j in range(nt_w):
                    mat[rows_v + i][k * nt + nt_v + j] = B[i][k * nt_w + j]
        mats[aid] = mat
    return make_representation(s, {v: dv[v] + dw[v] for v in ctx.vertices}, mats)


def direct_sum_all(reps, s: FqSpecies) -> Representation:
    out = zero_rep(s)
    for r in reps:
        out = direct_sum(out, r)
    return out


# ---------------------------------------------------------------------------
# flattening

def _kvec(ctx: _Context, v: str, x: int) -> np.ndarray:
    return ctx.arith[v].vec(x)


def flat_vector(ctx: _Context, v: str, xs) -> np.ndarray:
    D = ctx.D[v]
    out = np.zeros(len(xs) * D, dtype=np.int64)
    for i, x in enumerate(xs):
        out[i * D:(i + 1) * D] = _kvec(ctx, v, x)
    return out


def unflat_vector(ctx: _Context, v: str, vecs: np.ndarray) -> list[int]:
    D = ctx.D[v]
    A = ctx.arith[v]
    return [A.from_vec(vecs[i * D:(i + 1) * D]) for i in range(len(vecs) // D)]


def flat_arrow(V: Representation, aid: str) -> np.ndarray:
    """F_p matrix of f: M^{n_t} -> V_h (slot-major on the source)."""
    ctx = context(V.species)
    ad = ctx.arrows[aid]
    n_t, n_h = V.dim[ad.tail], V.dim[ad.head]
    Dh, Md, p = ctx.D[ad.head], ad.Md, ctx.p
    A = V.mats[aid]
    F = np.zeros((n_h * Dh, n_t * Md), dtype=np.int64)
    for i in range(n_h):
        for j in range(n_t):
            acc = np.zeros((Dh, Md), dtype=np.int64)
            for k in range(ad.kh_dim):
                x = A[i][k * n_t + j]
                if x:
                    acc += ctx.mul(ad.head, x) @ ad.coord[k * Dh:(k + 1) * Dh, :]
            F[i * Dh:(i + 1) * Dh, j * Md:(j + 1) * Md] = acc % p
    return F


def flat_map(ctx: _Context, v: str, phi, shape: Optional[tuple] = None) -> np.ndarray:
    """Block matrix of a K_v-linear map given as a matrix over K_v.

    An empty matrix does not know its column count, so pass shape for those.
    """
    rows, cols = shape or (len(phi), len(phi[0]) if phi else 0)
    D = ctx.D[v]
    out = np.zeros((rows * D, cols * D), dtype=np.int64)
    for i in range(rows):
        for j in range(cols):
            if phi[i][j]:
                out[i * D:(i + 1) * D, j * D:(j + 1) * D] = ctx.mul(v, phi[i][j])
    return out


def tensor_id(ctx: _Context, aid: str, phi, shape: Optional[tuple] = None) -> np.ndarray:
    """id_M (x) phi on M^{n} -> M^{n'} for phi over K_tail."""
    ad = ctx.arrows[aid]
    rows, cols = shape or (len(phi), len(phi[0]) if phi else 0)
    Md, p = ad.Md, ctx.p
    out = np.zeros((rows * Md, cols * Md), dtype=np.int64)
    for i in range(rows):
        for j in range(cols):
            if phi[i][j]:
                out[i * Md:(i + 1) * Md, j * Md:(j + 1) * Md] = ad.right(_kvec(ctx, ad.tail, phi[i][j]), p)
    return out


# ---------------------------------------------------------------------------
# morphisms

@dataclass
class HomSpace:
    source: Representation
    target: Representation
    fp_basis: list  # morphisms forming a GF(p)-basis
    e: int

    @property
    def dim(self) -> int:
        """Dimension over GF(q)."""
        return len(self.fp_basis) // self.e

    def size(self) -> int:
        return self.source.species.p ** len(self.fp_basis)

    def basis(self) -> list:
        """A GF(q)-basis."""
        if self.e == 1:
            return list(self.fp_basis)
        ctx = context(self.source.species)
        fq = ff.gf_make(ctx.p, ctx.e)
        xi = ff.arith(fq).gen
        chosen, span = [], np.zeros((0, 0), dtype=np.int64)
        for phi in self.fp_basis:
            cand = [_scale_morphism(ctx, phi, xi, k) for k in range(self.e)]
            vecs = np.array([_morphism_vector(ctx, c) for c in cand], dtype=np.int64)
            new = vecs if span.size == 0 else np.vstack([span, vecs])
            if modp.rank(new, ctx.p) > (0 if span.size == 0 else modp.rank(span, ctx.p)):
                chosen.append(phi)
                span = new
        return chosen


def _scale_morphism(ctx: _Context, phi: dict, xi: int, k: int) -> dict:
    out = {}
    base = ctx.sf.field(1)
    for v, mat in phi.items():
        A = ctx.arith[v]
        c = A.pow(ctx.sf.inclusion(1, ctx.species.shape.d[v]).map_int(xi), k) if base != ctx.field[v] else A.pow(xi, k)
        out[v] = tuple(tuple(A.mul(c, x) for x in row) for row in mat)
    return out


def _morphism_vector(ctx: _Context, phi: dict) -> list[int]:
    out = []
    for v in ctx.vertices:
        for row in phi[v]:
            for x in row:
                out.extend(int(c) for c in _kvec(ctx, v, x))
    return out


def _unknown_layout(ctx: _Context, V: Representation, W: Representation):
    layout, off = {}, 0
    for v in ctx.vertices:
        size = W.dim[v] * V.dim[v] * ctx.D[v]
        layout[v] = (off, size)
        off += size
    return layout, off


def _vector_to_morphism(ctx: _Context, V, W, x) -> dict:
    layout, _ = _unknown_layout(ctx, V, W)
    out = {}
    for v in ctx.vertices:
        off, _size = layout[v]
        rows, cols, D = W.dim[v], V.dim[v], ctx.D[v]
        mat = []
        for i in range(rows):
            row = []
            for j in range(cols):
                start = off + (i * cols + j) * D
                row.append(ctx.arith[v].from_vec(np.asarray(x[start:start + D]) % ctx.p))
            mat.append(tuple(row))
        out[v] = tuple(mat)
    return out


def morphism_residual(V: Representation, W: Representation, phi: Mapping) -> np.ndarray:
    """Stacked phi_h f - g (id (x) phi_t) over all arrows, flattened."""
    ctx = context(V.species)
    parts = []
    for aid, ad in ctx.arrows.items():
        if not (V.dim[ad.tail] and W.dim[ad.head]):
            continue
        h, t = ad.head, ad.tail
        lhs = flat_map(ctx, h, phi[h], (W.dim[h], V.dim[h])) @ flat_arrow(V, aid)
        rhs = flat_arrow(W, aid) @ tensor_id(ctx, aid, phi[t], (W.dim[t], V.dim[t]))
        parts.append(((lhs - rhs) % ctx.p).ravel())
    return np.concatenate(parts) if parts else np.zeros(0, dtype=np.int64)


def is_morphism(V: Representation, W: Representation, phi: Mapping) -> bool:
    return not morphism_residual(V, W, phi).any()


def hom_space(V: Representation, W: Representation) -> HomSpace:
    """Solve the commuting squares over GF(p).

    The unknowns are the GF(p)-coordinates of the entries of K_i-matrices, so
    K_i-linearity holds by construction.
    """
    _same_species(V, W)
    ctx = context(V.species)
    layout, nunk = _unknown_layout(ctx, V, W)
    if nunk == 0:
        return HomSpace(V, W, [], ctx.e)
    cols = []
    for u in range(nunk):
        x = np.zeros(nunk, dtype=np.int64)
        x[u] = 1
        cols.append(morphism_residual(V, W, _vector_to_morphism(ctx, V, W, x)))
    R = np.array(cols, dtype=np.int64).T
    if R.size == 0:
        kernel = np.eye(nunk, dtype=np.int64)
    else:
        kernel = modp.nullspace(R, ctx.p)
    return HomSpace(V, W, [_vector_to_morphism(ctx, V, W, row) for row in kernel], ctx.e)


def identity_morphism(V: Representation) -> dict:
    return {v: tuple(tuple(int(i == j) for j in range(n)) for i in range(n)) for v, n in V.dims}


# ---------------------------------------------------------------------------
# enumerating a morphism space

def _flat_blocks(ctx: _Context, phi: Mapping) -> dict:
    return {v: flat_map(ctx, v, phi[v]) for v in ctx.vertices}


def _enumerate_combinations(basis_blocks: list[dict], p: int, chunk: int = 1 << 14):
    """Yield (coefficient array, {vertex: batch of block matrices}) over all GF(p)-combinations."""
    k = len(basis_blocks)
    total = p ** k
    verts = list(basis_blocks[0]) if basis_blocks else []
    stacks = {v: np.stack([b[v] for b in basis_blocks]) for v in verts}
    for start in range(0, total, chunk):
        idx = np.arange(start, min(total, start + chunk), dtype=np.int64)
        coeffs = np.zeros((len(idx), k), dtype=np.int64)
        rem = idx.copy()
        for j in range(k - 1, -1, -1):
            coeffs[:, j] = rem % p
            rem //= p
        yield coeffs, {v: np.tensordot(coeffs, stacks[v], axes=1) % p for v in verts}


def batch_invertible(mats: np.ndarray, p: int) -> np.ndarray:
    """Invertibility mod p of each square matrix in a batch."""
    M = mats.copy() % p
    B, n, _ = M.shape
    ok = np.ones(B, dtype=bool)
    inv_table = np.array([0] + [pow(x, p - 2, p) for x in range(1, p)], dtype=np.int64)
    rows = np.arange(B)
    for c in range(n):
        nz = M[:, c:, c] != 0
        has = nz.any(axis=1)
        ok &= has
        piv = np.argmax(nz, axis=1) + c
        top = M[rows, c, :].copy()
        M[rows, c, :] = M[rows, piv, :]
        M[rows, piv, :] = top
        pv = inv_table[M[:, c, c]]
        M[:, c, :] = (M[:, c, :] * pv[:, None]) % p
        factors = M[:, :, c].copy()
        factors[:, c] = 0
        M = (M - factors[:, :, None] * M[:, c, :][:, None, :]) % p
    return ok


def _check_cap(count: int, cap: int, what: str) -> None:
    if count > cap:
        raise SizeLimitExceeded(f"{what} has {count} elements, above the cap {cap}")


def endomorphism_basis(V: Representation) -> list:
    return hom_space(V, V).fp_basis


def _nilpotent(mat: np.ndarray, p: int) -> bool:
    return modp.is_nilpotent(mat, p)


def _whole(ctx, blocks: dict) -> np.ndarray:
    return modp.block_diag([blocks[v] for v in ctx.vertices])


def is_indecomposable(V: Representation, cap: int = DEFAULT_CAP) -> bool:
    """No idempotent endomorphism besides 0 and the identity (exhaustive over End)."""
    if V.is_zero():
        return False
    ctx = context(V.species)
    basis = endomorphism_basis(V)
    blocks = [_flat_blocks(ctx, b) for b in basis]
    for b in blocks:
        whole = _whole(ctx, b)
        if not modp.is_invertible(whole, ctx.p) and not _nilpotent(whole, ctx.p):
            return False  # a Fitting decomposition exists
    _check_cap(ctx.p ** len(basis), cap, "the endomorphism ring")
    for _, batch in _enumerate_combinations(blocks, ctx.p):
        nontrivial = None
        for v, mats in batch.items():
            if mats.shape[1] == 0:
                continue
            sq = np.einsum("bij,bjk->bik", mats, mats) % ctx.p
            idem = (sq == mats).all(axis=(1, 2))
            zero = ~mats.any(axis=(1, 2))
            ident = (mats == np.eye(mats.shape[1], dtype=np.int64)).all(axis=(1, 2))
            if nontrivial is None:
                nontrivial, allzero, allid = idem, zero, ident
            else:
                nontrivial = nontrivial & idem
                allzero, allid = allzero & zero, allid & ident
        if nontrivial is not None and (nontrivial & ~allzero & ~allid).any():
            return False
    return True


def aut_order(V: Representation, cap: int = DEFAULT_CAP) -> int:
    """Number of endomorphisms invertible at every vertex (exhaustive over End)."""
    if V.is_zero():
        return 1
    ctx = context(V.species)
    basis = endomorphism_basis(V)
    _check_cap(ctx.p ** len(basis), cap, "the endomorphism ring")
    return _count_isomorphisms(ctx, [_flat_blocks(ctx, b) for b in basis], stop_at_first=False)


def _count_isomorphisms(ctx: _Context, blocks: list[dict], stop_at_first: bool) -> int:
    count = 0
    if not blocks:
        return 0
    for _, batch in _enumerate_combinations(blocks, ctx.p):
        ok = None
        for v, mats in batch.items():
            if mats.shape[1] == 0:
                continue
            inv = batch_invertible(mats, ctx.p)
            ok = inv if ok is None else ok & inv
        found = int(ok.sum()) if ok is not None else len(next(iter(batch.values())))
        count += found
        if stop_at_first and count:
            return count
    return count


def is_isomorphic(V: Representation, W: Representation, cap: int = DEFAULT_CAP) -> bool:
    """Some morphism V -> W is invertible at every vertex (exhaustive scan of Hom)."""
    _same_species(V, W)
    if V.dim_vector() != W.dim_vector():
        return False
    if V.is_zero():
        return True
    ctx = context(V.species)
    H = hom_space(V, W)
    if not H.fp_basis:
        return False
    _check_cap(H.size(), cap, "the morphism space")
    return _count_isomorphisms(ctx, [_flat_blocks(ctx, b) for b in H.fp_basis], stop_at_first=True) > 0


# ---------------------------------------------------------------------------
# base change and orbit enumeration

def group_order(s: FqSpecies, dims) -> int:
    """|prod_i GL_{n_i}(K_i)|."""
    ctx = context(s)
    dims = dict(zip(ctx.vertices, dims)) if not isinstance(dims, Mapping) else dims
    total = 1
    for v in ctx.vertices:
        Q, n = ctx.field[v].order, dims.get(v, 0)
        for i in range(n):
            total *= Q ** n - Q ** i
    return total


def _kmat_inverse(ctx: _Context, v: str, g):
    n = len(g)
    F = ctx.field[v]
    A = ctx.arith[v]
    aug = [list(g[i]) + [int(i == j) for j in range(n)] for i in range(n)]
    red, piv = ff.ext_rref(aug, F)
    if piv[:n] != list(range(n)):
        raise ZeroDivisionError("matrix is singular")
    return [row[n:] for row in red]


def _tail_coefficients(ctx: _Context, aid: str, n_t: int, g):
    """K_h matrix of id (x) g on M^{n_t} in tensor coordinates."""
    ad = ctx.arrows[aid]
    Dh, Md, p = ctx.D[ad.head], ad.Md, ctx.p
    size = ad.kh_dim * n_t
    P = np.zeros((n_t * Md, n_t * Md), dtype=np.int64)
    for j in range(n_t):
        for k in range(ad.kh_dim):
            P[(k * n_t + j) * Dh:(k * n_t + j + 1) * Dh, j * Md:(j + 1) * Md] = ad.coord[k * Dh:(k + 1) * Dh, :]
    Y = modp.matmul(modp.matmul(P, tensor_id(ctx, aid, g), p), modp.inverse(P, p), p)
    A = ctx.arith[ad.head]
    return [[A.from_vec(Y[r * Dh:(r + 1) * Dh, c * Dh]) for c in range(size)] for r in range(size)]


def _kmatmul(ctx, v, a, b):
    return ff.ext_matmul([list(r) for r in a], [list(r) for r in b], ctx.field[v]) if a and b and b[0] else \
        [[0] * (len(b[0]) if b else 0) for _ in range(len(a))]


def base_change(V: Representation, g: Mapping) -> Representation:
    """The representation g . V with f'_rho = g_h f_rho (id (x) g_t)^{-1}."""
    ctx = context(V.species)
    mats = {}
    for aid, ad in ctx.arrows.items():
        A = [list(r) for r in V.mats[aid]]
        n_t = V.dim[ad.tail]
        if ad.head in g and A:
            A = _kmatmul(ctx, ad.head, g[ad.head], A)
        if ad.tail in g and A and A[0]:
            B = _tail_coefficients(ctx, aid, n_t, _kmat_inverse(ctx, ad.tail, g[ad.tail]))
            A = _kmatmul(ctx, ad.head, A, B)
        mats[aid] = A
    return make_representation(V.species, V.dim, mats)


def _gl_generators(ctx: _Context, v: str, n: int) -> list:
    if n == 0:
        return []
    ident = [[int(i == j) for j in range(n)] for i in range(n)]
    gens = []
    xi = ctx.primitive[v]
    if xi != 1:
        d = [r[:] for r in ident]
        d[0][0] = xi
        gens.append(d)
    if n >= 2:
        t = [r[:] for r in ident]
        t[0][1] = 1
        gens.append(t)
        sw = [r[:] for r in ident]
        sw[0][0] = sw[1][1] = 0
        sw[0][1] = sw[1][0] = 1
        gens.append(sw)
    if n >= 3:
        gens.append([[int(j == (i + 1) % n) for j in range(n)] for i in range(n)])
    return gens


@dataclass
class Encoding:
    """Representations of fixed dimension vector as integers.

    The coordinates run over arrows, then matrix rows, then columns, then the
    GF(p)-coefficients of the entry (low degree first); the integer reads them
    as base-p digits, most significant first, so integer order is
    lexicographic order of matrix tuples.
    """
    species: FqSpecies
    dims: tuple
    layout: list  # (arrow id, rows, cols, D)

    @property
    def length(self) -> int:
        return sum(r * c * D for _, r, c, D in self.layout)

    @property
    def dims_vector(self) -> tuple:
        return tuple(n for _, n in self.dims)

    @property
    def count(self) -> int:
        return self.species.p ** self.length

    def digits(self, V: Representation) -> list[int]:
        ctx = context(self.species)
        out = []
        mats = V.mats
        for aid, r, c, D in self.layout:
            head = ctx.arrows[aid].head
            for row in mats[aid]:
                for x in row:
                    out.extend(int(y) for y in _kvec(ctx, head, x))
        return out

    def encode(self, V: Representation) -> int:
        p, code = self.species.p, 0
        for dgt in self.digits(V):
            code = code * p + dgt
        return code

    def decode(self, code: int) -> Representation:
        ctx = context(self.species)
        p, L = self.species.p, self.length
        dg = [0] * L
        for i in range(L - 1, -1, -1):
            code, dg[i] = divmod(code, p)
        mats, pos = {}, 0
        for aid, r, c, D in self.layout:
            A = ctx.arith[ctx.arrows[aid].head]
            mat = []
            for _ in range(r):
                row = []
                for _ in range(c):
                    row.append(A.from_vec(np.array(dg[pos:pos + D], dtype=np.int64)))
                    pos += D
                mat.append(row)
            mats[aid] = mat
        return make_representation(self.species, dict(self.dims), mats)


def encoding(s: FqSpecies, dims) -> Encoding:
    ctx = context(s)
    dims = dict(zip(ctx.vertices, dims)) if not isinstance(dims, Mapping) else {v: dims.get(v, 0) for v in ctx.vertices}
    layout = []
    for aid, ad in ctx.arrows.items():
        r, c = arrow_shape(s, aid, dims)
        layout.append((aid, r, c, ctx.D[ad.head]))
    return Encoding(s, tuple((v, dims[v]) for v in ctx.vertices), layout)


@dataclass(frozen=True, order=True)
class IsoClassLabel:
    dims: tuple
    code: int

    def to_json(self) -> dict:
        return {"dims": list(self.dims), "code": self.code}

    def __str__(self) -> str:
        return f"{list(self.dims)}#{self.code}"


@dataclass
class OrbitTable:
    encoding: Encoding
    canon: np.ndarray  # code -> least code in its orbit
    classes: list  # sorted least codes
    sizes: dict  # least code -> orbit size

    def label(self, V: Representation) -> IsoClassLabel:
        return IsoClassLabel(self.encoding.dims_vector, int(self.canon[self.encoding.encode(V)]))



def _generator_matrix(enc: Encoding, ctx: _Context, v: str, g) -> np.ndarray:
    """Action of the base change g at vertex v on the digit vector, as a GF(p) matrix."""
    L = enc.length
    out = np.zeros((L, L), dtype=np.int64)
    for u in range(L):
        code = enc.species.p ** (L - 1 - u)
        W = base_change(enc.decode(code), {v: g})
        out[:, u] = enc.digits(W)
    return out


_orbit_cache: dict = {}


def orbit_table(s: FqSpecies, dims, cap: int = DEFAULT_CAP) -> OrbitTable:
    """All representations of the given dimension vector, partitioned into base-change orbits."""
    enc = encoding(s, dims)
    key = (s, enc.dims)
    hit = _orbit_cache.get(key)
    if hit is not None:
        _check_cap(hit.encoding.count, cap, "the representation space")
        return hit
    _check_cap(enc.count, cap, "the representation space")
    ctx = context(s)
    N, L, p = enc.count, enc.length, s.p
    gens = []
    for v, n in enc.dims:
        for g in _gl_generators(ctx, v, n):
            gens.append(_generator_matrix(enc, ctx, v, g))
    weights = np.array([p ** (L - 1 - i) for i in range(L)], dtype=np.int64)
    rows, cols = [], []
    chunk = 1 << 16
    for start in range(0, N, chunk):
        idx = np.arange(start, min(N, start + chunk), dtype=np.int64)
        dg = np.zeros((len(idx), L), dtype=np.int64)
        rem = idx.copy()
        for i in range(L - 1, -1, -1):
            dg[:, i] = rem % p
            rem //= p
        for G in gens:
            img = (dg @ G.T) % p
            rows.append(idx)
            cols.append(img @ weights)
    if rows:
        r = np.concatenate(rows)
        c = np.concatenate(cols)
        graph = coo_matrix((np.ones(len(r), dtype=np.int8), (r, c)), shape=(N, N)).tocsr()
        _, labels = connected_components(graph, directed=True, connection="weak")
    else:
        labels = np.arange(N)
    least = np.full(labels.max() + 1, N, dtype=np.int64)
    np.minimum.at(least, labels, np.arange(N, dtype=np.int64))
    canon = least[labels]
    counts = np.bincount(labels)
    classes = sorted(int(x) for x in least)
    sizes = {int(least[i]): int(counts[i]) for i in range(len(least))}
    table = OrbitTable(enc, canon, classes, sizes)
    _orbit_cache[key] = table
    return table


def canonical_label(V: Representation, cap: int = DEFAULT_CAP) -> IsoClassLabel:
    return orbit_table(V.species, V.dim_vector(), cap).label(V)


def label_representation(s: FqSpecies, label: IsoClassLabel) -> Representation:
    return encoding(s, label.dims).decode(label.code)


def enumerate_reps(s: FqSpecies, alpha, cap: int = DEFAULT_CAP) -> list[IsoClassLabel]:
    table = orbit_table(s, alpha, cap)
    dims = table.encoding.dims_vector
    return [IsoClassLabel(dims, c) for c in table.classes]


def enumerate_indecomposables(s: FqSpecies, alpha, cap: int = DEFAULT_CAP) -> list[IsoClassLabel]:
    return [lab for lab in enumerate_reps(s, alpha, cap)
            if is_indecomposable(label_representation(s, lab), cap)]


# ---------------------------------------------------------------------------
# subrepresentations

def kspaces(F: ff.FieldDesc, n: int, k: Optional[int] = None):
    """All k-dimensional subspaces of F^n as reduced echelon bases (all k if None)."""
    ranks = range(n + 1) if k is None else [k]
    elems = range(F.order)
    for r in ranks:
        for piv in combinations(range(n), r):
            free = [(i, c) for i in range(r) for c in range(piv[i] + 1, n) if c not in piv]
            for vals in product(elems, repeat=len(free)):
                rows = [[0] * n for _ in range(r)]
                for i, c in enumerate(piv):
                    rows[i][c] = 1
                for (i, c), x in zip(free, vals):
                    rows[i][c] = x
                yield tuple(tuple(row) for row in rows), piv


def gaussian_binomial(n: int, k: int, Q: int) -> int:
    if k < 0 or k > n:
        return 0
    num = den = 1
    for i in range(k):
        num *= Q ** (n - i) - 1
        den *= Q ** (i + 1) - 1
    return num // den


@dataclass
class Subrepresentation:
    spaces: dict  # vertex -> (rows, pivots)
    sub: Representation
    quotient: Representation


def _span_flat(ctx: _Context, v: str, rows) -> np.ndarray:
    """GF(p)-spanning set (rows) of the K_v-span of the given vectors."""
    D = ctx.D[v]
    A = ctx.arith[v]
    out = []
    for row in rows:
        for c in range(D):
            x = A.pow(A.gen, c) if c else 1
            out.append(flat_vector(ctx, v, [A.mul(x, y) for y in row]))
    n = len(rows[0]) if rows else 0
    return np.array(out, dtype=np.int64).reshape(len(out), n * D)


def _tensor_vector(ctx: _Context, aid: str, k: int, u) -> np.ndarray:
    """Flattened b_k (x) u in M^{n_t}."""
    ad = ctx.arrows[aid]
    Md, p = ad.Md, ctx.p
    out = np.zeros(len(u) * Md, dtype=np.int64)
    for j, x in enumerate(u):
        if x:
            out[j * Md:(j + 1) * Md] = ad.right(_kvec(ctx, ad.tail, x), p) @ ad.b[k] % p
    return out


def _is_closed(C: Representation, spaces: Mapping, flats: Mapping) -> bool:
    ctx = context(C.species)
    p = ctx.p
    for aid, ad in ctx.arrows.items():
        rows_t = spaces[ad.tail][0]
        if not rows_t or not C.dim[ad.head]:
            continue
        Uh = _span_flat(ctx, ad.head, spaces[ad.head][0]) if spaces[ad.head][0] else np.zeros((0, C.dim[ad.head] * ctx.D[ad.head]), dtype=np.int64)
        images = []
        for u in rows_t:
            blk = np.vstack([ad.right(_kvec(ctx, ad.tail, x), p) for x in u])  # (n_t Md) x Md
            images.append((flats[aid] @ blk % p).T)
        img = np.vstack(images)
        base = modp.rank(Uh, p) if Uh.size else 0
        if modp.rank(np.vstack([Uh, img]) if Uh.size else img, p) != base:
            return False
    return True


def _induced(C: Representation, spaces: Mapping, flats: Mapping) -> tuple[Representation, Representation]:
    ctx = context(C.species)
    p = ctx.p
    sub_dims = {v: len(spaces[v][0]) for v in ctx.vertices}
    quo_dims = {v: C.dim[v] - sub_dims[v] for v in ctx.vertices}
    sub_m, quo_m = {}, {}
    for aid, ad in ctx.arrows.items():
        t, h = ad.tail, ad.head
        n_t = C.dim[t]
        rows_t, piv_t = spaces[t]
        rows_h, piv_h = spaces[h]
        Ah = ctx.arith[h]
        nonpiv_t = [c for c in range(n_t) if c not in piv_t]
        nonpiv_h = [c for c in range(C.dim[h]) if c not in piv_h]
        ks, kq = sub_dims[t], quo_dims[t]
        S = [[0] * (ad.kh_dim * ks) for _ in range(sub_dims[h])]
        Qm = [[0] * (ad.kh_dim * kq) for _ in range(quo_dims[h])]
        for k in range(ad.kh_dim):
            for j, u in enumerate(rows_t):
                w = unflat_vector(ctx, h, flats[aid] @ _tensor_vector(ctx, aid, k, u) % p) if C.dim[h] else []
                for r, c in enumerate(piv_h):
                    S[r][k * ks + j] = w[c]
            for j, c0 in enumerate(nonpiv_t):
                e = [int(i == c0) for i in range(n_t)]
                w = unflat_vector(ctx, h, flats[aid] @ _tensor_vector(ctx, aid, k, e) % p) if C.dim[h] else []
                for r, c in enumerate(piv_h):
                    if w[c]:
                        f = w[c]
                        w = [Ah.sub(x, Ah.mul(f, y)) for x, y in zip(w, rows_h[r])]
                for r, c in enumerate(nonpiv_h):
                    Qm[r][k * kq + j] = w[c]
        sub_m[aid], quo_m[aid] = S, Qm
    return (make_representation(C.species, sub_dims, sub_m),
            make_representation(C.species, quo_dims, quo_m))


def subspace_count(C: Representation, dims=None) -> int:
    ctx = context(C.species)
    total = 1
    for v in ctx.vertices:
        Q, n = ctx.field[v].order, C.dim[v]
        if dims is None:
            total *= sum(gaussian_binomial(n, k, Q) for k in range(n + 1))
        else:
            total *= gaussian_binomial(n, dims[v], Q)
    return total


def submodules(C: Representation, dims=None, cap: int = DEFAULT_CAP, induced: bool = True) -> list[Subrepresentation]:
    """All subrepresentations of C (of the given dimension vector, if any)."""
    ctx = context(C.species)
    if dims is not None and not isinstance(dims, Mapping):
        dims = dict(zip(ctx.vertices, dims))
    if dims is not None and any(dims.get(v, 0) > C.dim[v] or dims.get(v, 0) < 0 for v in ctx.vertices):
        return []
    if dims is not None:
        dims = {v: dims.get(v, 0) for v in ctx.vertices}
    _check_cap(subspace_count(C, dims), cap, "the subspace search")
    flats = {aid: flat_arrow(C, aid) for aid in ctx.arrows}
    per_vertex = [list(kspaces(ctx.field[v], C.dim[v], None if dims is None else dims[v])) for v in ctx.vertices]
    out = []
    for choice in product(*per_vertex):
        spaces = dict(zip(ctx.vertices, choice))
        if _is_closed(C, spaces, flats):
            if induced:
                sub, quo = _induced(C, spaces, flats)
            else:
                sub = quo = None
            out.append(Subrepresentation(spaces, sub, quo))
    return out


def hall_number(A: Representation, B: Representation, C: Representation, cap: int = DEFAULT_CAP) -> int:
    """Number of subrepresentations X of C with X isomorphic to B and C/X to A."""
    _same_species(A, C)
    _same_species(B, C)
    if tuple(a + b for a, b in zip(A.dim_vector(), B.dim_vector())) != C.dim_vector():
        return 0
    return sum(1 for X in submodules(C, B.dim, cap)
               if is_isomorphic(X.sub, B, cap) and is_isomorphic(X.quotient, A, cap))


def extension_table(C: Representation, dims, cap: int = DEFAULT_CAP) -> Counter:
    """Counter of (quotient label, sub label) over subrepresentations of the given dimension vector."""
    out = Counter()
    for X in submodules(C, dims, cap):
        out[(canonical_label(X.quotient, cap), canonical_label(X.sub, cap))] += 1
    return out


# ---------------------------------------------------------------------------
# decomposition into indecomposables

def _kmat_power(ctx, v, m, k):
    n = len(m)
    out = [[int(i == j) for j in range(n)] for i in range(n)]
    base = [list(r) for r in m]
    while k:
        if k & 1:
            out = _kmatmul(ctx, v, out, base)
        base = _kmatmul(ctx, v, base, base)
        k >>= 1
    return out


def _fitting_split(V: Representation, phi: Mapping):
    """V = im(phi^N) + ker(phi^N) for an endomorphism phi."""
    ctx = context(V.species)
    N = sum(n * ctx.D[v] for v, n in V.dims) + 1
    im_spaces, ker_spaces = {}, {}
    for v, n in V.dims:
        F = ctx.field[v]
        P = _kmat_power(ctx, v, phi[v], N) if n else []
        cols = [[P[i][j] for i in range(n)] for j in range(n)]
        im_spaces[v] = ff.ext_rref(cols, F) if n else ([], [])
        ker = ff.ext_nullspace(P, n, F) if n else []
        ker_spaces[v] = ff.ext_rref(ker, F) if ker else ([], [])
    flats = {aid: flat_arrow(V, aid) for aid in ctx.arrows}
    im_spaces = {v: (tuple(map(tuple, r)), tuple(pv)) for v, (r, pv) in im_spaces.items()}
    ker_spaces = {v: (tuple(map(tuple, r)), tuple(pv)) for v, (r, pv) in ker_spaces.items()}
    return _induced(V, im_spaces, flats)[0], _induced(V, ker_spaces, flats)[0]


def _splitting_endomorphism(V: Representation, cap: int, rng=None):
    ctx = context(V.species)
    basis = endomorphism_basis(V)
    order = list(range(len(basis)))
    if rng is not None:
        rng.shuffle(order)
    for i in order:
        whole = _whole(ctx, _flat_blocks(ctx, basis[i]))
        if not modp.is_invertible(whole, ctx.p) and not _nilpotent(whole, ctx.p):
            return basis[i]
    _check_cap(ctx.p ** len(basis), cap, "the endomorphism ring")
    blocks = [_flat_blocks(ctx, b) for b in basis]
    for coeffs, _batch in _enumerate_combinations(blocks, ctx.p):
        for row in coeffs:
            vecs = sum(int(c) * np.array(_morphism_vector(ctx, b)) for c, b in zip(row, basis))
            phi = _vector_to_morphism(ctx, V, V, vecs % ctx.p)
            whole = _whole(ctx, _flat_blocks(ctx, phi))
            if not modp.is_invertible(whole, ctx.p) and not _nilpotent(whole, ctx.p):
                return phi
    return None


def decompose(V: Representation, cap: int = DEFAULT_CAP, rng=None) -> list[Representation]:
    """Split V into indecomposable summands using Fitting decompositions."""
    if V.is_zero():
        return []
    phi = _splitting_endomorphism(V, cap, rng)
    if phi is None:
        return [V]
    a, b = _fitting_split(V, phi)
    return decompose(a, cap, rng) + decompose(b, cap, rng)


def summand_labels(V: Representation, cap: int = DEFAULT_CAP, rng=None) -> list[IsoClassLabel]:
    return sorted(canonical_label(W, cap) for W in decompose(V, cap, rng))


# ---------------------------------------------------------------------------
# quivers with automorphism

def _require_trivial(s: FqSpecies) -> None:
    if any(d != 1 for d in s.shape.d.values()) or any(
            tuple(v) != (BimoduleSummand(1),) for v in s.bimodules.values()):
        raise SpeciesMismatch("twisting needs the trivial species of a plain quiver")


def sigma_twist(V: Representation, s: QuiverAutomorphism) -> Representation:
    """V^sigma with V^sigma_i = V_{sigma^-1(i)} and f^sigma_rho = f_{sigma^-1(rho)}."""
    sp = V.species
    _require_trivial(sp)
    inv = s.inverse()
    dims = {v: V.dim[inv.vertex_map[v]] for v in sp.shape.quiver.vertices}
    mats = {a: V.mats[inv.arrow_map[a]] for a in sp.shape.quiver.arrow_ids}
    return make_representation(sp, dims, mats)


def is_invariant(V: Representation, s: QuiverAutomorphism, cap: int = DEFAULT_CAP) -> bool:
    return is_isomorphic(sigma_twist(V, s), V, cap)


def invariant_decompose(V: Representation, s: QuiverAutomorphism, cap: int = DEFAULT_CAP) -> list[dict]:
    """Indecomposable summands of V grouped into sigma-orbits {W, W^sigma, ...}."""
    pieces = decompose(V, cap)
    counts = Counter(canonical_label(W, cap) for W in pieces)
    reps = {canonical_label(W, cap): W for W in pieces}
    seen, out = set(), []
    for lab in sorted(counts):
        if lab in seen:
            continue
        orbit, W = [lab], reps[lab]
        while True:
            W = sigma_twist(W, s)
            nxt = canonical_label(W, cap)
            if nxt == lab:
                break
            orbit.append(nxt)
        seen.update(orbit)
        out.append({"orbit": orbit, "size": len(orbit), "multiplicity": counts[lab],
                    "complete": all(counts.get(x, 0) == counts[lab] for x in orbit)})
    return out


def fold_dim_vector(alpha: Mapping, q: Quiver, s: QuiverAutomorphism) -> dict:
    """The folded vector on sigma-orbits, labelled by their least vertex."""
    out = {}
    for orb in vertex_orbits(q, s):
        vals = {alpha.get(v, 0) for v in orb}
        if len(vals) != 1:
            raise NotSigmaConstant(f"vector is not constant on the orbit {sorted(orb)}")
        out[min(orb)] = vals.pop()
    return out
