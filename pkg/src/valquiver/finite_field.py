"""Exact arithmetic in GF(p^n).

Field elements are encoded as integers whose base-p digits are the polynomial
coefficients, lowest degree first (digit k is the coefficient of x^k).
``FieldElem`` wraps such an integer together with its field for a friendlier
API; the integer-level routines on ``FieldArith`` are what the heavier
modules use.
"""
from __future__ import annotations

import itertools
import threading
from dataclasses import dataclass
from math import gcd

import numpy as np

from . import modp

MAX_PRIME = 17
MAX_DEGREE = 16
TABLE_LIMIT = 1 << 14


class FieldError(ValueError):
    pass


class NotPrime(FieldError):
    pass


class DegreeTooLarge(FieldError):
    pass


class NotASubfield(FieldError):
    pass


class DivisionByZero(ZeroDivisionError):
    pass


# ---------------------------------------------------------------------------
# polynomials over GF(p), coefficient lists low-degree first

def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _pmod(a: list[int], f: list[int], p: int) -> list[int]:
    a = _trim([c % p for c in a])
    df = len(f) - 1
    inv_lead = pow(f[-1], p - 2, p)
    while len(a) - 1 >= df and a:
        c = (a[-1] * inv_lead) % p
        shift = len(a) - 1 - df
        for i, fc in enumerate(f):
            a[shift + i] = (a[shift + i] - c * fc) % p
        _trim(a)
    return a


def _pmul(a: list[int], b: list[int], p: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return _trim(out)


def _psub(a: list[int], b: list[int], p: int) -> list[int]:
    n = max(len(a), len(b))
    out = [((a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0)) % p for i in range(n)]
    return _trim(out)


def _ppowmod(base: list[int], e: int, f: list[int], p: int) -> list[int]:
    result = [1]
    base = _pmod(base, f, p)
    while e:
        if e & 1:
            result = _pmod(_pmul(result, base, p), f, p)
        base = _pmod(_pmul(base, base, p), f, p)
        e >>= 1
    return result


def _peval(f: list[int], x: int, p: int) -> int:
    acc = 0
    for c in reversed(f):
        acc = (acc * x + c) % p
    return acc


def _pgcd(a: list[int], b: list[int], p: int) -> list[int]:
    a, b = _trim(list(a)), _trim(list(b))
    while b:
        a, b = b, _pmod(a, b, p)
    return a


def _prime_factors(n: int) -> list[int]:
    out, k = [], 2
    while k * k <= n:
        if n % k == 0:
            out.append(k)
            while n % k == 0:
                n //= k
        k += 1
    if n > 1:
        out.append(n)
    return out


def is_prime(p: int) -> bool:
    return p >= 2 and _prime_factors(p) == [p]


def is_irreducible(coeffs, p: int) -> bool:
    """Rabin's test for a monic polynomial given low-degree first."""
    f = _trim([c % p for c in coeffs])
    n = len(f) - 1
    if n < 1:
        return False
    if n == 1:
        return True
    x = [0, 1]
    if _psub(_ppowmod(x, p ** n, f, p), x, p):
        return False
    for r in _prime_factors(n):
        h = _psub(_ppowmod(x, p ** (n // r), f, p), x, p)
        if len(_pgcd(f, h, p)) != 1:
            return False
    return True


# ---------------------------------------------------------------------------
# field descriptors

@dataclass(frozen=True)
class FieldDesc:
    p: int
    n: int
    modulus: tuple  # monic, low-degree first, length n + 1

    @property
    def order(self) -> int:
        return self.p ** self.n

    def __repr__(self) -> str:
        return f"GF({self.p}^{self.n})"

    def to_json(self) -> dict:
        return {"p": self.p, "n": self.n, "modulus": list(self.modulus)}


_make_lock = threading.Lock()
_made: dict[tuple[int, int], FieldDesc] = {}


def gf_make(p: int, n: int) -> FieldDesc:
    """GF(p^n) with the lexicographically least monic irreducible modulus.

    Coefficient tuples are compared low-degree first; for n = 1 the modulus is x.
    """
    if not isinstance(p, int) or not is_prime(p):
        raise NotPrime(f"{p} is not prime")
    if p > MAX_PRIME:
        raise DegreeTooLarge(f"characteristic {p} exceeds the supported bound {MAX_PRIME}")
    if not isinstance(n, int) or n < 1:
        raise FieldError(f"extension degree must be a positive integer, got {n}")
    if n > MAX_DEGREE:
        raise DegreeTooLarge(f"degree {n} exceeds the supported bound {MAX_DEGREE}")
    key = (p, n)
    with _make_lock:
        hit = _made.get(key)
        if hit is not None:
            return hit
        # a zero constant term means x divides the candidate, so for n > 1 start at 1
        for c0 in range(0 if n == 1 else 1, p):
            for rest in itertools.product(range(p), repeat=n - 1):
                cand = [c0, *rest, 1]
                # cheap rejection of candidates with a root in GF(p) before Rabin's test
                if n > 1 and any(_peval(cand, r, p) == 0 for r in range(p)):
                    continue
                if is_irreducible(cand, p):
                    desc = FieldDesc(p, n, tuple(cand))
                    _made[key] = desc
                    return desc
    raise AssertionError("no irreducible polynomial found")  # unreachable


# ---------------------------------------------------------------------------
# integer-level arithmetic

class FieldArith:
    """Arithmetic on integer-encoded elements of one field."""

    def __init__(self, field: FieldDesc):
        self.field = field
        self.p = field.p
        self.n = field.n
        self.order = field.order
        self._mod = list(field.modulus)
        self._exp = None
        self._log = None
        self._mulmat: dict[int, np.ndarray] = {}
        if self.order <= TABLE_LIMIT:
            self._build_tables()

    # encoding
    def to_coeffs(self, a: int) -> list[int]:
        out = []
        for _ in range(self.n):
            a, r = divmod(a, self.p)
            out.append(r)
        return out

    def from_coeffs(self, coeffs) -> int:
        coeffs = list(coeffs)
        if len(coeffs) > self.n:
            coeffs = _pmod(coeffs, self._mod, self.p) if self.n else []
        v = 0
        for c in reversed(coeffs):
            v = v * self.p + (c % self.p)
        return v

    @property
    def gen(self) -> int:
        """Residue class of x."""
        return self.from_coeffs([0, 1])

    # additive
    def add(self, a: int, b: int) -> int:
        if self.p == 2:
            return a ^ b
        p, out, place = self.p, 0, 1
        while a or b:
            a, ra = divmod(a, p)
            b, rb = divmod(b, p)
            out += ((ra + rb) % p) * place
            place *= p
        return out

    def neg(self, a: int) -> int:
        if self.p == 2:
            return a
        p, out, place = self.p, 0, 1
        while a:
            a, r = divmod(a, p)
            out += ((-r) % p) * place
            place *= p
        return out

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def scale(self, c: int, a: int) -> int:
        """Multiply by a prime-field scalar."""
        c %= self.p
        if c == 0:
            return 0
        p, out, place = self.p, 0, 1
        while a:
            a, r = divmod(a, p)
            out += ((c * r) % p) * place
            place *= p
        return out

    # multiplicative
    def _polymul(self, a: int, b: int) -> int:
        prod = _pmul(self.to_coeffs(a), self.to_coeffs(b), self.p)
        return self.from_coeffs(_pmod(prod, self._mod, self.p))

    def _build_tables(self) -> None:
        q1 = self.order - 1
        if q1 == 1:
            self._exp, self._log = [1, 1], {1: 0}
            return
        factors = _prime_factors(q1)
        for g in range(1, self.order):
            if all(self._slowpow(g, q1 // r) != 1 for r in factors):
                break
        exp = [1] * (2 * q1)
        for k in range(1, 2 * q1):
            exp[k] = self._polymul(exp[k - 1], g)
        self._exp = exp
        self._log = {exp[k]: k for k in range(q1)}

    def _slowpow(self, a: int, e: int) -> int:
        result, base = 1, a
        while e:
            if e & 1:
                result = self._polymul(result, base)
            base = self._polymul(base, base)
            e >>= 1
        return result

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        if self._exp is not None:
            return self._exp[self._log[a] + self._log[b]]
        return self._polymul(a, b)

    def inv(self, a: int) -> int:
        if a == 0:
            raise DivisionByZero("inverse of zero")
        if self._exp is not None:
            q1 = self.order - 1
            return self._exp[(q1 - self._log[a]) % q1]
        return self.pow(a, self.order - 2)

    def pow(self, a: int, e: int) -> int:
        if e < 0:
            return self.pow(self.inv(a), -e)
        if a == 0:
            return 1 if e == 0 else 0
        if self._exp is not None:
            q1 = self.order - 1
            return self._exp[(self._log[a] * e) % q1]
        result, base = 1, a
        while e:
            if e & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            e >>= 1
        return result

    def frob(self, a: int, k: int = 1) -> int:
        """a^(p^k); k is taken mod n."""
        k %= self.n
        return self.pow(a, self.p ** k) if k else a

    def elements(self):
        return range(self.order)

    # GF(p)-linear views
    def vec(self, a: int) -> np.ndarray:
        return np.array(self.to_coeffs(a), dtype=np.int64)

    def from_vec(self, v) -> int:
        return self.from_coeffs(int(c) for c in v)

    def mul_matrix(self, a: int) -> np.ndarray:
        """Matrix over GF(p) of multiplication by ``a`` in the monomial basis."""
        hit = self._mulmat.get(a)
        if hit is not None:
            return hit
        cols = []
        basis = [self.from_coeffs([0] * k + [1]) for k in range(self.n)]
        for b in basis:
            cols.append(self.to_coeffs(self.mul(a, b)))
        mat = np.array(cols, dtype=np.int64).T.reshape(self.n, self.n)
        if len(self._mulmat) < 4096:
            self._mulmat[a] = mat
        return mat

    def frob_matrix(self, k: int = 1) -> np.ndarray:
        basis = [self.from_coeffs([0] * j + [1]) for j in range(self.n)]
        cols = [self.to_coeffs(self.frob(b, k)) for b in basis]
        return np.array(cols, dtype=np.int64).T.reshape(self.n, self.n)

    def eval_poly(self, coeffs, x: int) -> int:
        """Evaluate a polynomial with prime-field coefficients at ``x``."""
        acc = 0
        for c in reversed(list(coeffs)):
            acc = self.add(self.mul(acc, x), c % self.p)
        return acc


_arith_lock = threading.Lock()
_arith: dict[FieldDesc, FieldArith] = {}


def arith(field: FieldDesc) -> FieldArith:
    with _arith_lock:
        hit = _arith.get(field)
        if hit is None:
            hit = FieldArith(field)
            _arith[field] = hit
        return hit


# ---------------------------------------------------------------------------
# element wrapper

@dataclass(frozen=True)
class FieldElem:
    field: FieldDesc
    value: int

    @classmethod
    def from_coeffs(cls, field: FieldDesc, coeffs) -> "FieldElem":
        return cls(field, arith(field).from_coeffs(coeffs))

    @property
    def coeffs(self) -> tuple:
        return tuple(arith(self.field).to_coeffs(self.value))

    def _check(self, other: "FieldElem") -> None:
        if other.field != self.field:
            raise FieldError("operands live in different fields")

    def __add__(self, other):
        self._check(other)
        return FieldElem(self.field, arith(self.field).add(self.value, other.value))

    def __sub__(self, other):
        self._check(other)
        return FieldElem(self.field, arith(self.field).sub(self.value, other.value))

    def __neg__(self):
        return FieldElem(self.field, arith(self.field).neg(self.value))

    def __mul__(self, other):
        self._check(other)
        return FieldElem(self.field, arith(self.field).mul(self.value, other.value))

    def __pow__(self, e: int):
        return FieldElem(self.field, arith(self.field).pow(self.value, e))

    def inv(self) -> "FieldElem":
        return FieldElem(self.field, arith(self.field).inv(self.value))

    def is_zero(self) -> bool:
        return self.value == 0

    def to_json(self) -> list:
        return list(self.coeffs)

    def __repr__(self) -> str:
        terms = [f"{c}*x^{k}" if k else str(c) for k, c in enumerate(self.coeffs) if c]
        return f"{self.field!r}({' + '.join(terms) or '0'})"


def zero(field: FieldDesc) -> FieldElem:
    return FieldElem(field, 0)


def one(field: FieldDesc) -> FieldElem:
    return FieldElem(field, 1)


def generator(field: FieldDesc) -> FieldElem:
    return FieldElem(field, arith(field).gen)


def add(a: FieldElem, b: FieldElem) -> FieldElem:
    return a + b


def mul(a: FieldElem, b: FieldElem) -> FieldElem:
    return a * b


def inv(a: FieldElem) -> FieldElem:
    return a.inv()


def power(a: FieldElem, e: int) -> FieldElem:
    return a ** e


def frobenius(a: FieldElem, k: int = 1) -> FieldElem:
    return FieldElem(a.field, arith(a.field).frob(a.value, k))


# ---------------------------------------------------------------------------
# embeddings

@dataclass(frozen=True)
class Embedding:
    source: FieldDesc
    target: FieldDesc
    image: int  # image of the source generator, encoded in the target

    def matrix(self) -> np.ndarray:
        """GF(p)-matrix (target.n x source.n) of the embedding."""
        return _embedding_matrix(self)

    def __call__(self, a):
        if isinstance(a, FieldElem):
            if a.field != self.source:
                raise FieldError("element is not in the embedding's source")
            return FieldElem(self.target, self.map_int(a.value))
        return self.map_int(a)

    def map_int(self, a: int) -> int:
        ta = arith(self.target)
        v = modp.matmul(self.matrix(), arith(self.source).vec(a), self.target.p)
        return ta.from_vec(v)


_emb_cache: dict = {}
_emb_lock = threading.Lock()


def _embedding_matrix(e: Embedding) -> np.ndarray:
    key = ("mat", e)
    with _emb_lock:
        hit = _emb_cache.get(key)
    if hit is not None:
        return hit
    ta = arith(e.target)
    cols, acc = [], 1
    for _ in range(e.source.n):
        cols.append(ta.to_coeffs(acc))
        acc = ta.mul(acc, e.image)
    mat = np.array(cols, dtype=np.int64).T.reshape(e.target.n, e.source.n)
    with _emb_lock:
        _emb_cache[key] = mat
    return mat


def subfield_basis(target: FieldDesc, k: int) -> np.ndarray:
    """GF(p)-basis (rows) of the degree-k subfield of ``target``."""
    ta = arith(target)
    f = (ta.frob_matrix(k) - np.eye(target.n, dtype=np.int64)) % target.p
    return modp.nullspace(f, target.p)


def roots_in(coeffs, target: FieldDesc, degree: int) -> list[int]:
    """All roots in ``target`` of an irreducible prime-field polynomial of the given degree."""
    ta = arith(target)
    if degree == 1:
        c0, c1 = coeffs[0] % target.p, coeffs[1] % target.p
        return [ta.from_coeffs([(-c0 * pow(c1, target.p - 2, target.p)) % target.p])]
    basis = subfield_basis(target, degree)
    p = target.p
    for combo in itertools.product(range(p), repeat=basis.shape[0]):
        v = (np.array(combo, dtype=np.int64) @ basis) % p
        x = ta.from_vec(v)
        if x and ta.eval_poly(coeffs, x) == 0:
            orbit, y = [x], ta.frob(x)
            while y != x:
                orbit.append(y)
                y = ta.frob(y)
            return orbit
    return []


def embed(src: FieldDesc, dst: FieldDesc, over: FieldDesc | None = None) -> Embedding:
    """Deterministic embedding GF(p^a) -> GF(p^b) for a | b.

    The generator goes to the root of src.modulus in dst whose coefficient
    vector is lexicographically least.  With ``over`` given, only roots that
    make the embedding agree with embed(over, dst) on ``over`` are allowed.
    Identical descriptors embed by the identity.
    """
    if src.p != dst.p or dst.n % src.n:
        raise NotASubfield(f"{src!r} is not a subfield of {dst!r}")
    key = ("emb", src, dst, over)
    with _emb_lock:
        hit = _emb_cache.get(key)
    if hit is not None:
        return hit
    ta = arith(dst)
    if src == dst and over is None:
        result = Embedding(src, dst, ta.gen)
    else:
        roots = roots_in(list(src.modulus), dst, src.n)
        roots.sort(key=lambda r: tuple(ta.to_coeffs(r)))
        if over is not None:
            if src.n % over.n:
                raise NotASubfield(f"{over!r} is not a subfield of {src!r}")
            inner = embed(over, src)
            outer = embed(over, dst)
            target_img = outer.image
            ok = []
            for r in roots:
                cand = Embedding(src, dst, r)
                if cand.map_int(inner.image) == target_img:
                    ok.append(r)
            roots = ok
        if not roots:
            raise NotASubfield(f"no compatible root of {src!r} in {dst!r}")
        result = Embedding(src, dst, roots[0])
    with _emb_lock:
        _emb_cache[key] = result
    return result


def embed_through(src: FieldDesc, dst: FieldDesc, ambient: FieldDesc) -> Embedding:
    """Embedding src -> dst compatible with the fixed embeddings of both into ``ambient``.

    Routing every inclusion through one ambient field makes a family of
    embeddings commute, which the lexicographic choice alone does not promise.
    """
    if src == dst:
        return Embedding(src, dst, arith(dst).gen)
    key = ("through", src, dst, ambient)
    with _emb_lock:
        hit = _emb_cache.get(key)
    if hit is not None:
        return hit
    want = embed(src, ambient).image
    outer = embed(dst, ambient)
    for r in roots_in(list(src.modulus), dst, src.n):
        if outer.map_int(r) == want:
            result = Embedding(src, dst, r)
            with _emb_lock:
                _emb_cache[key] = result
            return result
    raise NotASubfield(f"{src!r} does not sit inside {dst!r} compatibly within {ambient!r}")


def prime_power(qsize: int) -> tuple[int, int]:
    """Split q = p^e; raises NotPrime when q is not a prime power."""
    if not isinstance(qsize, int) or qsize < 2:
        raise NotPrime(f"{qsize} is not a prime power")
    f = _prime_factors(qsize)
    if len(f) != 1:
        raise NotPrime(f"{qsize} is not a prime power")
    p, e, x = f[0], 0, qsize
    while x > 1:
        x //= p
        e += 1
    return p, e


# ---------------------------------------------------------------------------
# linear algebra over GF(p^n) on integer-encoded entries

def ext_rank(rows: list[list[int]], F: FieldDesc) -> int:
    A = arith(F)
    m = [list(r) for r in rows]
    if not m:
        return 0
    ncols = len(m[0])
    rank, r = 0, 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv_p = A.inv(m[r][c])
        m[r] = [A.mul(inv_p, x) for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [A.sub(x, A.mul(f, y)) for x, y in zip(m[i], m[r])]
        r += 1
        rank += 1
        if r == len(m):
            break
    return rank


def ext_rref(rows: list[list[int]], F: FieldDesc) -> tuple[list[list[int]], list[int]]:
    """Reduced row echelon form over GF(p^n); zero rows are dropped."""
    A = arith(F)
    m = [list(r) for r in rows]
    pivots: list[int] = []
    r = 0
    ncols = len(m[0]) if m else 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv_p = A.inv(m[r][c])
        m[r] = [A.mul(inv_p, x) for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [A.sub(x, A.mul(f, y)) for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def ext_nullspace(rows: list[list[int]], ncols: int, F: FieldDesc) -> list[list[int]]:
    """Basis of {x : rows . x = 0} over GF(p^n), in reduced echelon form."""
    A = arith(F)
    red, pivots = ext_rref(rows, F) if rows else ([], [])
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        x = [0] * ncols
        x[f] = 1
        for r, c in enumerate(pivots):
            x[c] = A.neg(red[r][f])
        basis.append(x)
    return ext_rref(basis, F)[0] if basis else []


def ext_matmul(a: list[list[int]], b: list[list[int]], F: FieldDesc) -> list[list[int]]:
    A = arith(F)
    n, k, m = len(a), len(b), len(b[0]) if b else 0
    out = [[0] * m for _ in range(n)]
    for i in range(n):
        for t in range(k):
            x = a[i][t]
            if x:
                row = b[t]
                for j in range(m):
                    if row[j]:
                        out[i][j] = A.add(out[i][j], A.mul(x, row[j]))
    return out


# ---------------------------------------------------------------------------
# tensor products of finite fields

@dataclass(frozen=True)
class TensorDecomposition:
    """F_{q^a} (x)_{F_q} F_{q^b} as a product of gcd(a, b) copies of F_{q^lcm}.

    Over the algebraic closure the left factor contributes idempotents indexed
    by u mod a and the right factor by w mod b.  The pair (u, w) lives in the
    field factor s = (w - u) mod gcd(a, b).
    """
    a: int
    b: int
    factors: int
    factor_degree: int

    def factor_of(self, u: int, w: int) -> int:
        return (w - u) % self.factors

    def pairs(self, s: int) -> list[tuple[int, int]]:
        return [(u, w) for u in range(self.a) for w in range(self.b)
                if (w - u) % self.factors == s % self.factors]

    def to_json(self) -> dict:
        return {
            "a": self.a,
            "b": self.b,
            "factors": self.factors,
            "factor_degree": self.factor_degree,
            "pairing": {str(s): [list(pr) for pr in self.pairs(s)] for s in range(self.factors)},
        }


def tensor_decompose(a: int, b: int, p: int | None = None, e: int = 1) -> TensorDecomposition:
    if a < 1 or b < 1:
        raise FieldError("degrees must be positive")
    g = gcd(a, b)
    return TensorDecomposition(a, b, g, a * b // g)
