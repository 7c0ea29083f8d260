"""Dense linear algebra over a prime field GF(p) on numpy integer arrays."""
from __future__ import annotations

import numpy as np


def as_modp(a, p: int) -> np.ndarray:
    arr = np.asarray(a, dtype=np.int64)
    return np.mod(arr, p)


def rref(a, p: int):
    """Row-reduce a copy of ``a`` mod p. Returns (reduced matrix, pivot columns)."""
    m = as_modp(a, p).copy()
    if m.ndim != 2:
        raise ValueError("rref expects a 2-d array")
    rows, cols = m.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(m[r:, c])[0]
        if nz.size == 0:
            continue
        k = r + int(nz[0])
        if k != r:
            m[[r, k]] = m[[k, r]]
        inv = pow(int(m[r, c]), p - 2, p)
        m[r] = (m[r] * inv) % p
        col = m[:, c].copy()
        col[r] = 0
        nzr = np.nonzero(col)[0]
        if nzr.size:
            m[nzr] = (m[nzr] - np.outer(col[nzr], m[r])) % p
        pivots.append(c)
        r += 1
    return m, pivots


def rank(a, p: int) -> int:
    a = np.asarray(a)
    if a.size == 0:
        return 0
    return len(rref(a, p)[1])


def nullspace(a, p: int) -> np.ndarray:
    """Basis of {x : a x = 0} as the rows of the returned array."""
    a = as_modp(a, p)
    if a.ndim != 2:
        raise ValueError("nullspace expects a 2-d array")
    cols = a.shape[1]
    if a.shape[0] == 0:
        return np.eye(cols, dtype=np.int64)
    m, pivots = rref(a, p)
    free = [c for c in range(cols) if c not in set(pivots)]
    basis = np.zeros((len(free), cols), dtype=np.int64)
    for k, f in enumerate(free):
        basis[k, f] = 1
        for i, pc in enumerate(pivots):
            basis[k, pc] = (-m[i, f]) % p
    return basis


def inverse(a, p: int) -> np.ndarray:
    a = as_modp(a, p)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError("inverse expects a square matrix")
    if n == 0:
        return a.copy()
    aug = np.concatenate([a, np.eye(n, dtype=np.int64)], axis=1)
    m, pivots = rref(aug, p)
    if len(pivots) < n or pivots[n - 1] != n - 1:
        raise ZeroDivisionError("matrix is singular mod %d" % p)
    return m[:, n:].copy()


def is_invertible(a, p: int) -> bool:
    a = np.asarray(a)
    n = a.shape[0]
    return a.shape == (n, n) and rank(a, p) == n


def is_nilpotent(a, p: int) -> bool:
    a = as_modp(a, p)
    n = a.shape[0]
    if n == 0:
        return True
    power = a.copy()
    # a^n = 0 iff nilpotent; square up past n
    k = 1
    while k < n:
        power = (power @ power) % p
        k *= 2
    return not power.any()


def matmul(a, b, p: int) -> np.ndarray:
    return (np.asarray(a, dtype=np.int64) @ np.asarray(b, dtype=np.int64)) % p


def block_diag(blocks, dtype=np.int64) -> np.ndarray:
    rows = sum(b.shape[0] for b in blocks)
    cols = sum(b.shape[1] for b in blocks)
    out = np.zeros((rows, cols), dtype=dtype)
    r = c = 0
    for b in blocks:
        out[r:r + b.shape[0], c:c + b.shape[1]] = b
        r += b.shape[0]
        c += b.shape[1]
    return out
