from itertools import product
from math import gcd, lcm

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from valquiver import finite_field as ff


def _naive_irreducible(coeffs, p):
    """Oracle: no monic factor of degree 1..n//2, by trial division over all candidates."""
    n = len(coeffs) - 1
    for k in range(1, n // 2 + 1):
        for low in product(range(p), repeat=k):
            g = list(low) + [1]
            if not ff._pmod(list(coeffs), g, p):
                return False
    return True


@pytest.mark.parametrize("p,n", [(2, 2), (2, 3), (2, 4), (3, 2), (3, 3), (5, 2), (2, 6)])
def test_modulus_is_least_irreducible(p, n):
    F = ff.gf_make(p, n)
    assert _naive_irreducible(F.modulus, p)
    # every candidate before it, in low-degree-first order, is reducible
    for cand in sorted(tuple(low) + (1,) for low in product(range(p), repeat=n)):
        if cand == F.modulus:
            break
        assert not _naive_irreducible(cand, p)


def test_modulus_examples():
    assert ff.gf_make(2, 1).modulus == (0, 1)
    assert ff.gf_make(2, 2).modulus == (1, 1, 1)
    assert ff.gf_make(3, 2).modulus == (1, 0, 1)


def test_gf_make_errors():
    with pytest.raises(ff.NotPrime):
        ff.gf_make(4, 1)
    with pytest.raises(ff.DegreeTooLarge):
        ff.gf_make(2, 17)
    with pytest.raises(ff.DegreeTooLarge):
        ff.gf_make(19, 1)


def test_gf4_arithmetic():
    F = ff.gf_make(2, 2)
    g = ff.generator(F)
    assert g * g == g + ff.one(F)
    assert ff.frobenius(ff.frobenius(g)) == g
    assert ff.one(F).inv() == ff.one(F)
    assert (g + ff.one(F)).to_json() == [1, 1]


def test_inverse_of_zero():
    with pytest.raises(ff.DivisionByZero):
        ff.zero(ff.gf_make(3, 2)).inv()


def test_mixed_fields_rejected():
    with pytest.raises(ff.FieldError):
        ff.one(ff.gf_make(2, 2)) + ff.one(ff.gf_make(2, 3))


def test_embed_examples():
    F2, F4, F16 = ff.gf_make(2, 1), ff.gf_make(2, 2), ff.gf_make(2, 4)
    assert ff.embed(F2, F4)(1) == 1
    e = ff.embed(F4, F16)
    A = ff.arith(F16)
    assert A.eval_poly(F4.modulus, e.image) == 0
    composed = [e(ff.embed(F2, F4)(a)) for a in range(2)]
    assert composed == [ff.embed(F2, F16)(a) for a in range(2)]


def test_embed_is_ring_homomorphism():
    for p, a, b in [(2, 2, 4), (2, 3, 6), (3, 2, 4), (2, 2, 6)]:
        src, dst = ff.gf_make(p, a), ff.gf_make(p, b)
        e = ff.embed(src, dst)
        S, D = ff.arith(src), ff.arith(dst)
        for x in S.elements():
            for y in S.elements():
                assert e(S.mul(x, y)) == D.mul(e(x), e(y))
                assert e(S.add(x, y)) == D.add(e(x), e(y))


def test_embed_picks_least_root():
    src, dst = ff.gf_make(2, 2), ff.gf_make(2, 4)
    D = ff.arith(dst)
    roots = [x for x in D.elements() if D.eval_poly(src.modulus, x) == 0]
    least = min(roots, key=lambda r: tuple(D.to_coeffs(r)))
    assert ff.embed(src, dst).image == least


def test_embed_not_subfield():
    with pytest.raises(ff.NotASubfield):
        ff.embed(ff.gf_make(2, 2), ff.gf_make(2, 3))


def test_tensor_decompose_examples():
    assert (ff.tensor_decompose(2, 2).factors, ff.tensor_decompose(2, 2).factor_degree) == (2, 2)
    assert (ff.tensor_decompose(2, 4).factors, ff.tensor_decompose(2, 4).factor_degree) == (2, 4)
    assert (ff.tensor_decompose(1, 5).factors, ff.tensor_decompose(1, 5).factor_degree) == (1, 5)


@pytest.mark.parametrize("p,a,b", [(2, 2, 2), (2, 2, 4), (2, 4, 6), (3, 2, 3), (3, 2, 2), (2, 3, 3)])
def test_tensor_decompose_against_root_orbits(p, a, b):
    """F_{p^a} (x) F_{p^b} = F_{p^b}[x]/(f) splits by the orbits of x -> x^{p^b} on the roots of f."""
    big = ff.gf_make(p, lcm(a, b))
    A = ff.arith(big)
    f = ff.gf_make(p, a).modulus
    roots = [x for x in A.elements() if A.eval_poly(f, x) == 0]
    seen, orbits = set(), []
    for r in roots:
        if r in seen:
            continue
        orb, y = [], r
        while y not in orb:
            orb.append(y)
            y = A.frob(y, b)
        seen.update(orb)
        orbits.append(orb)
    dec = ff.tensor_decompose(a, b, p)
    assert len(orbits) == dec.factors
    assert {len(o) * b for o in orbits} == {dec.factor_degree}


# ---------------------------------------------------------------------------
# properties

fields = st.sampled_from([(2, 1), (2, 2), (2, 3), (2, 4), (3, 1), (3, 2), (3, 3), (5, 2), (7, 1)])


@settings(max_examples=200, deadline=None)
@given(fields, st.data())
def test_field_axioms(pn, data):
    F = ff.gf_make(*pn)
    A = ff.arith(F)
    x, y, z = (data.draw(st.integers(0, F.order - 1)) for _ in range(3))
    assert A.add(x, y) == A.add(y, x)
    assert A.mul(x, y) == A.mul(y, x)
    assert A.mul(x, A.mul(y, z)) == A.mul(A.mul(x, y), z)
    assert A.mul(x, A.add(y, z)) == A.add(A.mul(x, y), A.mul(x, z))
    assert A.add(x, A.neg(x)) == 0
    if x:
        assert A.mul(x, A.inv(x)) == 1


@settings(max_examples=100, deadline=None)
@given(fields, st.data())
def test_frobenius_order(pn, data):
    F = ff.gf_make(*pn)
    A = ff.arith(F)
    x = data.draw(st.integers(0, F.order - 1))
    assert A.frob(x, F.n) == x
    assert A.frob(x) == A.pow(x, F.p)


@settings(max_examples=60, deadline=None)
@given(st.sampled_from([(2, 1, 2), (2, 2, 4), (2, 2, 6), (2, 3, 6), (3, 1, 2), (3, 2, 4)]), st.data())
def test_embedding_galois_equivariance(pab, data):
    p, a, b = pab
    src, dst = ff.gf_make(p, a), ff.gf_make(p, b)
    e = ff.embed(src, dst)
    k = data.draw(st.integers(0, 2 * a))
    x = data.draw(st.integers(0, src.order - 1))
    assert ff.arith(dst).frob(e(x), k) == e(ff.arith(src).frob(x, k))


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 16), st.integers(1, 16))
def test_tensor_dimension_bookkeeping(a, b):
    dec = ff.tensor_decompose(a, b)
    assert dec.factors * dec.factor_degree == a * b
    assert dec.factors == gcd(a, b)
    assert sum(len(dec.pairs(s)) for s in range(dec.factors)) == a * b
