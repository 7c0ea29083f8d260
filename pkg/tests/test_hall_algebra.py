import random
from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as hst

from valquiver import catalog
from valquiver import representations as rp
from valquiver.errors import ValidationError
from valquiver.hall_algebra import (HallAlgebra, HallElement, HallScalar, bialgebra_checks, comultiplication,
                                    green_form, hall_product, quantum_binomial, quantum_binomial_laurent,
                                    serre_check, simple_monomials, v_power)
from valquiver.species_tensor import BimoduleSummand, FqSpecies

A2 = FqSpecies.untwisted(catalog.a2(), 2)
KRON = FqSpecies.untwisted(catalog.kronecker(), 2)
B2 = FqSpecies.untwisted(catalog.b2(), 2)


@pytest.fixture(scope="module")
def a2():
    return HallAlgebra(A2)


def _p(s=A2):
    return rp.make_representation(s, (1, 1), {"a": [[1]]})


# ---------------------------------------------------------------------------
# scalars and binomials

def test_scalar_examples():
    v = HallScalar.of(0, 1, 2)
    assert v * v == HallScalar.of(2, 0, 2)
    assert v * HallScalar.of(0, Fraction(1, 2), 2) == HallScalar.of(1, 0, 2)
    assert v.inverse() == HallScalar.of(0, Fraction(1, 2), 2)
    assert v_power(-3, 3) * v_power(3, 3) == HallScalar.of(1, 0, 3)
    assert HallScalar.of(1, 0, 2).to_json() == {"a": "1/1", "b": "0/1"}
    with pytest.raises(ValidationError):
        HallScalar.of(1, 0, 2) + HallScalar.of(1, 0, 3)


rationals = hst.fractions(min_value=-20, max_value=20, max_denominator=12)


@settings(max_examples=200, deadline=None)
@given(hst.sampled_from([2, 3, 4, 5]), rationals, rationals, rationals, rationals, rationals, rationals)
def test_scalar_ring_axioms(q, a, b, c, d, e, f):
    x, y, z = HallScalar.of(a, b, q), HallScalar.of(c, d, q), HallScalar.of(e, f, q)
    assert x * y == y * x
    assert (x * y) * z == x * (y * z)
    assert x * (y + z) == x * y + x * z
    assert x - x == HallScalar.of(0, 0, q)
    # prime q is not a square, so every nonzero scalar is a unit
    if not x.is_zero() and q != 4:
        assert x * x.inverse() == HallScalar.of(1, 0, q)


def _binomial_by_factorials(m, k, t: Fraction) -> Fraction:
    """Oracle: the factorial formula with [n] = (t^n - t^-n)/(t - t^-1)."""
    def br(n):
        return (t ** n - t ** -n) / (t - 1 / t)

    def fact(n):
        out = Fraction(1)
        for i in range(1, n + 1):
            out *= br(i)
        return out
    return fact(m) / (fact(k) * fact(m - k))


def test_binomial_examples():
    q = 2
    v, vi = v_power(1, q), v_power(-1, q)
    assert quantum_binomial(2, 1, 1, q) == v + vi
    assert quantum_binomial(3, 1, 1, q) == v_power(2, q) + 1 + v_power(-2, q)
    for m in range(5):
        for d in (1, 2, 3):
            assert quantum_binomial(m, 0, d, q) == HallScalar.of(1, 0, q)
    with pytest.raises(ValidationError):
        quantum_binomial_laurent(2, 3)


@pytest.mark.parametrize("m", range(0, 7))
def test_binomial_against_factorials(m):
    for k in range(m + 1):
        poly = quantum_binomial_laurent(m, k)
        for t in (Fraction(2), Fraction(3, 2), Fraction(5)):
            assert sum(c * t ** e for e, c in poly.items()) == _binomial_by_factorials(m, k, t)
        assert poly == {-e: c for e, c in poly.items()}  # bar-invariant


# ---------------------------------------------------------------------------
# products, coproduct, form

def test_product_examples(a2):
    S1, S2 = rp.simple(A2, "1"), rp.simple(A2, "2")
    E1, E2 = a2.element(S1), a2.element(S2)
    split = a2.element(rp.direct_sum(S1, S2))
    vinv = a2.scalar(0, Fraction(1, 2))
    assert hall_product(a2, E1, E2) == (split + a2.element(_p())).scale(vinv)
    assert hall_product(a2, E2, E1) == split
    assert hall_product(a2, E1, E1) == a2.element(rp.direct_sum(S1, S1)).scale(a2.scalar(0, 3))
    assert hall_product(a2, a2.one(), E1) == E1 == hall_product(a2, E1, a2.one())


def test_coproduct_examples(a2):
    S1, S2 = rp.simple(A2, "1"), rp.simple(A2, "2")
    one = a2.zero_label()
    for S in (S1, S2):
        lab = a2.label(S)
        assert comultiplication(a2, a2.element(S)).terms == {(lab, one): a2.scalar(1), (one, lab): a2.scalar(1)}
    lp = a2.label(_p())
    expected = {(lp, one): a2.scalar(1), (one, lp): a2.scalar(1),
                (a2.label(S1), a2.label(S2)): a2.scalar(0, Fraction(1, 2))}
    assert comultiplication(a2, a2.element(_p())).terms == expected
    assert comultiplication(a2, a2.one()).terms == {(one, one): a2.scalar(1)}


def test_form_examples(a2):
    S1, S2 = rp.simple(A2, "1"), rp.simple(A2, "2")
    E1, E2 = a2.element(S1), a2.element(S2)
    assert green_form(a2, E1, E1) == a2.scalar(1)
    assert green_form(a2, E1, E2) == a2.scalar(0)
    both = a2.element(rp.direct_sum(S1, S1))
    assert green_form(a2, both, both) == a2.scalar(Fraction(1, 6))


def test_serialization(a2):
    E1 = a2.simple("1")
    assert E1.to_json() == {"terms": [{"class": {"dims": [1, 0], "code": 0}, "a": "1/1", "b": "0/1"}]}


def test_aut_orbit_stabilizer_matches_end_enumeration():
    for s, dims in [(A2, (2, 1)), (KRON, (1, 1)), (B2, (2, 1)), (KRON, (2, 1))]:
        H = HallAlgebra(s)
        for lab in H.classes(dims):
            assert H.aut(lab) == rp.aut_order(H.rep(lab))


@pytest.mark.parametrize("s,bound", [(A2, (2, 2)), (KRON, (2, 1)), (B2, (2, 1)),
                                     (FqSpecies.untwisted(catalog.a2(), 3), (1, 2))])
def test_riedtmann_sum(s, bound):
    """Sum_C g_{AB}^C |Aut A||Aut B| / |Aut C| = |Ext(A,B)| / |Hom(A,B)| = q^{-<A,B>}."""
    H = HallAlgebra(s)
    dims = [d for d in product(*(range(b + 1) for b in bound))]
    for da, db in product(dims, repeat=2):
        total = tuple(x + y for x, y in zip(da, db))
        if any(t > b for t, b in zip(total, bound)):
            continue
        for A in H.classes(da):
            for B in H.classes(db):
                lhs = sum(Fraction(H.hall_number(A, B, C) * H.aut(A) * H.aut(B), H.aut(C))
                          for C in H.classes(total))
                assert lhs == Fraction(H.q) ** (-H.euler(da, db))


def test_hall_numbers_agree_with_direct_count():
    H = HallAlgebra(KRON)
    for C in H.classes((1, 1)):
        for A in H.classes((1, 0)):
            for B in H.classes((0, 1)):
                assert H.hall_number(A, B, C) == rp.hall_number(H.rep(A), H.rep(B), H.rep(C))


@pytest.mark.parametrize("s", [A2, FqSpecies.untwisted(catalog.a2(), 3), B2, KRON,
                               FqSpecies.untwisted(catalog.g2(), 2)])
def test_serre_relations(s):
    H = HallAlgebra(s)
    assert serre_check(H, "1", "2") and serre_check(H, "2", "1")


def test_serre_needs_distinct_vertices(a2):
    with pytest.raises(ValidationError):
        serre_check(a2, "1", "1")


def test_serre_fails_with_wrong_coefficient(a2):
    # the same alternating sum with the binomial dropped is not zero
    E1, E2 = a2.simple("1"), a2.simple("2")
    wrong = a2.product(a2.product(E1, E1), E2) - a2.product(a2.product(E1, E2), E1) + \
        a2.product(E2, a2.product(E1, E1))
    assert not wrong.is_zero()


def test_twisted_species_serre():
    # GF(4) at both ends joined by a single twisted summand behaves like A2 over GF(4)
    s = FqSpecies.build(2, 1, {"1": 2, "2": 2}, [("a", "1", "2", [BimoduleSummand(2, 1, 0)])])
    H = HallAlgebra(s)
    assert serre_check(H, "1", "2") and serre_check(H, "2", "1")


def test_bialgebra_examples(a2):
    assert bialgebra_checks(a2, [("1",)]).passed
    assert bialgebra_checks(a2, [()]).passed
    E1, E2 = a2.simple("1"), a2.simple("2")
    assert a2.product(a2.product(E1, E2), E1) == a2.product(E1, a2.product(E2, E1))


@pytest.mark.parametrize("s", [A2, KRON, B2])
def test_bialgebra_conditions_up_to_degree_three(s):
    H = HallAlgebra(s)
    report = bialgebra_checks(H, simple_monomials(H.vertices, 3), 3)
    assert report.passed, report.to_json()
    assert report.checked > 0


# ---------------------------------------------------------------------------
# properties

def _random_element(rng, H, max_dim=1):
    pairs = []
    for _ in range(rng.randint(1, 3)):
        dims = tuple(rng.randint(0, max_dim) for _ in H.vertices)
        lab = rng.choice(H.classes(dims))
        pairs.append((lab, H.scalar(Fraction(rng.randint(-3, 3), rng.randint(1, 3)), rng.randint(-2, 2))))
    return HallElement.build(pairs)


@settings(max_examples=40, deadline=None)
@given(hst.integers(0, 2**32 - 1))
def test_products_are_graded_and_bilinear(seed):
    rng = random.Random(seed)
    H = HallAlgebra(rng.choice([A2, KRON, B2]))
    x, y, z = (_random_element(rng, H) for _ in range(3))
    xy = H.product(x, y)
    sums = {tuple(a + b for a, b in zip(A.dims, B.dims)) for A in x.terms for B in y.terms}
    assert H.degree(xy) <= sums
    assert H.product(x, y + z) == xy + H.product(x, z)
    assert H.product(x, H.product(y, z)) == H.product(H.product(x, y), z)


@settings(max_examples=40, deadline=None)
@given(hst.integers(0, 2**32 - 1))
def test_coproduct_and_form_properties(seed):
    rng = random.Random(seed)
    H = HallAlgebra(rng.choice([A2, KRON]))
    x, y, z = (_random_element(rng, H) for _ in range(3))
    assert H.form(x, y) == H.form(y, x)
    assert H.delta(H.product(y, z)) == H.tensor_product(H.delta(y), H.delta(z))
    assert H.tensor_form(H.delta(x), H.tensor(y, z)) == H.form(x, H.product(y, z))
