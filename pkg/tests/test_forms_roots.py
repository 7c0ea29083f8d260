import random
from itertools import product

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as hst

from conftest import random_abs_quiver

from valquiver import catalog
from valquiver import forms_roots as fr
from valquiver import quiver_core as qc
from valquiver.errors import NotConnected
from valquiver.quiver_core import AbsValuedQuiver, Quiver, RelValuedQuiver

seeds = hst.integers(min_value=0, max_value=2**32 - 1)
SHAPES = [catalog.a2(), catalog.kronecker(), catalog.b2(), catalog.g2(), catalog.three_six_two()]


def _random_connected(rng: random.Random) -> AbsValuedQuiver:
    while True:
        g = random_abs_quiver(rng, max_vertices=4, max_value=4)
        if qc.is_connected(g.quiver):
            return g


def _reversed(g: AbsValuedQuiver) -> AbsValuedQuiver:
    return AbsValuedQuiver(g.quiver.opposite(), dict(g.d), dict(g.m))


def _naive_real_roots(g, B):
    """Oracle: iterate all reflections on the whole set until nothing new appears."""
    verts = g.quiver.vertices
    roots = set()
    for k in range(len(verts)):
        e = tuple(int(i == k) for i in range(len(verts)))
        roots |= {e, tuple(-c for c in e)}
    while True:
        new = {fr.simple_reflection(g, v, x) for x in roots for v in verts}
        new = {y for y in new if max(map(abs, y)) <= B} - roots
        if not new:
            return roots
        roots |= new


def test_forms_examples():
    g = catalog.three_six_two()
    assert fr.euler_form(g, (1, 0), (0, 1)) == -6
    beta = (1, 1)
    assert fr.symmetric_form(g, beta, (1, 0)) == 0
    assert fr.symmetric_form(g, beta, (0, 1)) == -2
    for v in g.quiver.vertices:
        assert fr.tits_form(g, fr.basis_vector(g, v)) == g.d[v]
    assert fr.tits_form(catalog.kronecker(), (1, 1)) == 0


def test_forms_index_mismatch():
    with pytest.raises(fr.IndexMismatch):
        fr.euler_form(catalog.a2(), (1, 0, 0), (1, 0))
    with pytest.raises(fr.IndexMismatch):
        fr.tits_form(catalog.a2(), {"9": 1})


def test_relative_inputs_are_lifted():
    d = qc.functor_F(catalog.doubled_halving_arrow())
    assert fr.cartan_matrix(d).rows() == fr.cartan_matrix(catalog.halving_arrow()).rows()
    assert fr.tits_form(d, (1, 1)) == fr.tits_form(catalog.halving_arrow(), (1, 1))


def test_cartan_examples():
    assert fr.cartan_matrix(catalog.three_six_two()).rows() == [[2, -2], [-3, 2]]
    assert fr.cartan_matrix(catalog.kronecker()).rows() == [[2, -2], [-2, 2]]
    assert fr.cartan_matrix(catalog.a2()).rows() == [[2, -1], [-1, 2]]


def test_cartan_rejects_loops():
    g = AbsValuedQuiver(Quiver.build(["1"], [("t", "1", "1")]), {"1": 1}, {"t": 1})
    with pytest.raises(fr.LoopPresent):
        fr.cartan_matrix(g)


def test_reflection_examples():
    g = catalog.three_six_two()
    for v in g.quiver.vertices:
        e = fr.basis_vector(g, v)
        assert fr.simple_reflection(g, v, e) == tuple(-c for c in e)
    assert fr.simple_reflection(g, "1", (1, 1)) == (1, 1)
    assert fr.simple_reflection(g, "2", (1, 1)) == (1, 2)


def test_real_root_examples():
    assert fr.positive(fr.real_roots_up_to(catalog.a2(), 2)) == [(0, 1), (1, 0), (1, 1)]
    assert fr.positive(fr.real_roots_up_to(catalog.b2(), 3)) == [(0, 1), (1, 0), (1, 1), (2, 1)]
    assert len(fr.positive(fr.real_roots_up_to(catalog.g2(), 4))) == 6


@pytest.mark.parametrize("g", SHAPES, ids=["a2", "kronecker", "b2", "g2", "3-6-2"])
def test_real_roots_against_naive_closure(g):
    assert set(fr.real_roots_up_to(g, 5)) == _naive_real_roots(g, 5)


def test_fundamental_and_imaginary_examples():
    assert fr.fundamental_set_member(catalog.three_six_two(), (1, 1))
    assert fr.is_imaginary_root(catalog.three_six_two(), (1, 1))
    kron = catalog.kronecker()
    imag = set(fr.imaginary_roots_up_to(kron, 5))
    for k in range(1, 6):
        assert fr.fundamental_set_member(kron, (k, k)) and (k, k) in imag
    assert fr.fundamental_set_up_to(catalog.a2(), 3) == []
    assert fr.imaginary_roots_up_to(catalog.a2(), 3) == []


def test_stable_examples():
    assert fr.stable_lattice(catalog.kronecker()) == [(1, 1)]
    assert fr.stable_lattice(catalog.a2()) == []
    assert fr.stable_lattice(catalog.three_six_two()) == []
    assert fr.determinant(fr.cartan_matrix(catalog.three_six_two()).symmetrized()) == -12


def test_classify_examples():
    assert fr.classify_type(catalog.a2()) == fr.FINITE
    assert fr.classify_type(catalog.kronecker()) == fr.AFFINE
    assert fr.classify_type(catalog.three_six_two()) == fr.INDEFINITE
    with pytest.raises(NotConnected):
        fr.classify_type(AbsValuedQuiver.build({"1": 1, "2": 1}, []))


def test_affine_cycle_and_d4_tilde():
    cycle = AbsValuedQuiver.build({"1": 1, "2": 1, "3": 1}, [("a", "1", "2", 1), ("b", "2", "3", 1), ("c", "1", "3", 1)])
    assert fr.classify_type(cycle) == fr.AFFINE
    assert fr.stable_lattice(cycle) == [(1, 1, 1)]
    star = AbsValuedQuiver.build({c: 1 for c in "o1234"}, [(f"a{k}", k, "o", 1) for k in "1234"])
    assert fr.classify_type(star) == fr.AFFINE


# ---------------------------------------------------------------------------
# properties

def _float_type(g) -> str:
    """Dual route: eigenvalues of the symmetrized Cartan matrix in floating point."""
    eig = np.linalg.eigvalsh(np.array(fr.cartan_matrix(g).symmetrized(), dtype=float))
    if eig.min() > 1e-9:
        return fr.FINITE
    if eig.min() > -1e-9 and sum(abs(x) < 1e-9 for x in eig) == 1:
        return fr.AFFINE
    return fr.INDEFINITE


@settings(max_examples=150, deadline=None)
@given(seeds)
def test_classification_matches_eigenvalues(seed):
    g = _random_connected(random.Random(seed))
    assert fr.classify_type(g) == _float_type(g)
    assert fr.classify_type(qc.crush_abs(g)) == fr.classify_type(g)


@settings(max_examples=150, deadline=None)
@given(seeds)
def test_cartan_invariants(seed):
    g = _random_connected(random.Random(seed))
    C = fr.cartan_matrix(g)
    rows = C.rows()
    n = len(rows)
    for i in range(n):
        assert rows[i][i] == 2
        for j in range(n):
            if i != j:
                assert rows[i][j] <= 0 and (rows[i][j] == 0) == (rows[j][i] == 0)
    sym = C.symmetrized()
    assert all(sym[i][j] == sym[j][i] for i in range(n) for j in range(n))


@settings(max_examples=150, deadline=None)
@given(seeds, hst.data())
def test_forms_orientation_independent_and_weyl_invariant(seed, data):
    g = _random_connected(random.Random(seed))
    n = len(g.quiver.vertices)
    x = tuple(data.draw(hst.integers(-5, 5)) for _ in range(n))
    y = tuple(data.draw(hst.integers(-5, 5)) for _ in range(n))
    rev = _reversed(g)
    assert fr.symmetric_form(g, x, y) == fr.symmetric_form(rev, x, y)
    assert fr.tits_form(g, x) == fr.tits_form(rev, x)
    for v in g.quiver.vertices:
        assert fr.tits_form(g, fr.simple_reflection(g, v, x)) == fr.tits_form(g, x)


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_root_set_properties(seed):
    g = _random_connected(random.Random(seed))
    real = fr.real_roots_up_to(g, 3)
    values = set(g.d.values())
    assert set(real) == {tuple(-c for c in r) for r in real}
    assert all(fr.tits_form(g, r) in values for r in real)
    assert all(fr.tits_form(g, r) <= 0 for r in fr.imaginary_roots_up_to(g, 3))


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_stable_lattice_against_brute_force(seed):
    g = _random_connected(random.Random(seed))
    basis = fr.stable_lattice(g)
    n = len(g.quiver.vertices)
    sym = np.array(fr.symmetric_matrix(g), dtype=np.int64)
    for b in basis:
        assert not (sym @ np.array(b)).any()
    box = [x for x in product(range(-3, 4), repeat=n) if any(x) and not (sym @ np.array(x)).any()]
    if not basis:
        assert box == []
        return
    B = np.array(basis, dtype=float)
    for x in box:
        coeffs, *_ = np.linalg.lstsq(B.T, np.array(x, dtype=float), rcond=None)
        assert np.allclose(coeffs, np.round(coeffs)) and np.allclose(B.T @ coeffs, x)
