import random
from math import lcm

import pytest

from valquiver.quiver_core import AbsValuedQuiver, Quiver, QuiverAutomorphism
from valquiver.species_tensor import BimoduleSummand, FqSpecies


def random_abs_quiver(rng: random.Random, max_vertices: int = 6, max_value: int = 6,
                      acyclic: bool = False, max_arrows: int = 6) -> AbsValuedQuiver:
    """Random valid absolute valued quiver without loops; arrows whose endpoint lcm exceeds max_value are skipped."""
    n = rng.randint(1, max_vertices)
    verts = [str(i) for i in range(1, n + 1)]
    d = {v: rng.randint(1, max_value) for v in verts}
    arrows = []
    for k in range(rng.randint(0, max_arrows)):
        t, h = rng.choice(verts), rng.choice(verts)
        if t == h:
            continue
        if acyclic:
            t, h = sorted((t, h), key=int)
        base = lcm(d[t], d[h])
        if base > max_value:
            continue
        arrows.append((f"r{k}", t, h, base * rng.randint(1, max_value // base)))
    return AbsValuedQuiver.build(d, arrows)


def random_species(rng: random.Random, p: int | None = None, max_vertices: int = 3,
                   max_degree: int = 3, max_arrows: int = 4, max_summands: int = 2) -> FqSpecies:
    """Random acyclic species with twisted summands and parallel arrows."""
    p = p or rng.choice([2, 3])
    n = rng.randint(1, max_vertices)
    verts = [str(i) for i in range(1, n + 1)]
    d = {v: rng.randint(1, max_degree) for v in verts}
    arrows = []
    for k in range(rng.randint(0, max_arrows) if n > 1 else 0):
        t, h = sorted(rng.sample(verts, 2), key=int)
        base = lcm(d[t], d[h])
        summands = [BimoduleSummand(base * rng.randint(1, 2), rng.randrange(d[h]), rng.randrange(d[t]))
                    for _ in range(rng.randint(1, max_summands))]
        arrows.append((f"r{k}", t, h, summands))
    return FqSpecies.build(p, 1, d, arrows)


def random_automorphism_quiver(rng: random.Random) -> tuple[Quiver, QuiverAutomorphism]:
    """Unfold a random valued quiver, giving a quiver with an admissible automorphism."""
    from valquiver.quiver_core import unfold
    return unfold(random_abs_quiver(rng, max_vertices=4, max_value=4))


@pytest.fixture
def rng():
    return random.Random(20240917)
