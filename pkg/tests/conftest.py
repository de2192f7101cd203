"""Shared builders and randomized instance generators for the suite.

Generators are deterministic given a random.Random instance; tests seed
them explicitly so failures reproduce.
"""

import random
from fractions import Fraction

import pytest

from glueprint.decomposition_graph import (
    ENTIRE,
    SEMI,
    DecompGraph,
    EdgeRec,
    End,
    VertexRec,
)
from glueprint.exact_lattice import Sublattice, identity_form, qform
from glueprint.geometric_pieces import (
    BoundaryTorusData,
    HyperbolicPieceData,
    SeifertPieceData,
)
from glueprint.gluing_engine import Gluing, PreglueGraph, is_nondegenerate, make_gluing
from glueprint.torus_mapping_class import M2_SWAP, m2_inv_unimodular, m2_mul


def square_cusp_piece(n=1, basis=None):
    """Hyperbolic piece with identity cusp forms; default boundary image
    takes the first coordinate of every torus."""
    if basis is None:
        basis = tuple(
            tuple(1 if c == 2 * j else 0 for c in range(2 * n)) for j in range(n)
        )
    return HyperbolicPieceData(
        tuple(identity_form(2) for _ in range(n)), Sublattice(2 * n, basis)
    )


def seifert_piece(n, orientable=True, cones=(), genus=None, divisibilities=None, mu_shifts=None):
    if genus is None:
        genus = 1 if orientable else 3
    divisibilities = divisibilities or [1] * n
    mu_shifts = mu_shifts or [0] * n
    from math import lcm

    m = lcm(*cones) if cones else 1
    boundary = tuple(
        BoundaryTorusData(divisibility=d, mu=(m, s))
        for d, s in zip(divisibilities, mu_shifts)
    )
    return SeifertPieceData(orientable, genus, tuple(cones), boundary)


def single_edge_square_doc(k=0):
    """Two one-cusp square-cusp pieces joined by one edge with the k-twist
    gluing [[0, 1], [1, k]]."""
    g = DecompGraph(
        (VertexRec("u"), VertexRec("v")),
        (EdgeRec("e", ENTIRE, ("u", "v")),),
    )
    pg = PreglueGraph(g, {"u": square_cusp_piece(), "v": square_cusp_piece()})
    phi = make_gluing(g, {"e": ((0, 1), (1, k))})
    return pg, phi


def random_cusp_form(rng):
    c = rng.choice([Fraction(0), Fraction(0), Fraction(1, 4), Fraction(1, 2)])
    b = rng.choice([Fraction(1), Fraction(2), Fraction(3, 2), Fraction(5, 4)])
    # reduced positive form with unit minimum: 0 <= 2c <= 1 <= b
    return qform([[1, c], [c, b]])


def random_hyperbolic_piece(rng, n):
    forms = tuple(random_cusp_form(rng) for _ in range(n))
    rows = []
    for j in range(n):
        row = [0] * (2 * n)
        vec = rng.choice([(1, 0), (0, 1), (1, 1), (1, -1)])
        row[2 * j], row[2 * j + 1] = vec
        if j + 1 < n and rng.random() < 0.3:
            row[2 * (j + 1)] += rng.choice([-1, 1])
        rows.append(tuple(row))
    return HyperbolicPieceData(forms, Sublattice(2 * n, tuple(rows)))


def random_seifert_piece(rng, n, orientable):
    cones = tuple(sorted(rng.choice([(), (), (2,), (3,), (2, 3)])))
    from math import lcm

    m = lcm(*cones) if cones else 1
    boundary = tuple(
        BoundaryTorusData(
            divisibility=rng.choice([1, 1, 2]),
            mu=(m, rng.randint(-1, 1)),
        )
        for _ in range(n)
    )
    genus = rng.randint(1, 2) if orientable else rng.randint(3, 4)
    return SeifertPieceData(orientable, genus, cones, boundary)


GRAPH_SHAPES = [
    # (vertices as (id, semi?), edges as (id, kind, endpoints))
    ([("u", False), ("v", False)], [("e1", ENTIRE, ("u", "v"))]),
    ([("u", False), ("v", False)], [("e1", ENTIRE, ("u", "v")), ("e2", ENTIRE, ("u", "v"))]),
    ([("u", False)], [("e1", ENTIRE, ("u", "u"))]),
    ([("u", False)], [("k1", SEMI, ("u",))]),
    ([("u", False), ("v", False)], [("e1", ENTIRE, ("u", "v")), ("k1", SEMI, ("u",))]),
    ([("u", False), ("v", False), ("w", False)], [("e1", ENTIRE, ("u", "v")), ("e2", ENTIRE, ("v", "w"))]),
    ([("u", True), ("v", False)], [("e1", ENTIRE, ("u", "v"))]),
    ([("u", True), ("v", False)], [("e1", ENTIRE, ("u", "v")), ("e2", ENTIRE, ("u", "v"))]),
    ([("u", True)], [("e1", ENTIRE, ("u", "u"))]),
]


def random_preglue(rng, require_semi_or_loop=False, require_seifert_vertex=False):
    shapes = GRAPH_SHAPES
    if require_semi_or_loop:
        shapes = [
            s
            for s in shapes
            if any(kind == SEMI for _, kind, _ in s[1])
            or any(a == b for _, kind, (a, *rest) in s[1] for b in rest)
            or any(semi for _, semi in s[0])
        ]
    verts, edges = rng.choice(shapes)
    g = DecompGraph(
        tuple(VertexRec(v, SEMI if semi else ENTIRE) for v, semi in verts),
        tuple(EdgeRec(e, kind, tuple(ep)) for e, kind, ep in edges),
    )
    pieces = {}
    made_seifert = False
    for v, semi in verts:
        n = g.valence(v)
        if semi:
            pieces[v] = random_seifert_piece(rng, n, orientable=False)
            made_seifert = True
        else:
            if require_seifert_vertex and not made_seifert:
                choose_seifert = True
            else:
                choose_seifert = rng.random() < 0.5
            if choose_seifert:
                pieces[v] = random_seifert_piece(rng, n, orientable=True)
                made_seifert = True
            else:
                pieces[v] = random_hyperbolic_piece(rng, n)
    return PreglueGraph(g, pieces)


def random_unimodular(rng, size=2):
    m = ((1, 0), (0, 1))
    for _ in range(rng.randint(1, 3)):
        k = rng.randint(-2, 2)
        step = rng.choice([((1, 0), (k, 1)), ((1, k), (0, 1))])
        m = m2_mul(m, step)
    return m


def random_involution(rng):
    if rng.random() < 0.5:
        x = rng.randint(-2, 2)
        return ((x, 1), (1 - x * x, -x))
    c = rng.randint(-2, 2)
    s = rng.choice([1, -1])
    return ((s, 0), (c, -s))


def random_gluing(rng, pg):
    maps = {}
    for e in pg.graph.edges:
        end = End(e.id, 0)
        if e.kind == SEMI:
            maps[end] = random_involution(rng)
        else:
            mtx = m2_mul(M2_SWAP, random_unimodular(rng))
            maps[end] = mtx
            maps[End(e.id, 1)] = m2_inv_unimodular(mtx)
    phi = Gluing(maps)
    phi.validate(pg.graph)
    return phi


def random_nondegenerate_gluing(rng, pg, tries=60):
    for _ in range(tries):
        phi = random_gluing(rng, pg)
        if is_nondegenerate(pg, phi):
            return phi
    raise AssertionError("could not sample a nondegenerate gluing")


@pytest.fixture
def rng():
    return random.Random(20240811)
