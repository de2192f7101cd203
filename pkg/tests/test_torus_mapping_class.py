import random
from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from glueprint.errors import InvalidSlopeError, UnsupportedError
from glueprint.exact_lattice import diag_form, identity_form, qform
from glueprint.torus_mapping_class import (
    M2_NEG,
    DoubleCosetRep,
    TorusAuto,
    dehn_twist,
    double_coset_reps,
    is_stabilized,
    m2_det,
    m2_mul,
    pullback_form,
    same_double_coset,
    stabilizer_generators,
    twisted_sum_delta,
)


def test_dehn_twist_formula():
    d = dehn_twist((0, 1))
    assert d.apply((1, 0)) == (1, 1)
    assert d.apply((0, 1)) == (0, 1)
    assert d.det == 1


def test_dehn_twist_fixes_its_slope():
    for gamma in [(0, 1), (1, 0), (2, 1), (3, -2)]:
        assert dehn_twist(gamma).apply(gamma) == gamma


def test_dehn_twist_direction_independent():
    for gamma in [(0, 1), (1, 0), (2, 1)]:
        neg = (-gamma[0], -gamma[1])
        assert dehn_twist(gamma).matrix == dehn_twist(neg).matrix


def test_dehn_twist_rejects_imprimitive():
    with pytest.raises(InvalidSlopeError):
        dehn_twist((2, 2))


def test_twist_powers_add():
    d = dehn_twist((0, 1))
    d3 = d * d * d
    assert d3.matrix == ((1, 0), (3, 1))
    # twists along the same slope commute
    e = dehn_twist((1, 1))
    assert (e * e).matrix == m2_mul(e.matrix, e.matrix)


@settings(max_examples=80, deadline=None)
@given(st.integers(-6, 6), st.integers(-6, 6), st.integers(0, 5))
def test_twist_power_pattern(g1, g2, k):
    # k-fold composition equals I + k * outer(gamma, J gamma): the twist
    # direction matrix is nilpotent, so powers are affine in k
    from math import gcd as _gcd

    if _gcd(g1, g2) != 1:
        return
    d = dehn_twist((g1, g2))
    power = ((1, 0), (0, 1))
    for _ in range(k):
        power = m2_mul(power, d.matrix)
    expected = (
        (1 + k * g1 * g2, -k * g1 * g1),
        (k * g2 * g2, 1 - k * g1 * g2),
    )
    assert power == expected


def test_pullback_examples():
    q = identity_form(2)
    assert pullback_form(q, TorusAuto(((1, 0), (0, 1)))).gram == q.gram
    qdeg = diag_form(1, 0)
    for k in range(-3, 4):
        assert pullback_form(qdeg, TorusAuto(((1, 0), (k, 1)))).gram == qdeg.gram
    swap = TorusAuto(((0, 1), (1, 0)))
    assert pullback_form(q, swap).gram == q.gram


def brute_force_stabilizer(q, box=3):
    out = []
    for a, b, c, d in product(range(-box, box + 1), repeat=4):
        m = ((a, b), (c, d))
        if abs(m2_det(m)) != 1:
            continue
        if is_stabilized(q, TorusAuto(m)):
            out.append(m)
    return set(out)


def closure(generators, box):
    gens = [g.matrix for g in generators]
    gens += [tuple(tuple(-x for x in row) for row in g) for g in gens]
    seen = {((1, 0), (0, 1))}
    frontier = [((1, 0), (0, 1))]
    while frontier:
        m = frontier.pop()
        for g in gens:
            for nxt in (m2_mul(m, g), m2_mul(g, m)):
                if max(abs(x) for row in nxt for x in row) > box:
                    continue
                if nxt not in seen:
                    seen.add(nxt)
                    frontier.append(nxt)
    return seen


def test_stabilizer_degenerate_form():
    # solve q(sigma v) = q(v) over unimodular matrices: the window of the
    # generated group must match the brute-force stabilizer window
    q = diag_form(1, 0)
    gens = stabilizer_generators(q)
    assert any(g.matrix == ((1, 0), (1, 1)) for g in gens)  # twist along (0,1)
    assert any(g.matrix == M2_NEG for g in gens)
    got = {m for m in closure(gens, 3)}
    assert got == brute_force_stabilizer(q, 3)


def test_stabilizer_identity_order_eight():
    group = stabilizer_generators(identity_form(2))
    assert len(group) == 8
    assert {m2_det(g.matrix) for g in group} == {1, -1}
    assert set(g.matrix for g in group) == brute_force_stabilizer(identity_form(2), 1)


def test_stabilizer_diag23():
    # unequal diagonal kills swaps; reflections survive in GL(2, Z)
    group = stabilizer_generators(diag_form(2, 3))
    assert set(g.matrix for g in group) == brute_force_stabilizer(diag_form(2, 3), 1)
    assert len(group) == 4


def test_stabilizer_rejects_zero_form():
    with pytest.raises(UnsupportedError):
        stabilizer_generators(qform([[0, 0], [0, 0]]))


def test_neg_identity_in_every_stabilizer():
    for q in [identity_form(2), diag_form(1, 0), diag_form(2, 3), qform([[2, 1], [1, 2]])]:
        gens = stabilizer_generators(q)
        assert M2_NEG in closure(gens, 2)


def test_double_coset_invariance_random():
    rng = random.Random(5)
    q, qp = diag_form(1, 0), diag_form(0, 1)
    left = stabilizer_generators(q)
    right = stabilizer_generators(qp)
    sigma = TorusAuto(((2, 1), (1, 1)))
    base = twisted_sum_delta(q, qp, sigma)
    for _ in range(30):
        t = rng.choice(left)
        tp = rng.choice(right)
        moved = m2_mul(m2_mul(t.matrix, sigma.matrix), tp.matrix)
        assert twisted_sum_delta(q, qp, TorusAuto(moved)) == base


def brute_force_cosets(q, qp, bound, box=6):
    """Group all in-budget matrices with entries <= box into classes by
    the exact same-coset relation."""
    classes = []
    for a, b, c, d in product(range(-box, box + 1), repeat=4):
        if a * d - b * c != 1:
            continue
        s = TorusAuto(((a, b), (c, d)))
        delta = twisted_sum_delta(q, qp, s)
        if not 0 < delta < bound:
            continue
        for cls in classes:
            if cls[0][1] == delta and same_double_coset(q, qp, cls[0][0], s):
                cls.append((s, delta))
                break
        else:
            classes.append([(s, delta)])
    return classes


def test_double_coset_first_family_examples():
    q, qp = diag_form(1, 0), diag_form(0, 1)
    reps = double_coset_reps(q, qp, 5)
    assert [r.delta for r in reps] == [1, 4]
    assert reps[0].rep.matrix == ((1, 0), (0, 1))
    # the second class is the one containing [[2, 1], [1, 1]]
    assert same_double_coset(q, qp, reps[1].rep, TorusAuto(((2, 1), (1, 1))))
    assert double_coset_reps(q, qp, 1) == []


def test_double_coset_first_family_against_brute_force():
    q, qp = diag_form(1, 0), diag_form(0, 1)
    for bound in (1, 2, 5, 10):
        reps = double_coset_reps(q, qp, bound)
        classes = brute_force_cosets(q, qp, bound)
        assert len(reps) == len(classes)
        for cls in classes:
            hits = [
                r
                for r in reps
                if r.delta == cls[0][1] and same_double_coset(q, qp, r.rep, cls[0][0])
            ]
            assert len(hits) == 1


def test_double_coset_identity_identity():
    q = identity_form(2)
    reps = double_coset_reps(q, q, 5)
    classes = brute_force_cosets(q, q, 5, box=3)
    assert len(reps) == len(classes) == 1
    assert reps[0].delta == 4


def test_double_coset_mixed_degenerate_definite():
    q, qp = diag_form(1, 0), identity_form(2)
    for bound in (2, 3, 6):
        reps = double_coset_reps(q, qp, bound)
        classes = brute_force_cosets(q, qp, bound, box=4)
        assert len(reps) == len(classes)
        for r in reps:
            assert 0 < r.delta < bound
        # and the mirror orientation of the same data
        reps2 = double_coset_reps(qp, q, bound)
        classes2 = brute_force_cosets(qp, q, bound, box=4)
        assert len(reps2) == len(classes2)


def test_double_coset_skewed_forms_against_brute_force():
    # degenerate form with kernel off the axes: (x + 2y)^2 has Gram
    # [[1, 2], [2, 4]] and kernel (2, -1)
    skew = qform([[1, 2], [2, 4]])
    assert skew.kernel_rank == 1
    definite = qform([[2, 1], [1, 3]])
    for pair in [(skew, definite), (definite, skew), (skew, diag_form(1, 0))]:
        q, qp = pair
        for bound in (3, 7):
            reps = double_coset_reps(q, qp, bound)
            classes = brute_force_cosets(q, qp, bound, box=5)
            assert len(reps) == len(classes)
            for cls in classes:
                hits = [
                    r
                    for r in reps
                    if r.delta == cls[0][1]
                    and same_double_coset(q, qp, r.rep, cls[0][0])
                ]
                assert len(hits) == 1


def test_same_double_coset_is_symmetric():
    # the decision procedure parameterizes only the right stabilizer, so
    # check that the relation it decides is nevertheless symmetric
    rng = random.Random(17)
    pairs = [
        (diag_form(1, 0), diag_form(0, 1)),
        (diag_form(1, 0), identity_form(2)),
        (identity_form(2), identity_form(2)),
        (qform([[1, 2], [2, 4]]), qform([[2, 1], [1, 3]])),
    ]
    mats = []
    for _ in range(14):
        m = ((1, 0), (0, 1))
        for _ in range(rng.randint(1, 3)):
            k = rng.randint(-2, 2)
            step = rng.choice([((1, 0), (k, 1)), ((1, k), (0, 1))])
            m = m2_mul(m, step)
        mats.append(TorusAuto(m))
    for q, qp in pairs:
        for i, s1 in enumerate(mats):
            for s2 in mats[i + 1 :]:
                assert same_double_coset(q, qp, s1, s2) == same_double_coset(
                    q, qp, s2, s1
                )


def test_double_coset_reps_have_det_plus_one():
    reps = double_coset_reps(diag_form(1, 0), diag_form(0, 1), 10)
    assert all(r.rep.det == 1 for r in reps)
    assert len(reps.derivation) >= 1


def test_double_coset_rejects_zero_form():
    with pytest.raises(UnsupportedError):
        double_coset_reps(qform([[0, 0], [0, 0]]), identity_form(2), 5)


def test_coset_rep_validation():
    with pytest.raises(Exception):
        DoubleCosetRep(TorusAuto(((0, 1), (1, 0))), Fraction(1))  # det -1
    with pytest.raises(Exception):
        DoubleCosetRep(TorusAuto(((1, 0), (0, 1))), Fraction(0))  # delta 0
