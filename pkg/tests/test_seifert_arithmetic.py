import random
from fractions import Fraction
from math import gcd

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from glueprint.errors import (
    FormulaInapplicableError,
    PreconditionError,
    ValidationError,
)
from glueprint.seifert_arithmetic import (
    DominationBudget,
    SeifertInvariants,
    area_constant,
    chi,
    distortion_budget,
    enumerate_targets,
    euler_number,
    normalize,
    sinh_interval,
    torsion_bound,
    torsion_order,
)


def smith_torsion_oracle(s: SeifertInvariants) -> int:
    """Independent oracle: Smith normal form of the standard crossed
    presentation of H_1.

    Generators are the fiber h and one section class x_i per exceptional
    fiber, with b0 carried by an extra (1, b0) fiber: relations are
    x_0 + b0 h = 0, a_i x_i + b_i h = 0, and the h-free section relation
    x_0 + x_1 + ... + x_s = 0.  The 2g torus generators only contribute
    free summands, so the torsion order is the product of the invariant
    factors.
    """
    from sympy import Matrix
    from sympy.matrices.normalforms import smith_normal_form

    srank = len(s.pairs)
    n = srank + 2  # x_0 .. x_s, h
    rows = [[1] + [0] * srank + [s.b0]]
    for i, (a, b) in enumerate(s.pairs):
        row = [0] * n
        row[i + 1] = a
        row[n - 1] = b
        rows.append(row)
    rows.append([1] * (srank + 1) + [0])
    snf = smith_normal_form(Matrix(rows))
    prod = 1
    for i in range(n):
        prod *= int(snf[i, i])
    return abs(prod)


def random_normalized(rng):
    while True:
        srank = rng.randint(0, 4)
        pairs = []
        for _ in range(srank):
            a = rng.randint(2, 9)
            b = rng.choice([b for b in range(1, a) if gcd(a, b) == 1])
            pairs.append((a, b))
        s = SeifertInvariants(rng.randint(0, 2), rng.randint(-5, 5), tuple(pairs))
        if euler_number(s) != 0:
            return s


def test_normalize_examples():
    s = normalize(0, 0, [(2, 3)])
    assert (s.g, s.b0, s.pairs) == (0, 1, ((2, 1),))
    s = normalize(0, 0, [(2, -1)])
    assert (s.g, s.b0, s.pairs) == (0, -1, ((2, 1),))
    s = normalize(1, -2, [(3, 2), (5, 4)])
    assert (s.g, s.b0, s.pairs) == (1, -2, ((3, 2), (5, 4)))


@settings(max_examples=80, deadline=None)
@given(
    st.integers(0, 2),
    st.integers(-4, 4),
    st.lists(st.tuples(st.integers(2, 7), st.integers(-9, 9)), max_size=4),
)
def test_normalize_preserves_euler_number_and_is_idempotent(g, b0, raw):
    def raw_euler(b0, raw):
        return -Fraction(b0) - sum(Fraction(b, a) for a, b in raw)

    try:
        s = normalize(g, b0, raw)
    except ValidationError:
        return  # a reduced pair had gcd > 1: rejected input
    assert euler_number(s) == raw_euler(b0, raw)
    again = normalize(s.g, s.b0, s.pairs)
    assert again == s


def test_chi_examples():
    assert chi((0, (2, 3, 7))) == Fraction(-1, 42)
    assert chi((1, ())) == 0
    assert chi((0, (2, 4, 4))) == 0
    s = SeifertInvariants(0, -1, ((2, 1), (3, 1), (5, 1)))
    assert chi(s) == Fraction(1, 30)


def test_chi_turnover_is_maximal_negative():
    values = []
    for p in range(2, 60):
        for q in range(p, 60):
            for r in range(q, 60):
                x = chi((0, (p, q, r)))
                if x < 0:
                    values.append(x)
    assert max(values) == Fraction(-1, 42)
    # larger cone orders only decrease chi below any fixed triple, so the
    # scan window is conclusive for triples; more cone points or genus
    # make chi smaller still
    assert chi((0, (2, 3, 7))) == Fraction(-1, 42)


def test_euler_number_examples():
    assert euler_number(SeifertInvariants(0, -2, ())) == 2
    s = SeifertInvariants(0, -1, ((2, 1), (3, 1), (5, 1)))
    assert euler_number(s) == Fraction(-1, 30)
    assert euler_number(SeifertInvariants(1, 0, ((2, 1),))) == Fraction(-1, 2)


def test_torsion_order_examples():
    assert torsion_order(SeifertInvariants(0, -1, ((2, 1), (3, 1), (5, 1)))) == 1
    assert torsion_order(SeifertInvariants(0, -2, ())) == 2
    assert torsion_order(SeifertInvariants(0, -1, ((2, 1), (2, 1), (2, 1)))) == 4


def test_torsion_order_inapplicable_when_e_zero():
    with pytest.raises(FormulaInapplicableError):
        torsion_order(SeifertInvariants(1, 0, ()))


def test_torsion_matches_smith_oracle():
    rng = random.Random(101)
    for _ in range(120):
        s = random_normalized(rng)
        assert torsion_order(s) == smith_torsion_oracle(s)


def test_torsion_invariant_under_normalization():
    rng = random.Random(33)
    for _ in range(40):
        srank = rng.randint(0, 3)
        raw = []
        for _ in range(srank):
            a = rng.randint(2, 7)
            b = rng.choice([b for b in range(1, a) if gcd(a, b) == 1])
            b += a * rng.randint(-3, 3)
            raw.append((a, b))
        b0 = rng.randint(-4, 4)
        s = normalize(1, b0, raw)
        if euler_number(s) == 0:
            continue
        shifted = normalize(1, b0 - 1, [(raw[0][0], raw[0][1] + raw[0][0])] + raw[1:]) if raw else None
        assert torsion_order(s) == smith_torsion_oracle(s)
        if shifted is not None:
            assert torsion_order(shifted) == torsion_order(s)


def test_torsion_bound_examples():
    assert torsion_bound(1, 1, 1) == 1
    assert torsion_bound(2, 2, 2) == 8
    assert torsion_bound(3, 9, 1) == 27


def test_area_constant_examples():
    assert area_constant(2) == 32076
    assert area_constant(1) == 351
    assert all(area_constant(n + 1) > area_constant(n) for n in range(1, 8))


def test_sinh_interval_encloses():
    import math

    lo, hi = sinh_interval(Fraction(1, 20))
    assert lo <= Fraction(math.sinh(0.05)).limit_denominator(10**15) <= hi or (
        float(lo) <= math.sinh(0.05) <= float(hi)
    )
    assert (hi - lo) / lo < Fraction(1, 10**12)


def test_distortion_budget_interval():
    bound = distortion_budget(DominationBudget(t=1, h=1, eps3=Fraction(1, 10)))
    assert bound.area_coefficient == 32076
    assert bound.value_lo < bound.value_hi
    assert bound.relative_width() < Fraction(1, 10**9)
    assert bound.piece_bound == 2 and bound.cutting_bound == 1
    # decreasing in eps3
    wider = distortion_budget(DominationBudget(t=1, h=1, eps3=Fraction(1, 5)))
    assert wider.value_hi < bound.value_lo
    # t = 2 numerator
    t2 = distortion_budget(DominationBudget(t=2, h=1))
    assert t2.area_coefficient == 27**4 * 160


def test_budget_validation():
    with pytest.raises(ValidationError):
        DominationBudget(t=0, h=1)
    with pytest.raises(ValidationError):
        DominationBudget(t=1, h=1, eps3=Fraction(0))


def chi_zero_bases_oracle():
    """Independent enumeration of closed orientable flat bases: solutions
    of 2 - 2g - sum(1 - 1/a_i) = 0 with all a_i >= 2, ascending.

    Each cone term (a-1)/a lies in [1/2, 1), so at least floor(r) + 1
    terms are needed to reach a remainder r, which caps the next cone
    order at (a-1)/a <= r / (floor(r) + 1).
    """
    sols = set()
    for g in (0, 1):

        def rec(prefix, remaining):
            if remaining == 0:
                sols.add((g, tuple(prefix)))
                return
            kmin = remaining.numerator // remaining.denominator + 1
            a = prefix[-1] if prefix else 2
            while True:
                term = Fraction(a - 1, a)
                if term * kmin > remaining:
                    break
                rec(prefix + [a], remaining - term)
                a += 1

        rec([], Fraction(2 - 2 * g))
    return {s for s in sols if s != (0, ())}


def test_enumerate_targets_chi_zero_base_list():
    assert chi_zero_bases_oracle() == {
        (1, ()),
        (0, (2, 3, 6)),
        (0, (2, 4, 4)),
        (0, (3, 3, 3)),
        (0, (2, 2, 2, 2)),
    }


def test_enumerate_targets_trivial_cap():
    bud = DominationBudget(
        t=1, h=1, d=1, h1_mod_d_order=1, tor_order=1, sv_m=Fraction(1), lens_cap=4
    )
    report = enumerate_targets(bud)
    assert report.torsion_cap == 1
    for s in report.platonic + report.prism + report.chi_zero + report.chi_negative:
        assert torsion_order(s) == 1


def test_enumerate_targets_cap_filter_holds():
    bud = DominationBudget(
        t=1, h=1, d=2, h1_mod_d_order=2, tor_order=2, sv_m=Fraction(2), lens_cap=8
    )
    report = enumerate_targets(bud)
    cap = torsion_bound(2, 2, 2)
    assert report.torsion_cap == cap == 8
    all_cands = report.platonic + report.prism + report.chi_zero + report.chi_negative
    assert all_cands
    for s in all_cands:
        assert torsion_order(s) <= cap
        assert euler_number(s) != 0
    assert report.lens_orders == tuple(range(1, 9))


def test_enumerate_targets_negative_needs_sv():
    bud = DominationBudget(t=1, h=1, d=1, h1_mod_d_order=1, tor_order=1)
    report = enumerate_targets(bud)
    assert report.chi_negative == ()
    assert "UNBOUNDED-BY-INPUTS" in report.chi_negative_flag


def test_enumerate_targets_prism_needs_lens_cap():
    bud = DominationBudget(t=1, h=1, d=2, h1_mod_d_order=2, tor_order=2, sv_m=Fraction(1))
    report = enumerate_targets(bud)
    assert report.prism == ()
    assert "UNBOUNDED-BY-INPUTS" in report.prism_flag


def test_enumerate_targets_e_floor_exact():
    bud = DominationBudget(
        t=1, h=1, d=3, h1_mod_d_order=3, tor_order=2, sv_m=Fraction(5, 2), lens_cap=6
    )
    report = enumerate_targets(bud)
    for (g, orders), floor in report.negative_family_floors:
        x = chi((g, orders))
        assert floor == 3 * x * x / Fraction(5, 2)
    for s in report.chi_negative:
        x = chi(s)
        assert abs(euler_number(s)) >= 3 * x * x / Fraction(5, 2)


def test_enumerate_targets_requires_degree_and_orders():
    with pytest.raises(PreconditionError):
        enumerate_targets(DominationBudget(t=1, h=1))
    with pytest.raises(PreconditionError):
        enumerate_targets(DominationBudget(t=1, h=1, d=2))


def test_invariants_validation():
    with pytest.raises(ValidationError):
        SeifertInvariants(0, 0, ((2, 2),))
    with pytest.raises(ValidationError):
        SeifertInvariants(0, 0, ((4, 2),))
    with pytest.raises(ValidationError):
        normalize(0, 0, [(1, 1)])
