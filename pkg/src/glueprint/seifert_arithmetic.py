"""Closed Seifert invariants and the homology arithmetic used to cap
candidate targets of bounded-degree maps: Euler characteristic and
number, torsion order, the torsion bound, the area constant, the
distortion budget, and case-tagged candidate enumeration.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from .errors import (
    FormulaInapplicableError,
    PreconditionError,
    ValidationError,
)
from .exact_lattice import frac

# Enclosure of pi to 39 decimal places (sufficient margin for the budget
# interval target).
PI_LO = Fraction(3141592653589793238462643383279502884197, 10**39)
PI_HI = Fraction(3141592653589793238462643383279502884198, 10**39)


@dataclass(frozen=True)
class SeifertInvariants:
    """Normalized closed orientable-base Seifert datum (g; b0, b1/a1, ...).

    Normalization: 0 < b_i < a_i with gcd(a_i, b_i) = 1.
    """

    g: int
    b0: int
    pairs: tuple  # (a_i, b_i)

    def __post_init__(self):
        object.__setattr__(
            self, "pairs", tuple((int(a), int(b)) for a, b in self.pairs)
        )
        errs = []
        if self.g < 0:
            errs.append("g: genus must be nonnegative")
        for i, (a, b) in enumerate(self.pairs):
            if a < 2:
                errs.append(f"pairs[{i}]: cone order {a} must be >= 2")
            elif not 0 < b < a:
                errs.append(f"pairs[{i}]: {b} not in (0, {a})")
            elif gcd(a, b) != 1:
                errs.append(f"pairs[{i}]: gcd({a}, {b}) != 1")
        if errs:
            raise ValidationError(errs)


def normalize(g: int, b0: int, raw_pairs) -> SeifertInvariants:
    """Reduce each b_i into (0, a_i) mod a_i, absorbing the excess into b0
    and dropping vanished pairs; the Euler number is preserved exactly."""
    pairs = []
    shift = 0
    for a, b in raw_pairs:
        a, b = int(a), int(b)
        if a < 2:
            raise ValidationError(f"invalid cone order {a}")
        q, r = divmod(b, a)
        shift += q
        if r:
            if gcd(a, r) != 1:
                raise ValidationError(f"pair ({a}, {b}) is not reduced: gcd != 1")
            pairs.append((a, r))
    return SeifertInvariants(g, b0 + shift, tuple(pairs))


def chi(data) -> Fraction:
    """Orbifold Euler characteristic of the base.

    Accepts SeifertInvariants or a bare (genus, cone orders) pair.
    """
    if isinstance(data, SeifertInvariants):
        g, orders = data.g, [a for a, _ in data.pairs]
    else:
        g, orders = data
    return (
        Fraction(2 - 2 * g)
        - sum((Fraction(a - 1, a) for a in orders), Fraction(0))
    )


def euler_number(s: SeifertInvariants) -> Fraction:
    return -Fraction(s.b0) - sum((Fraction(b, a) for a, b in s.pairs), Fraction(0))


def torsion_order(s: SeifertInvariants) -> int:
    """|e| * prod(a_i); requires e != 0.  Always an integer in normalized
    form (asserted)."""
    e = euler_number(s)
    if e == 0:
        raise FormulaInapplicableError("torsion formula requires e != 0")
    prod = 1
    for a, _ in s.pairs:
        prod *= a
    t = abs(e) * prod
    assert t.denominator == 1, "torsion order must be integral"
    return int(t)


def torsion_bound(d: int, h1_mod_d_order: int, tor_m_order: int) -> int:
    """Upper bound d * |H_1(source; Z_d)| * |Tor H_1(source; Z)| on the
    torsion of any degree-d image."""
    if d < 1 or h1_mod_d_order < 1 or tor_m_order < 1:
        raise PreconditionError("degree and orders must be positive integers")
    return d * h1_mod_d_order * tor_m_order


def area_constant(n: int) -> Fraction:
    """Coefficient of pi in the spanning-cycle area constant
    A(n) = 27^n (9 n^2 + 4 n) pi."""
    if n < 1:
        raise PreconditionError("area constant needs n >= 1")
    return Fraction(27**n * (9 * n * n + 4 * n))


def sinh_interval(x: Fraction, rel_width=Fraction(1, 10**12)) -> tuple:
    """Rational enclosure of sinh(x) for rational x > 0 by partial sums of
    the power series with a geometric tail bound."""
    x = frac(x)
    if x <= 0:
        raise PreconditionError("sinh enclosure implemented for positive x")
    term = x
    lo = x
    k = 0
    while True:
        nxt = term * x * x / ((2 * k + 2) * (2 * k + 3))
        ratio = x * x / ((2 * k + 4) * (2 * k + 5))
        if ratio < 1:
            tail = nxt / (1 - ratio)
            if tail / lo < rel_width:
                return lo, lo + tail
        lo += nxt
        term = nxt
        k += 1


@dataclass(frozen=True)
class DominationBudget:
    """Numeric inputs that cap the targets of maps from a fixed source.

    t: minimal tetrahedra; h: Kneser-Haken number; eps3: Margulis
    parameter (symbolic in nature; any positive value is sound, default
    1/10); sv_m: Seifert volume (optional); d: degree bound (optional).
    h1_mod_d_order / tor_order are the source homology sizes feeding the
    torsion bound; lens_cap is the caller-supplied cap on dominated lens
    orders used by the prism family.
    """

    t: int
    h: int
    eps3: Fraction = Fraction(1, 10)
    sv_m: Fraction = None
    d: int = None
    h1_mod_d_order: int = None
    tor_order: int = None
    lens_cap: int = None

    def __post_init__(self):
        object.__setattr__(self, "eps3", frac(self.eps3))
        if self.sv_m is not None:
            object.__setattr__(self, "sv_m", frac(self.sv_m))
        errs = []
        if self.t < 1:
            errs.append("budget.t: must be >= 1")
        if self.eps3 <= 0:
            errs.append("budget.eps3: must be positive")
        if self.sv_m is not None and self.sv_m < 0:
            errs.append("budget.sv_m: must be nonnegative")
        if self.d is not None and self.d < 1:
            errs.append("budget.d: must be >= 1")
        if errs:
            raise ValidationError(errs)


@dataclass(frozen=True)
class BudgetBound:
    """The distortion budget A(2t) / (4 sinh(eps3 / 2)) with exact core."""

    area_coefficient: Fraction  # A(2t) as a coefficient of pi
    sinh_lo: Fraction
    sinh_hi: Fraction
    value_lo: Fraction
    value_hi: Fraction
    piece_bound: int  # at most h + 1 geometric pieces
    cutting_bound: int  # at most h cutting tori and Klein bottles

    def relative_width(self) -> Fraction:
        return (self.value_hi - self.value_lo) / self.value_lo


def distortion_budget(budget: DominationBudget) -> BudgetBound:
    """Evaluate the vertex/edge distortion cap as an interval with exact
    rational pi-coefficient; monotone decreasing in eps3."""
    coef = area_constant(2 * budget.t)
    s_lo, s_hi = sinh_interval(budget.eps3 / 2)
    value_lo = coef * PI_LO / (4 * s_hi)
    value_hi = coef * PI_HI / (4 * s_lo)
    return BudgetBound(
        coef, s_lo, s_hi, value_lo, value_hi, budget.h + 1, budget.h
    )


# ---------------------------------------------------------------------------
# candidate target enumeration


@dataclass(frozen=True)
class TargetReport:
    torsion_cap: int
    lens_orders: tuple  # chi > 0, s <= 2: allowable torsion orders (COARSE)
    lens_flag: str
    platonic: tuple  # chi > 0, cone orders {2, 3, q}
    prism: tuple  # chi > 0, cone orders {2, 2, a3}
    prism_flag: str
    chi_zero: tuple
    chi_negative: tuple
    chi_negative_flag: str
    negative_family_floors: tuple  # ((g, orders), d chi^2 / sv_m) per family


def _coprime_range(a):
    return [b for b in range(1, a) if gcd(a, b) == 1]


def _candidates_for_base(g, orders, tor_cap, extra_filter=None):
    """Normalized data over a fixed base with torsion order <= tor_cap."""
    prod = 1
    for a in orders:
        prod *= a
    out = []
    for bs in itertools.product(*[_coprime_range(a) for a in orders]):
        frac_sum = sum((Fraction(b, a) for a, b in zip(orders, bs)), Fraction(0))
        # |e| * prod <= cap with e = -(b0 + frac_sum)
        lo = -Fraction(tor_cap, prod) - frac_sum
        hi = Fraction(tor_cap, prod) - frac_sum
        b0 = lo.numerator // lo.denominator  # floor
        while Fraction(b0) <= hi:
            s = SeifertInvariants(g, b0, tuple(zip(orders, bs)))
            e = euler_number(s)
            if e != 0 and abs(e) * prod <= tor_cap:
                if extra_filter is None or extra_filter(s, e):
                    out.append(s)
            b0 += 1
    return tuple(out)


def enumerate_targets(budget: DominationBudget) -> TargetReport:
    """Case-tagged candidate lists for closed orientable-base Seifert
    targets with nonzero Euler number, under the torsion bound.

    chi > 0: lens orders (coarse, by torsion order only), the three
    platonic families {2, 3, q <= 5}, and the prism family (needs the
    caller-supplied lens cap to close).  chi = 0: the five flat bases.
    chi < 0: needs the source Seifert volume; the Euler number obeys
    |e| >= d chi^2 / sv_m and chi <= -1/42.
    """
    if budget.d is None:
        raise PreconditionError("enumerate_targets needs the degree bound d")
    if budget.h1_mod_d_order is None or budget.tor_order is None:
        raise PreconditionError(
            "enumerate_targets needs h1_mod_d_order and tor_order to evaluate"
            " the torsion bound"
        )
    d = budget.d
    cap = torsion_bound(d, budget.h1_mod_d_order, budget.tor_order)

    lens_orders = tuple(range(1, cap + 1))

    platonic = []
    for q in (3, 4, 5):
        platonic.extend(_candidates_for_base(0, (2, 3, q), cap))
    platonic = tuple(sorted(platonic, key=_sort_key))

    if budget.lens_cap is None:
        prism = ()
        prism_flag = "UNBOUNDED-BY-INPUTS: lens_cap missing"
    else:
        lens_cap = budget.lens_cap
        prism = []
        a3 = 2
        while 2 * a3 <= lens_cap + Fraction(cap, 4):
            def prism_filter(s, e, a3=a3):
                b0, b3 = s.b0, s.pairs[2][1]
                return (
                    abs(a3 * b0 + b3 + a3) * 4 <= cap
                    and abs(a3 * b0 + b3 - a3) <= lens_cap
                )

            prism.extend(
                _candidates_for_base(0, (2, 2, a3), cap, extra_filter=prism_filter)
            )
            a3 += 1
        prism = tuple(sorted(set(prism), key=_sort_key))
        prism_flag = "capped by torsion comparison and dominated lens order"

    flat_bases = [(1, ()), (0, (2, 3, 6)), (0, (2, 4, 4)), (0, (3, 3, 3)), (0, (2, 2, 2, 2))]
    chi_zero = []
    for g, orders in flat_bases:
        assert chi((g, orders)) == 0
        chi_zero.extend(_candidates_for_base(g, orders, cap))
    chi_zero = tuple(sorted(chi_zero, key=_sort_key))

    if budget.sv_m is None or budget.sv_m == 0:
        chi_negative = ()
        chi_neg_flag = "UNBOUNDED-BY-INPUTS: sv_m missing"
        floors = ()
    else:
        sv = budget.sv_m
        chi_negative = []
        floors = []
        for g, orders in _hyperbolic_bases(d, sv, cap):
            x = chi((g, orders))
            e_floor = d * x * x / sv
            floors.append(((g, orders), e_floor))

            def neg_filter(s, e, e_floor=e_floor):
                return abs(e) >= e_floor

            chi_negative.extend(
                _candidates_for_base(g, orders, cap, extra_filter=neg_filter)
            )
        chi_negative = tuple(sorted(chi_negative, key=_sort_key))
        floors = tuple(floors)
        chi_neg_flag = "complete under the given sv_m"

    return TargetReport(
        torsion_cap=cap,
        lens_orders=lens_orders,
        lens_flag="COARSE: by torsion order only",
        platonic=platonic,
        prism=prism,
        prism_flag=prism_flag,
        chi_zero=chi_zero,
        chi_negative=chi_negative,
        chi_negative_flag=chi_neg_flag,
        negative_family_floors=floors,
    )


def _sort_key(s: SeifertInvariants):
    return (s.g, s.pairs, s.b0)


def _hyperbolic_bases(d, sv, cap):
    """All (genus, cone orders) with chi < 0 and prod(a) * d * chi^2 / sv
    <= cap (the necessary condition for any candidate over that base).

    Finiteness: every negative orbifold Euler characteristic is at most
    -1/42, so prod(a) <= 1764 * cap * sv / d caps the cone data, and
    (2g - 2)^2 <= cap * sv / d caps the genus.
    """
    prodcap = Fraction(1764) * cap * sv / d
    from .exact_lattice import floor_sqrt

    gmax = (floor_sqrt(Fraction(cap) * sv / d) + 2) // 2 + 1
    out = []

    def rec(g, orders, prod):
        x = chi((g, orders))
        if x < 0:
            if prod * d * x * x / sv <= cap:
                out.append((g, orders))
            else:
                return  # extensions only grow prod * chi^2
        start = orders[-1] if orders else 2
        a = start
        while prod * a <= prodcap:
            rec(g, orders + (a,), prod * a)
            a += 1

    for g in range(0, max(gmax, 2) + 1):
        rec(g, (), 1)
    return sorted(set(out))
