"""Piece-level data: boundary quadratic forms and boundary-lattice images.

Hyperbolic piece data (cusp shapes, boundary image of second homology)
is always user input; the toolkit never solves geometric structures.
Seifert pieces carry per-torus bases (section class x = (1,0), fiber
class lambda = (0,1), with <x, lambda> = +1), a per-torus divisibility,
and per-torus classes mu pairing to lcm(cone orders) with the fiber.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm

from .errors import PreconditionError, ValidationError
from .exact_lattice import (
    QForm,
    Sublattice,
    diag_form,
    direct_sum,
    minimum_value,
)


@dataclass(frozen=True)
class HyperbolicPieceData:
    """Cusped hyperbolic piece: normalized cusp forms plus the stored
    boundary image of H_2 (rank = number of cusps, half lives half dies)."""

    cusp_forms: tuple  # QForm of rank 2 per boundary torus
    del_h2_basis: Sublattice

    def __post_init__(self):
        errs = []
        for i, f in enumerate(self.cusp_forms):
            if f.rank != 2:
                errs.append(f"cusps[{i}].gram: rank must be 2")
                continue
            if not f.is_positive_definite:
                errs.append(f"cusps[{i}].gram: cusp form must be positive definite")
                continue
            if minimum_value(f) != 1:
                errs.append(
                    f"cusps[{i}].gram: shortest primitive class must have value 1"
                )
        n = len(self.cusp_forms)
        if self.del_h2_basis.ambient_rank != 2 * n:
            errs.append("del_h2_basis: ambient rank must be twice the cusp count")
        elif self.del_h2_basis.rank != n:
            errs.append("del_h2_basis: rank must equal the cusp count")
        if errs:
            raise ValidationError(errs)

    @property
    def n_tori(self) -> int:
        return len(self.cusp_forms)

    @property
    def kind(self) -> str:
        return "hyperbolic"


@dataclass(frozen=True)
class BoundaryTorusData:
    """Per-torus Seifert boundary declaration in the basis (x, lambda)."""

    divisibility: int = 1
    mu: tuple = None  # integer pair (must pair to m_v with the fiber)

    def __post_init__(self):
        if self.divisibility < 1:
            raise ValidationError("boundary.divisibility: must be a positive integer")
        if self.mu is not None:
            object.__setattr__(self, "mu", (int(self.mu[0]), int(self.mu[1])))


@dataclass(frozen=True)
class SeifertPieceData:
    """Seifert piece over a hyperbolic base with declared boundary bases."""

    base_orientable: bool
    genus: int
    cone_orders: tuple
    boundary: tuple  # BoundaryTorusData per boundary torus

    def __post_init__(self):
        object.__setattr__(self, "cone_orders", tuple(int(a) for a in self.cone_orders))
        errs = []
        if self.genus < 0:
            errs.append("genus: must be nonnegative")
        if not self.base_orientable and self.genus < 1:
            errs.append("genus: a non-orientable base needs genus >= 1")
        for i, a in enumerate(self.cone_orders):
            if a < 2:
                errs.append(f"cone_orders[{i}]: cone order must be >= 2")
        if errs:
            raise ValidationError(errs)
        if self.chi_orb >= 0:
            raise ValidationError(
                f"base orbifold is not hyperbolic (chi_orb = {self.chi_orb} >= 0)"
            )
        m = self.m_v
        for i, t in enumerate(self.boundary):
            mu = t.mu if t.mu is not None else (m, 0)
            if mu[0] != m:
                errs.append(
                    f"boundary[{i}].mu: <mu, fiber> = {mu[0]} but lcm of cone orders is {m}"
                )
            object.__setattr__(t, "mu", mu)
        if errs:
            raise ValidationError(errs)

    @property
    def n_tori(self) -> int:
        return len(self.boundary)

    @property
    def kind(self) -> str:
        return "seifert"

    @property
    def m_v(self) -> int:
        return lcm(*self.cone_orders) if self.cone_orders else 1

    @property
    def chi_orb(self) -> Fraction:
        surface = 2 - 2 * self.genus if self.base_orientable else 2 - self.genus
        return (
            Fraction(surface)
            - self.n_tori
            - sum((Fraction(a - 1, a) for a in self.cone_orders), Fraction(0))
        )


def torus_form(piece, i) -> QForm:
    """The rank-2 boundary form on the i-th boundary torus of the piece."""
    if piece.kind == "hyperbolic":
        return piece.cusp_forms[i]
    d = piece.boundary[i].divisibility
    # vanishes on the fiber direction; value (a*d)^2 on a*x + b*lambda
    return diag_form(d * d, 0)


def boundary_form(piece) -> QForm:
    """Block-diagonal form on the direct-sum boundary lattice."""
    return direct_sum([torus_form(piece, i) for i in range(piece.n_tori)])


def del_h2_lattice(piece) -> Sublattice:
    """Boundary image of H_2 inside the direct-sum boundary lattice.

    Hyperbolic pieces return the stored basis.  Seifert pieces over an
    orientable base return fiber differences (rank n-1) together with
    the sum of the mu classes; non-orientable bases must pass through
    piece_double_cover first.
    """
    if piece.kind == "hyperbolic":
        return piece.del_h2_basis
    if not piece.base_orientable:
        raise PreconditionError(
            "non-orientable base: take piece_double_cover before del_h2_lattice"
        )
    n = piece.n_tori
    if n < 1:
        return Sublattice(0, ())
    rows = []
    for i in range(n - 1):
        row = [0] * (2 * n)
        row[2 * i + 1] = 1
        row[2 * (i + 1) + 1] = -1
        rows.append(tuple(row))
    mu_row = [0] * (2 * n)
    for i, t in enumerate(piece.boundary):
        mu_row[2 * i] = t.mu[0]
        mu_row[2 * i + 1] = t.mu[1]
    rows.append(tuple(mu_row))
    return Sublattice(2 * n, tuple(rows))


def piece_double_cover(piece: SeifertPieceData) -> SeifertPieceData:
    """Fiber-centralizer double cover of a non-orientable-base piece.

    Boundary tori lift to two labelled copies with identical
    declarations, cone points lift in pairs, and the orientable cover
    genus is set so that chi_orb exactly doubles.
    """
    if piece.kind != "seifert" or piece.base_orientable:
        raise PreconditionError("piece_double_cover needs a non-orientable base")
    cover = SeifertPieceData(
        base_orientable=True,
        genus=piece.genus - 1,
        cone_orders=tuple(a for a in piece.cone_orders for _ in range(2)),
        boundary=tuple(t for t in piece.boundary for _ in range(2)),
    )
    assert cover.chi_orb == 2 * piece.chi_orb
    return cover
