from fractions import Fraction

import pytest

from glueprint.errors import PreconditionError, ValidationError
from glueprint.exact_lattice import Sublattice, identity_form, qform
from glueprint.geometric_pieces import (
    BoundaryTorusData,
    HyperbolicPieceData,
    SeifertPieceData,
    boundary_form,
    del_h2_lattice,
    piece_double_cover,
    torus_form,
)
from conftest import seifert_piece, square_cusp_piece


def test_seifert_torus_form_unit_divisibility():
    p = seifert_piece(1)
    assert torus_form(p, 0).gram == ((1, 0), (0, 0))


def test_seifert_torus_form_divisibility_three():
    p = seifert_piece(1, divisibilities=[3])
    q = torus_form(p, 0)
    for a in range(-3, 4):
        for b in range(-3, 4):
            assert q.value((a, b)) == 9 * a * a


def test_hyperbolic_square_cusp_form():
    p = square_cusp_piece()
    assert torus_form(p, 0).gram == identity_form(2).gram


def test_boundary_form_block_structure():
    p = seifert_piece(2, divisibilities=[1, 2])
    q = boundary_form(p)
    assert q.rank == 4
    assert q.kernel_rank == 2  # one fiber direction per torus
    assert q.value((1, 0, 0, 0)) == 1
    assert q.value((0, 0, 1, 0)) == 4
    assert q.value((0, 1, 0, 1)) == 0


def test_hyperbolic_boundary_form_definite():
    p = square_cusp_piece(2)
    assert boundary_form(p).is_positive_definite


def test_del_h2_two_tori():
    p = seifert_piece(2)  # no cones, mu = x
    lat = del_h2_lattice(p)
    assert set(lat.basis) == {(0, 1, 0, -1), (1, 0, 1, 0)}


def test_del_h2_single_torus():
    p = seifert_piece(1)
    lat = del_h2_lattice(p)
    assert lat.basis == ((1, 0),)


def test_del_h2_three_tori_rank():
    p = seifert_piece(3)
    lat = del_h2_lattice(p)
    assert lat.rank == 3
    q = boundary_form(p)
    # fiber classes are in the kernel of the boundary form
    for i in range(3):
        fiber = tuple(1 if c == 2 * i + 1 else 0 for c in range(6))
        assert q.value(fiber) == 0


def test_piece_double_cover_doubles_boundary_and_chi():
    p = seifert_piece(1, orientable=False, cones=(3,), genus=3)
    cover = piece_double_cover(p)
    assert cover.base_orientable
    assert cover.n_tori == 2
    assert cover.cone_orders == (3, 3)
    assert cover.chi_orb == 2 * p.chi_orb
    assert cover.m_v == p.m_v
    assert del_h2_lattice(cover).rank == 2


def test_piece_double_cover_rejects_orientable():
    with pytest.raises(PreconditionError):
        piece_double_cover(seifert_piece(1))


def test_del_h2_requires_orientable_base():
    p = seifert_piece(1, orientable=False, genus=3)
    with pytest.raises(PreconditionError):
        del_h2_lattice(p)


def test_mu_pairing_enforced():
    with pytest.raises(ValidationError):
        SeifertPieceData(True, 1, (2, 3), (BoundaryTorusData(mu=(5, 0)),))


def test_chi_orb_must_be_negative():
    with pytest.raises(ValidationError):
        SeifertPieceData(True, 0, (), (BoundaryTorusData(mu=(1, 0)),))  # disk-ish
    with pytest.raises(ValidationError):
        SeifertPieceData(True, 1, (), ())  # torus base, chi = 0


def test_cusp_normalization_enforced():
    with pytest.raises(ValidationError):
        HyperbolicPieceData(
            (qform([[2, 0], [0, 2]]),), Sublattice(2, ((1, 0),))
        )
    with pytest.raises(ValidationError):
        HyperbolicPieceData(
            (qform([[Fraction(1, 2), 0], [0, 2]]),), Sublattice(2, ((1, 0),))
        )
    # non-diagonal normalized form passes
    HyperbolicPieceData(
        (qform([[1, Fraction(1, 2)], [Fraction(1, 2), 1]]),), Sublattice(2, ((1, 0),))
    )


def test_del_h2_rank_must_match_cusp_count():
    with pytest.raises(ValidationError):
        HyperbolicPieceData(
            (identity_form(2), identity_form(2)),
            Sublattice(4, ((1, 0, 0, 0),)),
        )
