"""Gluings of a preglue graph-of-geometrics, the associated quadratic
form, and edge / vertex / primary average distortions.

Distortion values are kept as exact pairs (discriminant, root exponent)
and compared by cross-exponentiation of rationals; no roots are ever
materialized.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm

from .decomposition_graph import (
    SEMI,
    DecompGraph,
    End,
    entire_double_cover,
    loopless_double_cover,
)
from .errors import PreconditionError, ValidationError
from .exact_lattice import (
    QForm,
    direct_sum,
    discriminant,
    dominates,
    frac,
    int_nth_root_floor,
    mat,
    mat_det,
    mat_mul,
    transpose,
)
from .geometric_pieces import (
    del_h2_lattice,
    piece_double_cover,
    torus_form,
)
from .torus_mapping_class import TorusAuto, m2_det, m2_inv_unimodular


@dataclass(frozen=True)
class PreglueGraph:
    """Decomposition graph with a piece at every vertex and each end of an
    edge assigned to a distinct boundary torus of its vertex's piece.

    When end_torus is omitted the ends at a vertex, in sorted order, take
    the piece's boundary tori in listed order.
    """

    graph: DecompGraph
    pieces: dict
    end_torus: dict = None

    def __post_init__(self):
        errs = []
        for v in self.graph.vertices:
            piece = self.pieces.get(v.id)
            if piece is None:
                errs.append(f"pieces.{v.id}: missing piece data")
                continue
            if self.graph.valence(v.id) != piece.n_tori:
                errs.append(
                    f"pieces.{v.id}: {piece.n_tori} boundary tori but valence"
                    f" {self.graph.valence(v.id)}"
                )
            semi = v.kind == SEMI
            nonor = piece.kind == "seifert" and not piece.base_orientable
            if semi != nonor:
                errs.append(
                    f"graph.vertices.{v.id}: semi-vertices correspond exactly to"
                    " Seifert pieces with non-orientable base"
                )
        if self.end_torus is None and not errs:
            table = {}
            for v in self.graph.vertices:
                for i, end in enumerate(sorted(self.graph.ends_at(v.id))):
                    table[end] = i
            object.__setattr__(self, "end_torus", table)
        elif not errs:
            for v in self.graph.vertices:
                idx = sorted(self.end_torus[d] for d in self.graph.ends_at(v.id))
                if idx != list(range(self.pieces[v.id].n_tori)):
                    errs.append(
                        f"end_torus.{v.id}: ends must hit each boundary torus once"
                    )
        if errs:
            raise ValidationError(errs)

    def piece_at(self, end: End):
        return self.pieces[self.graph.vertex_of(end)]

    def torus_index(self, end: End) -> int:
        return self.end_torus[end]

    def near_form(self, end: End) -> QForm:
        return torus_form(self.piece_at(end), self.torus_index(end))


@dataclass(frozen=True)
class Gluing:
    """Per-end integer torus maps in the declared bases.

    Laws: det = -1 at every end, the opposite end carries the inverse
    matrix, and a semi-edge end carries an involution.
    """

    maps: dict  # End -> 2x2 integer matrix (tuple of tuples)

    def __post_init__(self):
        object.__setattr__(
            self,
            "maps",
            {e: tuple(tuple(int(x) for x in r) for r in m) for e, m in self.maps.items()},
        )

    def validate(self, graph: DecompGraph):
        errs = []
        for end in graph.ends():
            m = self.maps.get(end)
            if m is None:
                errs.append(f"gluing.{end}: missing matrix")
                continue
            if m2_det(m) != -1:
                errs.append(
                    f"gluing.{end}: det = {m2_det(m)}, orientation-reversing maps"
                    " must have det -1"
                )
        if errs:
            raise ValidationError(errs)
        for end in graph.ends():
            opp = graph.opposite(end)
            m, mo = self.maps[end], self.maps[opp]
            if mo != m2_inv_unimodular(m):
                errs.append(
                    f"gluing.{opp}: must be the inverse of gluing.{end}"
                    " (involution law: the map at the opposite end is the inverse)"
                )
        if errs:
            raise ValidationError(sorted(set(errs)))

    def matrix(self, end: End):
        return self.maps[end]

    def auto(self, end: End) -> TorusAuto:
        return TorusAuto(self.maps[end])


def make_gluing(graph: DecompGraph, primary_maps: dict) -> Gluing:
    """Build a gluing from matrices on one end per edge; the opposite ends
    get the inverses."""
    maps = {}
    for eid, m in primary_maps.items():
        end = End(eid, 0)
        maps[end] = tuple(tuple(int(x) for x in r) for r in m)
        opp = graph.opposite(end)
        if opp != end:
            maps[opp] = m2_inv_unimodular(maps[end])
    g = Gluing(maps)
    g.validate(graph)
    return g


# ---------------------------------------------------------------------------
# the gluing form


def qphi_block(pg: PreglueGraph, phi: Gluing, end: End) -> QForm:
    """Rank-2 block of the gluing form on the torus at one end:
    near boundary form plus the far boundary form pulled back through
    the gluing map."""
    opp = pg.graph.opposite(end)
    near = pg.near_form(end)
    far = pg.near_form(opp)
    m = mat(phi.matrix(end))
    pulled = mat_mul(mat_mul(transpose(m), far.gram), m)
    return QForm(2, tuple(tuple(near.gram[i][j] + pulled[i][j] for j in range(2)) for i in range(2)))


def build_qphi(pg: PreglueGraph, phi: Gluing) -> QForm:
    """The gluing form on the direct sum over all ends (sorted end order)."""
    phi.validate(pg.graph)
    return direct_sum([qphi_block(pg, phi, end) for end in pg.graph.ends()])


def fiber_match_degenerate(pg: PreglueGraph, phi: Gluing) -> bool:
    """Combinatorial degeneracy test: some end joins two Seifert sides and
    the gluing carries the fiber to (plus or minus) the far fiber."""
    for end in pg.graph.ends():
        opp = pg.graph.opposite(end)
        pn, pf = pg.piece_at(end), pg.piece_at(opp)
        if pn.kind != "seifert" or pf.kind != "seifert":
            continue
        img = (phi.matrix(end)[0][1], phi.matrix(end)[1][1])  # image of (0, 1)
        if img[0] == 0:
            return True
    return False


def is_nondegenerate(pg: PreglueGraph, phi: Gluing) -> bool:
    """True iff the gluing form is positive-definite.

    The determinant verdict is cross-checked against the combinatorial
    fiber-match test; the two are provably equivalent, so a mismatch
    would expose an internal inconsistency.
    """
    phi.validate(pg.graph)
    definite = all(
        qphi_block(pg, phi, end).is_positive_definite for end in pg.graph.ends()
    )
    combinatorial = not fiber_match_degenerate(pg, phi)
    assert definite == combinatorial, "definiteness and fiber-match tests disagree"
    return definite


# ---------------------------------------------------------------------------
# distortion values


@dataclass(frozen=True, eq=False)
class DistortionValue:
    """The real number delta ** (1/root), stored exactly.

    root is a positive even integer; comparisons cross-exponentiate the
    rational discriminants, so ordering is exact.
    """

    delta: Fraction
    root: int

    def __post_init__(self):
        object.__setattr__(self, "delta", frac(self.delta))
        if self.delta < 0:
            raise PreconditionError("distortion discriminants are nonnegative")
        if self.root <= 0 or self.root % 2:
            raise PreconditionError("root exponent must be a positive even integer")

    def _pair(self, other):
        l = lcm(self.root, other.root)
        return self.delta ** (l // self.root), other.delta ** (l // other.root)

    def __eq__(self, other):
        a, b = self._pair(other)
        return a == b

    def __lt__(self, other):
        a, b = self._pair(other)
        return a < b

    def __le__(self, other):
        a, b = self._pair(other)
        return a <= b

    def __gt__(self, other):
        return not self <= other

    def __ge__(self, other):
        return not self < other

    def __hash__(self):
        return hash(("DistortionValue", self.delta, self.root))

    def compare_rational(self, c) -> int:
        """Sign of (self - c) for a nonnegative rational c, exactly."""
        c = frac(c)
        if c < 0:
            return 1
        lhs, rhs = self.delta, c**self.root
        return (lhs > rhs) - (lhs < rhs)

    def approx(self) -> float:
        if self.delta == 0:
            return 0.0
        return float(self.delta) ** (1.0 / self.root)

    def decimal_enclosure(self, digits=12) -> tuple:
        """Decimal strings lo <= value <= hi with `digits` fractional digits."""
        if self.delta == 0:
            return ("0", "0")
        scaled = self.delta * Fraction(10) ** (digits * self.root)
        lo = int_nth_root_floor(scaled.numerator // scaled.denominator, self.root)
        hi = lo
        while Fraction(hi) ** self.root < scaled:
            hi += 1

        def fmt(m):
            whole, part = divmod(m, 10**digits)
            return f"{whole}.{part:0{digits}d}"

        return fmt(lo), fmt(hi)

    def __repr__(self):
        return f"({self.delta})^(1/{self.root})"


ZERO_DISTORTION = DistortionValue(Fraction(0), 2)


# ---------------------------------------------------------------------------
# distortions


def edge_distortion(pg: PreglueGraph, phi: Gluing, edge_id: str) -> DistortionValue:
    """Fourth root of the block discriminant along an edge.

    For entire edges the two end blocks have equal determinant (they
    differ by a unimodular pullback); this is asserted.
    """
    e = pg.graph.edge(edge_id)
    d0 = mat_det(qphi_block(pg, phi, End(edge_id, 0)).gram)
    if e.kind != SEMI:
        d1 = mat_det(qphi_block(pg, phi, End(edge_id, 1)).gram)
        assert d0 == d1, "edge distortion must not depend on the chosen end"
    return DistortionValue(d0, 4)


def _vertex_blocks(pg, phi, vid):
    return [qphi_block(pg, phi, end) for end in sorted(pg.graph.ends_at(vid))]


def _ends_by_torus(pg, vid):
    ends = sorted(pg.graph.ends_at(vid))
    return sorted(ends, key=lambda d: pg.torus_index(d))


def vertex_distortion(pg: PreglueGraph, phi: Gluing, vid: str) -> DistortionValue:
    """Average distortion at a vertex.

    Entire vertex: discriminant of the gluing form on the boundary image
    of H_2, with root exponent 2 * valence.  Semi vertex: the same
    computation on the fiber-centralizer double cover of the piece, each
    lifted torus carrying the block pulled back from its base torus, with
    root exponent 4 * valence.  Valence 0 gives zero.
    """
    piece = pg.pieces[vid]
    n = pg.graph.valence(vid)
    if n == 0:
        return ZERO_DISTORTION
    ends = _ends_by_torus(pg, vid)
    blocks = [qphi_block(pg, phi, end) for end in ends]
    if piece.kind == "seifert" and not piece.base_orientable:
        cover = piece_double_cover(piece)
        lattice = del_h2_lattice(cover)
        cover_blocks = [b for b in blocks for _ in range(2)]
        form = direct_sum(cover_blocks)
        return DistortionValue(discriminant(lattice, form), 2 * (2 * n))
    lattice = del_h2_lattice(piece)
    form = direct_sum(blocks)
    return DistortionValue(discriminant(lattice, form), 2 * n)


def primary_distortion(pg: PreglueGraph, phi: Gluing) -> DistortionValue:
    """Maximum of all vertex and edge distortions (exact comparisons)."""
    phi.validate(pg.graph)
    values = [ZERO_DISTORTION]
    for e in pg.graph.edges:
        values.append(edge_distortion(pg, phi, e.id))
    for v in pg.graph.vertices:
        values.append(vertex_distortion(pg, phi, v.id))
    return max(values)


@dataclass(frozen=True)
class AtoroidalVertexReport:
    """Diagnostic for a hyperbolic vertex: its distortion against the
    product of adjacent edge distortions."""

    vertex: str
    vertex_value: DistortionValue
    edge_product: DistortionValue  # product over adjacent ends of D_e
    ratio_power: Fraction  # (D_v / edge_product^(2/n))^(2n), exact
    domination_holds: bool

    def ratio_approx(self) -> float:
        if self.ratio_power == 0:
            return 0.0
        return float(self.ratio_power) ** (1.0 / (self.vertex_value.root))


def atoroidal_vertex_bound_check(pg: PreglueGraph, phi: Gluing, vid: str) -> AtoroidalVertexReport:
    """Report on a hyperbolic vertex: the gluing form dominates the piece
    form blockwise, hence sublattice discriminants only grow; the ratio
    of the vertex distortion to adjacent edge distortions is tabulated
    for empirical inspection."""
    piece = pg.pieces[vid]
    if piece.kind != "hyperbolic":
        raise PreconditionError("atoroidal check applies to hyperbolic vertices")
    n = pg.graph.valence(vid)
    ends = _ends_by_torus(pg, vid)
    blocks = [qphi_block(pg, phi, end) for end in ends]
    dom = all(
        dominates(block, torus_form(piece, i)) for i, block in enumerate(blocks)
    )
    lattice = del_h2_lattice(piece)
    d_glued = discriminant(lattice, direct_sum(blocks))
    d_piece = discriminant(lattice, direct_sum([torus_form(piece, i) for i in range(n)]))
    assert d_glued >= d_piece, "domination must not shrink discriminants"
    dv = vertex_distortion(pg, phi, vid)
    prod = Fraction(1)
    for end in ends:
        prod *= edge_distortion(pg, phi, end.edge).delta
    edge_product = DistortionValue(prod, 4)
    # (D_v / prod^(2/n))^(2n) = delta_v^... : both sides to the power 2n
    ratio_power = dv.delta / prod if prod else Fraction(0)
    return AtoroidalVertexReport(vid, dv, edge_product, ratio_power, dom)


# ---------------------------------------------------------------------------
# lifting pieces and gluings through the graph covers


def lift_entire(pg: PreglueGraph, phi: Gluing):
    """Entire double cover of the whole datum (graph, pieces, gluing).

    Entire vertices and their pieces lift to two copies; a semi-vertex
    lifts to one vertex carrying the fiber-centralizer double cover of
    its piece, each base torus lifting to two adjacent copies.
    """
    cover, cmap = entire_double_cover(pg.graph)
    pieces = {}
    end_torus = {}
    for v in pg.graph.vertices:
        if v.kind == SEMI:
            pieces[f"{v.id}#01"] = piece_double_cover(pg.pieces[v.id])
        else:
            pieces[f"{v.id}#0"] = pg.pieces[v.id]
            pieces[f"{v.id}#1"] = pg.pieces[v.id]
    for cend, bend in cmap.end_map:
        base_vid = pg.graph.vertex_of(bend)
        base_idx = pg.torus_index(bend)
        if pg.graph.vertex(base_vid).kind == SEMI:
            fiber = [ce for ce, be in cmap.end_map if be == bend]
            copy = sorted(fiber).index(cend)
            end_torus[cend] = 2 * base_idx + copy
        else:
            end_torus[cend] = base_idx
    maps = {cend: phi.matrix(bend) for cend, bend in cmap.end_map}
    pg2 = PreglueGraph(cover, pieces, end_torus)
    phi2 = Gluing(maps)
    phi2.validate(cover)
    return pg2, phi2, cmap


def lift_loopless(pg: PreglueGraph, phi: Gluing):
    """Loopless double cover of an entire datum: two copies with every
    loop edge cut and cross-glued."""
    cover, cmap = loopless_double_cover(pg.graph)
    pieces = {}
    for v in pg.graph.vertices:
        pieces[f"{v.id}#0"] = pg.pieces[v.id]
        pieces[f"{v.id}#1"] = pg.pieces[v.id]
    end_torus = {cend: pg.torus_index(bend) for cend, bend in cmap.end_map}
    maps = {cend: phi.matrix(bend) for cend, bend in cmap.end_map}
    pg2 = PreglueGraph(cover, pieces, end_torus)
    phi2 = Gluing(maps)
    phi2.validate(cover)
    return pg2, phi2, cmap
