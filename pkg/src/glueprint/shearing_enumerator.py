"""Fiber-shearings, their vertex indices, the index bound derived from a
distortion budget, and enumeration of nondegenerate gluings under a
budget up to the implemented equivalence.

Implemented equivalence: per-edge coset classes (closure under all
form-preserving unimodular matrices and -I) plus zero-index
fiber-shearings.  Classes of nonzero index are never merged; output may
therefore split a topological equivalence class into several
representatives, each tagged with its coset and index signature.
"""

from __future__ import annotations

import itertools
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

from .decomposition_graph import SEMI, End
from .errors import PreconditionError, ResourceCapError, UnsupportedError
from .exact_lattice import QForm, ceil_sqrt, discriminant, direct_sum, frac, mat_det
from .geometric_pieces import del_h2_lattice, piece_double_cover
from .gluing_engine import (
    DistortionValue,
    Gluing,
    PreglueGraph,
    edge_distortion,
    is_nondegenerate,
    qphi_block,
    vertex_distortion,
)
from .torus_mapping_class import (
    M2_SWAP,
    TorusAuto,
    double_coset_reps,
    m2_det,
    m2_inv_unimodular,
    m2_mul,
    pullback_form,
)

def _twist_power(k: int):
    # k-times twist along the fiber slope (0, 1) in the declared basis
    return ((1, 0), (k, 1))


@dataclass(frozen=True, eq=False)
class FiberShearing:
    """Per-end twist counts along the fiber slopes; zero at every end whose
    own vertex is hyperbolic."""

    twists: dict  # End -> int

    def __post_init__(self):
        object.__setattr__(self, "twists", {e: int(k) for e, k in self.twists.items()})

    def validate(self, pg: PreglueGraph):
        for end, k in self.twists.items():
            if k and pg.piece_at(end).kind != "seifert":
                raise PreconditionError(
                    f"shearing.{end}: twists are only allowed on Seifert pieces"
                )

    def twist(self, end: End) -> int:
        return self.twists.get(end, 0)


def apply_shearing(pg: PreglueGraph, phi: Gluing, tau: FiberShearing) -> Gluing:
    """Conjugate-translate the gluing: the map at an end becomes
    (far twist)^-1 o (map) o (near twist)."""
    tau.validate(pg)
    maps = {}
    for end in pg.graph.ends():
        opp = pg.graph.opposite(end)
        m = m2_mul(
            m2_inv_unimodular(_twist_power(tau.twist(opp))),
            m2_mul(phi.matrix(end), _twist_power(tau.twist(end))),
        )
        maps[end] = m
    out = Gluing(maps)
    out.validate(pg.graph)
    return out


def shearing_index(pg: PreglueGraph, tau: FiberShearing, vid: str) -> int:
    """Sum of the twist counts over the ends at a Seifert vertex."""
    if pg.pieces[vid].kind != "seifert":
        raise PreconditionError(f"index is undefined at non-Seifert vertex {vid!r}")
    return sum(tau.twist(end) for end in pg.graph.ends_at(vid))


def canonical_shearing_form(pg: PreglueGraph, tau: FiberShearing) -> FiberShearing:
    """Same index vector, all twisting concentrated on the lowest end of
    each Seifert vertex."""
    tau.validate(pg)
    twists = {}
    for v in pg.graph.vertices:
        if pg.pieces[v.id].kind != "seifert":
            continue
        k = shearing_index(pg, tau, v.id)
        if k:
            twists[min(pg.graph.ends_at(v.id))] = k
    return FiberShearing(twists)


# ---------------------------------------------------------------------------
# the index bound


def _vertex_bound_data(pg, phi, vid):
    """(n, delta_L, r, R) for the closed index inequality at a vertex with
    orientable-base Seifert piece, computed on the double cover for a
    semi vertex (with the fiber-shearing index doubling)."""
    piece = pg.pieces[vid]
    ends = sorted(pg.graph.ends_at(vid), key=lambda d: pg.torus_index(d))
    blocks = [qphi_block(pg, phi, end) for end in ends]
    if not piece.base_orientable:
        piece = piece_double_cover(piece)
        blocks = [b for b in blocks for _ in range(2)]
    n = len(blocks)
    fiber = (0, 1)
    r = min(b.value(fiber) for b in blocks)
    mus = [t.mu for t in piece.boundary]
    big_r = max(b.value(mu) for b, mu in zip(blocks, mus))
    lattice = del_h2_lattice(piece)
    rows = lattice.basis[:-1]  # the fiber-difference part
    form = direct_sum(blocks)
    if n == 1:
        delta_l = Fraction(1)
    else:
        from .exact_lattice import Sublattice

        delta_l = discriminant(Sublattice(2 * n, rows), form)
    return n, delta_l, r, big_r


def index_bound(pg: PreglueGraph, phi: Gluing, vid: str, budget) -> int:
    """Smallest K >= 1 such that every fiber-shearing of index at least K
    in absolute value pushes the vertex distortion to at least the budget.

    Closed inequality: delta_L * (K^2 r / (2 n^2) - R) >= budget^(2n),
    with r the least block value of a fiber, R the largest block value of
    a mu class, and delta_L the discriminant of the fiber-difference
    sublattice.  (The n^2 multiplicity follows the pigeonhole step: an
    index-K shearing forces one end to absorb at least K/n twists.)  For
    a semi vertex the inequality runs on the double cover, where indices
    double, and the resulting bound is halved and ceiled.
    """
    piece = pg.pieces[vid]
    if piece.kind != "seifert":
        raise PreconditionError("index bounds apply to Seifert vertices")
    budget = frac(budget)
    if budget <= 0:
        raise PreconditionError("budget must be positive")
    semi = not piece.base_orientable
    n, delta_l, r, big_r = _vertex_bound_data(pg, phi, vid)
    if r == 0 or delta_l == 0:
        raise PreconditionError(
            f"vertex {vid!r}: degenerate gluing (fiber value or lattice"
            " discriminant vanishes), no index bound exists"
        )
    need = budget ** (2 * n) / delta_l + big_r
    k = ceil_sqrt(need * 2 * n * n / r)
    k = max(k, 1)
    while delta_l * (Fraction(k * k) * r / (2 * n * n) - big_r) < budget ** (2 * n):
        k += 1
    if semi:
        k = (k + 1) // 2
    return max(k, 1)


# ---------------------------------------------------------------------------
# enumeration under a budget


@dataclass(frozen=True, eq=False)
class GluingRecord:
    """One enumerated representative with its exact distortion report."""

    gluing: Gluing
    coset_signature: tuple  # per edge: (edge id, rep matrix, delta)
    index_vector: tuple  # per Seifert vertex: (vertex id, index)
    edge_values: tuple  # (edge id, DistortionValue)
    vertex_values: tuple  # (vertex id, DistortionValue)
    primary: DistortionValue


def _reference_map(pg, end):
    return M2_SWAP


def _edge_candidates(pg, edge, budget4):
    """Candidate primary-end maps per coset class for one edge, paired with
    the class discriminant and the search derivation."""
    end = End(edge.id, 0)
    opp = pg.graph.opposite(end)
    near = pg.near_form(end)
    far = pg.near_form(opp)
    if near.kernel_rank > 1 or far.kernel_rank > 1:
        raise UnsupportedError(f"edge {edge.id}: a side form vanishes")
    if edge.kind == SEMI:
        return _semi_edge_candidates(near, budget4)
    psi = _reference_map(pg, end)
    far_pulled = pullback_form(far, TorusAuto(psi))
    reps = double_coset_reps(far_pulled, near, budget4)
    out = [(m2_mul(psi, r.rep.matrix), r.delta) for r in reps]
    return out, list(reps.derivation)


def _semi_edge_candidates(near: QForm, budget4):
    """Involutive det -1 self-gluings with block determinant inside the
    budget, up to conjugation by the form stabilizer; the twist freedom is
    left to the index sweep."""
    derivation = []
    cands = []
    if near.kernel_rank == 1:
        # near = c (p0 . v)^2 in the declared basis has p0 = (d, 0), so the
        # block determinant of an involution ((a, b), (c, -a)) is c^2 b^2 d'...
        c0 = near.gram[0][0]
        cap = budget4 / (c0 * c0)
        bmax = ceil_sqrt(cap)
        derivation.append(
            f"semi edge, degenerate side: delta = ({c0})^2 b^2, |b| <= {bmax}"
        )
        for b in range(1, bmax + 1):
            if c0 * c0 * Fraction(b * b) >= budget4:
                continue
            for a in range(0, b):
                if (1 - a * a) % b:
                    continue
                c = (1 - a * a) // b
                mtx = ((a, b), (c, -a))
                assert m2_det(mtx) == -1
                delta = _involution_delta(near, mtx)
                if 0 < delta < budget4:
                    cands.append((mtx, delta))
                neg = ((-a, -b), (-c, a))
                delta = _involution_delta(near, neg)
                if 0 < delta < budget4:
                    cands.append((neg, delta))
    else:
        dq = mat_det(near.gram)
        tq = near.gram[0][0] + near.gram[1][1]
        slack = budget4 - 2 * dq
        norm_cap = slack * (tq * tq) / (dq * dq) if slack > 0 else 0
        derivation.append(
            f"semi edge, definite side: |phi|_F^2 <= {norm_cap}"
        )
        e = ceil_sqrt(Fraction(norm_cap)) if norm_cap > 0 else 0
        for a in range(-e, e + 1):
            for b in range(-e, e + 1):
                for c in range(-e, e + 1):
                    if a * a + b * c != 1:
                        continue
                    if 2 * a * a + b * b + c * c > norm_cap:
                        continue
                    mtx = ((a, b), (c, -a))
                    delta = _involution_delta(near, mtx)
                    if 0 < delta < budget4:
                        cands.append((mtx, delta))
    # dedupe by conjugation with the finite stabilizer parts
    from .torus_mapping_class import _finite_orthogonal_group, _stabilizer_families

    def conjugates(mtx):
        if near.kernel_rank == 0:
            group = _finite_orthogonal_group(near)
        else:
            group = [fam[0] for fam in _stabilizer_families(near)]
        for t in group:
            yield m2_mul(m2_mul(m2_inv_unimodular(t), mtx), t)

    uniq = []
    for mtx, delta in sorted(cands, key=lambda md: (md[1], md[0])):
        if any(
            delta == d2 and any(c == m2 for c in conjugates(mtx))
            for m2, d2 in uniq
        ):
            continue
        uniq.append((mtx, delta))
    return uniq, derivation


def _involution_delta(near: QForm, mtx):
    from .exact_lattice import mat, mat_mul, transpose

    m = mat(mtx)
    pulled = mat_mul(mat_mul(transpose(m), near.gram), m)
    total = tuple(
        tuple(near.gram[i][j] + pulled[i][j] for j in range(2)) for i in range(2)
    )
    return mat_det(total)


def enumerate_gluings(pg: PreglueGraph, budget, *, cap=200000) -> list:
    """All nondegenerate gluings with primary distortion below the budget,
    up to the implemented equivalence.

    Per edge the candidates are the double-coset representatives of the
    two side forms with block determinant below budget^4 (edge distortion
    below the budget); per Seifert vertex the shearing index is swept
    inside the closed index bound; combinations are filtered through
    exact nondegeneracy and the exact primary-distortion budget, and
    deduplicated by the canonical shearing form.
    """
    budget = frac(budget)
    if budget <= 0:
        raise PreconditionError("budget must be positive")
    budget4 = budget**4
    per_edge = []
    for edge in pg.graph.edges:
        cands, _ = _edge_candidates(pg, edge, budget4)
        per_edge.append((edge.id, cands))
    if any(not cands for _, cands in per_edge):
        return []
    seifert_vertices = [
        v.id for v in pg.graph.vertices if pg.pieces[v.id].kind == "seifert"
    ]

    combos = []
    for choice in itertools.product(*(cands for _, cands in per_edge)):
        maps = {eid: mtx for (eid, _), (mtx, _) in zip(per_edge, choice)}
        base = _build_gluing(pg, maps)
        if base is None:
            continue
        if not is_nondegenerate(pg, base):
            continue
        bounds = {}
        ok = True
        for vid in seifert_vertices:
            if pg.graph.valence(vid) == 0:
                continue
            try:
                bounds[vid] = index_bound(pg, base, vid, budget)
            except PreconditionError:
                ok = False
                break
        if not ok:
            continue
        signature = tuple(
            (eid, mtx, delta) for (eid, _), (mtx, delta) in zip(per_edge, choice)
        )
        combos.append((base, signature, bounds))

    cells = sum(
        max(
            1,
            _prod(2 * k - 1 for k in bounds.values()),
        )
        for _, _, bounds in combos
    )
    if cells > cap:
        raise ResourceCapError(cap, cells)

    tasks = []
    for base, signature, bounds in combos:
        sweep = [
            [(vid, k) for k in range(-(bounds[vid] - 1), bounds[vid])]
            for vid in sorted(bounds)
        ]
        for assignment in itertools.product(*sweep):
            tasks.append((base, signature, dict(assignment)))

    workers = max(1, int(os.environ.get("GLUEPRINT_THREADS", "1")))

    def evaluate(task):
        base, signature, indices = task
        twists = {}
        for vid, k in indices.items():
            if k:
                twists[min(pg.graph.ends_at(vid))] = k
        tau = FiberShearing(twists)
        glue = apply_shearing(pg, base, tau)
        if not is_nondegenerate(pg, glue):
            return None
        edge_vals = tuple(
            (e.id, edge_distortion(pg, glue, e.id)) for e in pg.graph.edges
        )
        vert_vals = tuple(
            (v.id, vertex_distortion(pg, glue, v.id)) for v in pg.graph.vertices
        )
        primary = max(
            [val for _, val in edge_vals] + [val for _, val in vert_vals]
        )
        if primary.compare_rational(budget) >= 0:
            return None
        index_vector = tuple(sorted(indices.items()))
        return GluingRecord(glue, signature, index_vector, edge_vals, vert_vals, primary)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(evaluate, tasks))
    else:
        results = [evaluate(t) for t in tasks]

    records = [r for r in results if r is not None]
    seen = set()
    out = []
    for rec in sorted(
        records,
        key=lambda r: (
            tuple((eid, mtx) for eid, mtx, _ in r.coset_signature),
            r.index_vector,
        ),
    ):
        key = (
            tuple((eid, mtx) for eid, mtx, _ in rec.coset_signature),
            rec.index_vector,
        )
        if key in seen:
            continue
        seen.add(key)
        out.append(rec)
    return out


def _prod(it):
    p = 1
    for x in it:
        p *= x
    return p


def _build_gluing(pg, primary_maps):
    maps = {}
    for eid, mtx in primary_maps.items():
        end = End(eid, 0)
        opp = pg.graph.opposite(end)
        maps[end] = mtx
        if opp != end:
            maps[opp] = m2_inv_unimodular(mtx)
        elif mtx != m2_inv_unimodular(mtx):
            return None
    g = Gluing(maps)
    g.validate(pg.graph)
    return g
