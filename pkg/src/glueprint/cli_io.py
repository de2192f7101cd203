"""Manifold-description JSON schema, deterministic reports, and the
command-line surface.

Canonical on-disk format: JSON with a schema_version field; every exact
rational is serialized as a "p/q" string (or "p" when integral), so
exactness survives round trips.  Human reports show 12-digit decimal
enclosures of exact values; the decimals are never used internally.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from fractions import Fraction

from .decomposition_graph import (
    ENTIRE,
    DecompGraph,
    EdgeRec,
    End,
    VertexRec,
    select_component,
)
from .errors import GlueprintError, ResourceCapError, ValidationError
from .exact_lattice import frac
from .geometric_pieces import (
    BoundaryTorusData,
    HyperbolicPieceData,
    SeifertPieceData,
)
from .exact_lattice import QForm, Sublattice
from .gluing_engine import (
    Gluing,
    PreglueGraph,
    edge_distortion,
    is_nondegenerate,
    lift_entire,
    lift_loopless,
    primary_distortion,
    vertex_distortion,
)
from .seifert_arithmetic import (
    DominationBudget,
    chi,
    distortion_budget,
    enumerate_targets,
    euler_number,
    normalize,
    torsion_order,
)
from .shearing_enumerator import enumerate_gluings

SCHEMA_VERSION = 1


def _rat(x: Fraction) -> str:
    x = frac(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True, eq=False)
class ManifoldDocument:
    """Validated in-memory form of a manifold description."""

    pg: PreglueGraph
    gluing: Gluing  # may be None when the document omits the section
    budget: DominationBudget  # may be None


def parse(text: str) -> ManifoldDocument:
    """Parse and fully validate a JSON manifold document.

    Raises ValidationError carrying exact field paths on any violation.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError([f"document: invalid JSON ({exc})"])
    errs = []
    if doc.get("schema_version") != SCHEMA_VERSION:
        errs.append("schema_version: must be 1")
    graph = doc.get("graph")
    if not isinstance(graph, dict):
        raise ValidationError(errs + ["graph: missing section"])
    vertices = []
    for i, v in enumerate(graph.get("vertices", [])):
        try:
            vertices.append(VertexRec(str(v["id"]), v.get("kind", ENTIRE)))
        except (KeyError, TypeError):
            errs.append(f"graph.vertices[{i}]: needs an id")
    edges = []
    for i, e in enumerate(graph.get("edges", [])):
        try:
            edges.append(
                EdgeRec(str(e["id"]), e.get("kind", ENTIRE), tuple(e["endpoints"]))
            )
        except (KeyError, TypeError):
            errs.append(f"graph.edges[{i}]: needs id and endpoints")
    if errs:
        raise ValidationError(errs)
    try:
        g = DecompGraph(tuple(vertices), tuple(edges))
    except ValidationError as exc:
        raise ValidationError(exc.errors)

    pieces = {}
    for vid, spec in (doc.get("pieces") or {}).items():
        try:
            pieces[vid] = _parse_piece(vid, spec)
        except ValidationError as exc:
            errs.extend(exc.errors)
    if errs:
        raise ValidationError(errs)
    try:
        pg = PreglueGraph(g, pieces)
    except ValidationError as exc:
        raise ValidationError(exc.errors)

    gluing = None
    if "gluing" in doc and doc["gluing"] is not None:
        maps = {}
        for key, mtx in doc["gluing"].items():
            try:
                eid, slot = key.rsplit(".", 1)
                end = End(eid, int(slot))
            except ValueError:
                errs.append(f"gluing.{key}: keys look like '<edge>.<slot>'")
                continue
            try:
                maps[end] = tuple(tuple(int(x) for x in row) for row in mtx)
            except (TypeError, ValueError):
                errs.append(f"gluing.{key}: not a 2x2 integer matrix")
        if errs:
            raise ValidationError(errs)
        gluing = Gluing(maps)
        gluing.validate(g)

    budget = None
    if "budget" in doc and doc["budget"] is not None:
        b = doc["budget"]
        try:
            budget = DominationBudget(
                t=int(b["t"]),
                h=int(b["h"]),
                eps3=frac(b.get("eps3", "1/10")),
                sv_m=frac(b["sv_m"]) if "sv_m" in b else None,
                d=int(b["d"]) if "d" in b else None,
                h1_mod_d_order=int(b["h1_mod_d_order"]) if "h1_mod_d_order" in b else None,
                tor_order=int(b["tor_order"]) if "tor_order" in b else None,
                lens_cap=int(b["lens_cap"]) if "lens_cap" in b else None,
            )
        except (KeyError, TypeError) as exc:
            raise ValidationError([f"budget: {exc}"])
    return ManifoldDocument(pg, gluing, budget)


def _parse_piece(vid, spec):
    path = f"pieces.{vid}"
    if not isinstance(spec, dict) or "type" not in spec:
        raise ValidationError([f"{path}.type: missing"])
    if spec["type"] == "hyperbolic":
        try:
            forms = tuple(
                QForm(2, tuple(tuple(frac(x) for x in row) for row in cusp["gram"]))
                for cusp in spec.get("cusps", [])
            )
            basis = Sublattice(
                2 * len(forms),
                tuple(tuple(int(x) for x in row) for row in spec["del_h2_basis"]),
            )
            return HyperbolicPieceData(forms, basis)
        except GlueprintError as exc:
            raise ValidationError([f"{path}: {exc}"])
        except (KeyError, TypeError) as exc:
            raise ValidationError([f"{path}: malformed ({exc})"])
    if spec["type"] == "seifert":
        try:
            boundary = tuple(
                BoundaryTorusData(
                    divisibility=int(t.get("divisibility", 1)),
                    mu=tuple(t["mu"]) if "mu" in t else None,
                )
                for t in spec.get("boundary", [])
            )
            return SeifertPieceData(
                base_orientable=bool(spec.get("base_orientable", True)),
                genus=int(spec.get("genus", 0)),
                cone_orders=tuple(spec.get("cone_orders", [])),
                boundary=boundary,
            )
        except GlueprintError as exc:
            raise ValidationError([f"{path}: {exc}"])
        except (KeyError, TypeError) as exc:
            raise ValidationError([f"{path}: malformed ({exc})"])
    raise ValidationError([f"{path}.type: unknown type {spec['type']!r}"])


def print_document(docm: ManifoldDocument) -> str:
    """Serialize back to canonical JSON (sorted keys, rationals as p/q)."""
    g = docm.pg.graph
    doc = {
        "schema_version": SCHEMA_VERSION,
        "graph": {
            "vertices": [{"id": v.id, "kind": v.kind} for v in g.vertices],
            "edges": [
                {"id": e.id, "kind": e.kind, "endpoints": list(e.endpoints)}
                for e in g.edges
            ],
        },
        "pieces": {
            vid: _piece_to_json(piece) for vid, piece in sorted(docm.pg.pieces.items())
        },
    }
    if docm.gluing is not None:
        doc["gluing"] = {
            f"{end.edge}.{end.slot}": [list(r) for r in docm.gluing.matrix(end)]
            for end in g.ends()
        }
    if docm.budget is not None:
        b = docm.budget
        bd = {"t": b.t, "h": b.h, "eps3": _rat(b.eps3)}
        if b.sv_m is not None:
            bd["sv_m"] = _rat(b.sv_m)
        for name in ("d", "h1_mod_d_order", "tor_order", "lens_cap"):
            if getattr(b, name) is not None:
                bd[name] = getattr(b, name)
        doc["budget"] = bd
    return json.dumps(doc, sort_keys=True, indent=2)


def _piece_to_json(piece):
    if piece.kind == "hyperbolic":
        return {
            "type": "hyperbolic",
            "cusps": [
                {"gram": [[_rat(x) for x in row] for row in f.gram]}
                for f in piece.cusp_forms
            ],
            "del_h2_basis": [list(r) for r in piece.del_h2_basis.basis],
        }
    return {
        "type": "seifert",
        "base_orientable": piece.base_orientable,
        "genus": piece.genus,
        "cone_orders": list(piece.cone_orders),
        "boundary": [
            {"divisibility": t.divisibility, "mu": list(t.mu)} for t in piece.boundary
        ],
    }


# ---------------------------------------------------------------------------
# CLI


def _inv_json(s):
    from .seifert_arithmetic import euler_number

    return {
        "g": s.g,
        "b0": s.b0,
        "pairs": [[a, b] for a, b in s.pairs],
        "e": _rat(euler_number(s)),
        "chi": _rat(chi(s)),
    }


def restrict_component(base_graph, pg, phi, vertex=None):
    """Restrict a lifted preglue datum to one connected component.

    Defaults to the component containing copy 0 of the lowest base
    vertex id.
    """
    comp_graph = select_component(base_graph, pg.graph, vertex)
    keep = {v.id for v in comp_graph.vertices}
    pieces = {vid: piece for vid, piece in pg.pieces.items() if vid in keep}
    end_torus = {
        end: idx
        for end, idx in pg.end_torus.items()
        if pg.graph.vertex_of(end) in keep
    }
    maps = {end: phi.matrix(end) for end in end_torus}
    pg2 = PreglueGraph(comp_graph, pieces, end_torus)
    phi2 = Gluing(maps)
    phi2.validate(comp_graph)
    return pg2, phi2


def _load(path):
    with open(path, "r", encoding="utf-8") as fh:
        return parse(fh.read())


def _emit(report_lines, payload, as_json):
    if as_json:
        print(json.dumps(payload, sort_keys=True, indent=2))
    else:
        for line in report_lines:
            print(line)


def _distortion_payload(pg, gluing):
    edges = {}
    lines = []
    for e in pg.graph.edges:
        val = edge_distortion(pg, gluing, e.id)
        lo, hi = val.decimal_enclosure()
        edges[e.id] = {"delta": _rat(val.delta), "root": val.root, "enclosure": [lo, hi]}
        lines.append(f"edge {e.id}: delta = {_rat(val.delta)}, D_e = delta^(1/4) in [{lo}, {hi}]")
    verts = {}
    for v in pg.graph.vertices:
        val = vertex_distortion(pg, gluing, v.id)
        lo, hi = val.decimal_enclosure()
        verts[v.id] = {"delta": _rat(val.delta), "root": val.root, "enclosure": [lo, hi]}
        lines.append(
            f"vertex {v.id}: delta = {_rat(val.delta)}, D_v = delta^(1/{val.root}) in [{lo}, {hi}]"
        )
    primary = primary_distortion(pg, gluing)
    lo, hi = primary.decimal_enclosure()
    lines.append(f"primary distortion: delta = {_rat(primary.delta)}, root {primary.root}, in [{lo}, {hi}]")
    payload = {
        "edges": edges,
        "vertices": verts,
        "primary": {"delta": _rat(primary.delta), "root": primary.root, "enclosure": [lo, hi]},
    }
    return lines, payload


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(
        prog="glueprint",
        description="Exact distortion invariants and gluing enumeration for"
        " graph-of-geometrics manifold descriptions",
    )
    ap.add_argument("--json", action="store_true", help="machine-readable output")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("distortion", help="edge/vertex/primary distortions")
    p.add_argument("document")

    p = sub.add_parser("check", help="validate a document and test nondegeneracy")
    p.add_argument("document")

    p = sub.add_parser("enumerate-gluings", help="enumerate gluings under a budget")
    p.add_argument("document")
    p.add_argument("--budget", required=True, help="distortion budget (rational)")
    p.add_argument("--cap", type=int, default=200000, help="sweep cell cap")

    p = sub.add_parser("cover", help="entire or loopless double cover of a document")
    p.add_argument("document")
    kind = p.add_mutually_exclusive_group(required=True)
    kind.add_argument("--entire", action="store_true")
    kind.add_argument("--loopless", action="store_true")
    p.add_argument("--component", default=None, help="restrict to the component of this vertex")

    p = sub.add_parser("seifert", help="invariants of a closed Seifert datum")
    p.add_argument("g", type=int)
    p.add_argument("b0", type=int)
    p.add_argument("fractions", nargs="*", help="b_i/a_i entries")

    p = sub.add_parser("targets", help="candidate targets under a budget document")
    p.add_argument("document")

    p = sub.add_parser("budget", help="distortion budget from t, h, eps3")
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--h", type=int, default=1)
    p.add_argument("--eps3", default="1/10")

    args = ap.parse_args(argv)
    try:
        return _dispatch(args)
    except ResourceCapError as exc:
        print(f"resource cap exceeded: {exc}", file=sys.stderr)
        return 2
    except (GlueprintError,) as exc:
        if isinstance(exc, ValidationError):
            for line in exc.errors:
                print(f"validation error: {line}", file=sys.stderr)
        else:
            print(f"error: {exc}", file=sys.stderr)
        return 1


def _dispatch(args) -> int:
    if args.command == "distortion":
        docm = _load(args.document)
        if docm.gluing is None:
            raise ValidationError(["gluing: section required for distortion"])
        lines, payload = _distortion_payload(docm.pg, docm.gluing)
        _emit(lines, payload, args.json)
        return 0

    if args.command == "check":
        docm = _load(args.document)
        lines = ["document: valid"]
        payload = {"valid": True}
        if docm.gluing is not None:
            nd = is_nondegenerate(docm.pg, docm.gluing)
            lines.append(f"nondegenerate: {nd}")
            payload["nondegenerate"] = nd
        _emit(lines, payload, args.json)
        return 0

    if args.command == "enumerate-gluings":
        docm = _load(args.document)
        records = enumerate_gluings(docm.pg, frac(args.budget), cap=args.cap)
        payload = []
        lines = [f"{len(records)} gluing classes under budget {args.budget}"]
        for rec in records:
            entry = {
                "cosets": [
                    {"edge": eid, "rep": [list(r) for r in mtx], "delta": _rat(delta)}
                    for eid, mtx, delta in rec.coset_signature
                ],
                "index_vector": [[vid, k] for vid, k in rec.index_vector],
                "gluing": {
                    f"{end.edge}.{end.slot}": [list(r) for r in rec.gluing.matrix(end)]
                    for end in sorted(rec.gluing.maps)
                },
                "edge_deltas": {eid: _rat(v.delta) for eid, v in rec.edge_values},
                "vertex_deltas": {
                    vid: {"delta": _rat(v.delta), "root": v.root}
                    for vid, v in rec.vertex_values
                },
                "primary": {"delta": _rat(rec.primary.delta), "root": rec.primary.root},
            }
            payload.append(entry)
            cosets = ", ".join(
                f"{eid}: delta={_rat(d)}" for eid, _, d in rec.coset_signature
            )
            idx = ", ".join(f"{vid}:{k}" for vid, k in rec.index_vector) or "-"
            lines.append(f"class [{cosets}] indices [{idx}]")
        _emit(lines, payload, args.json)
        return 0

    if args.command == "cover":
        docm = _load(args.document)
        if docm.gluing is None:
            raise ValidationError(["gluing: section required to lift a document"])
        if args.entire:
            pg2, phi2, _ = lift_entire(docm.pg, docm.gluing)
        else:
            pg2, phi2, _ = lift_loopless(docm.pg, docm.gluing)
        if args.component is not None:
            vid = None if args.component == "auto" else args.component
            pg2, phi2 = restrict_component(docm.pg.graph, pg2, phi2, vid)
        print(print_document(ManifoldDocument(pg2, phi2, docm.budget)))
        return 0

    if args.command == "seifert":
        pairs = []
        for f in args.fractions:
            b, a = f.split("/")
            pairs.append((int(a), int(b)))
        s = normalize(args.g, args.b0, pairs)
        x = chi(s)
        e = euler_number(s)
        payload = {
            "normalized": {
                "g": s.g,
                "b0": s.b0,
                "pairs": [[a, b] for a, b in s.pairs],
            },
            "chi": _rat(x),
            "e": _rat(e),
        }
        lines = [
            f"normalized: ({s.g}; {s.b0}"
            + "".join(f", {b}/{a}" for a, b in s.pairs)
            + ")",
            f"chi = {_rat(x)}",
            f"e = {_rat(e)}",
        ]
        if e != 0:
            t = torsion_order(s)
            payload["torsion_order"] = t
            lines.append(f"|Tor H_1| = {t}")
        else:
            lines.append("|Tor H_1|: formula inapplicable (e = 0)")
        _emit(lines, payload, args.json)
        return 0

    if args.command == "targets":
        docm = _load(args.document)
        if docm.budget is None:
            raise ValidationError(["budget: section required for targets"])
        report = enumerate_targets(docm.budget)
        payload = {
            "torsion_cap": report.torsion_cap,
            "lens": {"orders": list(report.lens_orders), "flag": report.lens_flag},
            "platonic": [_inv_json(s) for s in report.platonic],
            "prism": {"candidates": [_inv_json(s) for s in report.prism], "flag": report.prism_flag},
            "chi_zero": [_inv_json(s) for s in report.chi_zero],
            "chi_negative": {
                "candidates": [_inv_json(s) for s in report.chi_negative],
                "flag": report.chi_negative_flag,
                "family_floors": [
                    {"g": g, "orders": list(orders), "e_floor": _rat(fl)}
                    for (g, orders), fl in report.negative_family_floors
                ],
            },
        }
        lines = [
            f"torsion cap: {report.torsion_cap}",
            f"lens orders ({report.lens_flag}): {list(report.lens_orders)}",
            f"platonic candidates: {len(report.platonic)}",
            f"prism candidates ({report.prism_flag}): {len(report.prism)}",
            f"chi = 0 candidates: {len(report.chi_zero)}",
            f"chi < 0 ({report.chi_negative_flag}): {len(report.chi_negative)}",
        ]
        _emit(lines, payload, args.json)
        return 0

    if args.command == "budget":
        bud = DominationBudget(t=args.t, h=args.h, eps3=frac(args.eps3))
        bound = distortion_budget(bud)
        payload = {
            "area_coefficient": _rat(bound.area_coefficient),
            "sinh": [_rat(bound.sinh_lo), _rat(bound.sinh_hi)],
            "value": [_rat(bound.value_lo), _rat(bound.value_hi)],
            "value_float": [float(bound.value_lo), float(bound.value_hi)],
            "piece_bound": bound.piece_bound,
            "cutting_bound": bound.cutting_bound,
        }
        lines = [
            f"A(2t) = {_rat(bound.area_coefficient)} * pi",
            f"budget = A(2t)/(4 sinh(eps3/2)) in [{float(bound.value_lo):.6f}, {float(bound.value_hi):.6f}]",
            f"pieces <= {bound.piece_bound}, cutting surfaces <= {bound.cutting_bound}",
        ]
        _emit(lines, payload, args.json)
        return 0

    raise GlueprintError(f"unknown command {args.command!r}")


# subcommand dispatch under its interface name
run = main


if __name__ == "__main__":
    sys.exit(main())
