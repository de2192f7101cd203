"""Graphs with semi-edges and semi-vertices, ends-of-edges, and the two
double-cover constructions that remove semi-objects and loops.

An end of an edge is the pair (edge id, slot); entire edges have slots 0
and 1, semi-edges only slot 0 (their single end is its own opposite).
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import PreconditionError, ValidationError

ENTIRE = "entire"
SEMI = "semi"


@dataclass(frozen=True, order=True)
class End:
    edge: str
    slot: int

    def __repr__(self):
        return f"{self.edge}.{self.slot}"


@dataclass(frozen=True)
class VertexRec:
    id: str
    kind: str = ENTIRE


@dataclass(frozen=True)
class EdgeRec:
    id: str
    kind: str
    endpoints: tuple  # one vertex id for semi, two (ordered) for entire


@dataclass(frozen=True)
class DecompGraph:
    vertices: tuple
    edges: tuple

    def __post_init__(self):
        errs = []
        ids = [v.id for v in self.vertices]
        if len(set(ids)) != len(ids):
            errs.append("graph.vertices: duplicate vertex ids")
        for v in self.vertices:
            if v.kind not in (ENTIRE, SEMI):
                errs.append(f"graph.vertices.{v.id}: unknown kind {v.kind!r}")
        eids = [e.id for e in self.edges]
        if len(set(eids)) != len(eids):
            errs.append("graph.edges: duplicate edge ids")
        vset = set(ids)
        for e in self.edges:
            if e.kind == SEMI and len(e.endpoints) != 1:
                errs.append(f"graph.edges.{e.id}: a semi-edge has exactly one end")
            elif e.kind == ENTIRE and len(e.endpoints) != 2:
                errs.append(f"graph.edges.{e.id}: an entire edge has exactly two ends")
            elif e.kind not in (ENTIRE, SEMI):
                errs.append(f"graph.edges.{e.id}: unknown kind {e.kind!r}")
            for v in e.endpoints:
                if v not in vset:
                    errs.append(f"graph.edges.{e.id}: endpoint {v!r} is not a vertex")
        if errs:
            raise ValidationError(errs)

    # -- derived structure ---------------------------------------------------

    def vertex(self, vid) -> VertexRec:
        for v in self.vertices:
            if v.id == vid:
                return v
        raise KeyError(vid)

    def edge(self, eid) -> EdgeRec:
        for e in self.edges:
            if e.id == eid:
                return e
        raise KeyError(eid)

    def ends(self) -> tuple:
        out = []
        for e in self.edges:
            out.append(End(e.id, 0))
            if e.kind == ENTIRE:
                out.append(End(e.id, 1))
        return tuple(sorted(out))

    def opposite(self, end: End) -> End:
        e = self.edge(end.edge)
        if e.kind == SEMI:
            return end
        return End(end.edge, 1 - end.slot)

    def vertex_of(self, end: End) -> str:
        e = self.edge(end.edge)
        return e.endpoints[end.slot] if e.kind == ENTIRE else e.endpoints[0]

    def ends_at(self, vid) -> tuple:
        return tuple(d for d in self.ends() if self.vertex_of(d) == vid)

    def valence(self, vid) -> int:
        return len(self.ends_at(vid))

    def is_entire(self) -> bool:
        return all(v.kind == ENTIRE for v in self.vertices) and all(
            e.kind == ENTIRE for e in self.edges
        )

    def is_loopless(self) -> bool:
        return all(
            e.kind == SEMI or e.endpoints[0] != e.endpoints[1] for e in self.edges
        )

    def components(self) -> list:
        """Connected components as sorted tuples of vertex ids."""
        adj = {v.id: set() for v in self.vertices}
        for e in self.edges:
            for a in e.endpoints:
                for b in e.endpoints:
                    adj[a].add(b)
        seen = set()
        comps = []
        for v in sorted(adj):
            if v in seen:
                continue
            stack, comp = [v], set()
            while stack:
                x = stack.pop()
                if x in comp:
                    continue
                comp.add(x)
                stack.extend(adj[x] - comp)
            seen |= comp
            comps.append(tuple(sorted(comp)))
        return comps


@dataclass(frozen=True)
class CoveringMap:
    """Bookkeeping for a graph double cover: cover object -> base object.

    Ends created by cutting a semi-vertex piece do not lie over base ends
    and are absent from end_map (there are none in the constructions
    implemented here).
    """

    degree: int
    vertex_map: tuple  # pairs (cover vid, base vid)
    end_map: tuple  # pairs (cover End, base End)

    def vertex_fiber(self, base_vid):
        return tuple(c for c, b in self.vertex_map if b == base_vid)

    def end_fiber(self, base_end):
        return tuple(c for c, b in self.end_map if b == base_end)

    def base_vertex(self, cover_vid):
        for c, b in self.vertex_map:
            if c == cover_vid:
                return b
        raise KeyError(cover_vid)

    def base_end(self, cover_end):
        for c, b in self.end_map:
            if c == cover_end:
                return b
        raise KeyError(cover_end)


def _copy_vid(vid, i):
    return f"{vid}#{i}"


def entire_double_cover(g: DecompGraph):
    """Double cover with no semi-edges and no semi-vertices.

    Entire vertices and entire edges lift to two labelled copies; a
    semi-edge unfolds into a single entire edge joining the two lifts of
    its vertex; a semi-vertex lifts to a single vertex of doubled valence
    (its piece is replaced upstream by the fiber-centralizer double
    cover, whose boundary is a trivial double cover).  If the input is
    already entire the output is two disjoint copies.
    """
    vertices = []
    vmap = []
    for v in g.vertices:
        if v.kind == SEMI:
            vertices.append(VertexRec(_copy_vid(v.id, "01"), ENTIRE))
            vmap.append((_copy_vid(v.id, "01"), v.id))
        else:
            for i in (0, 1):
                vertices.append(VertexRec(_copy_vid(v.id, i), ENTIRE))
                vmap.append((_copy_vid(v.id, i), v.id))

    def lift_vertex(vid, i):
        return _copy_vid(vid, "01") if g.vertex(vid).kind == SEMI else _copy_vid(vid, i)

    edges = []
    emap = []
    for e in g.edges:
        if e.kind == ENTIRE:
            u, w = e.endpoints
            for i in (0, 1):
                eid = f"{e.id}#{i}"
                edges.append(EdgeRec(eid, ENTIRE, (lift_vertex(u, i), lift_vertex(w, i))))
                emap.append((End(eid, 0), End(e.id, 0)))
                emap.append((End(eid, 1), End(e.id, 1)))
        else:
            # the cut Klein-bottle leaves one torus; cross-gluing the two
            # copies yields one entire edge over the semi-edge
            u = e.endpoints[0]
            eid = f"{e.id}#01"
            edges.append(EdgeRec(eid, ENTIRE, (lift_vertex(u, 0), lift_vertex(u, 1))))
            emap.append((End(eid, 0), End(e.id, 0)))
            emap.append((End(eid, 1), End(e.id, 0)))
    cover = DecompGraph(tuple(vertices), tuple(edges))
    return cover, CoveringMap(2, tuple(vmap), tuple(emap))


def loopless_double_cover(g: DecompGraph):
    """Double cover of an entire graph with every loop cut and cross-glued."""
    if not g.is_entire():
        raise PreconditionError("loopless cover requires an entire graph")
    vertices = []
    vmap = []
    for v in g.vertices:
        for i in (0, 1):
            vertices.append(VertexRec(_copy_vid(v.id, i), ENTIRE))
            vmap.append((_copy_vid(v.id, i), v.id))
    edges = []
    emap = []
    for e in g.edges:
        u, w = e.endpoints
        loop = u == w
        for i in (0, 1):
            eid = f"{e.id}#{i}"
            if loop:
                # end (e.0, i) stays on copy i, end (e.1, .) crosses over
                edges.append(EdgeRec(eid, ENTIRE, (_copy_vid(u, i), _copy_vid(w, 1 - i))))
            else:
                edges.append(EdgeRec(eid, ENTIRE, (_copy_vid(u, i), _copy_vid(w, i))))
            emap.append((End(eid, 0), End(e.id, 0)))
            emap.append((End(eid, 1), End(e.id, 1)))
    cover = DecompGraph(tuple(vertices), tuple(edges))
    return cover, CoveringMap(2, tuple(vmap), tuple(emap))


def select_component(g: DecompGraph, cover: DecompGraph, component=None):
    """Restrict a cover to one connected component.

    Defaults to the component containing copy 0 of the lowest base
    vertex id (the lift tagged '#0', or '#01' for a lifted semi-vertex).
    """
    comps = cover.components()
    if component is None:
        lowest = min(v.id for v in g.vertices)
        for cand in (f"{lowest}#0", f"{lowest}#01"):
            for comp in comps:
                if cand in comp:
                    component = comp
                    break
            if component is not None:
                break
    else:
        for comp in comps:
            if component in comp:
                component = comp
                break
        else:
            raise PreconditionError(f"no component contains vertex {component!r}")
    keep = set(component)
    vertices = tuple(v for v in cover.vertices if v.id in keep)
    edges = tuple(e for e in cover.edges if all(x in keep for x in e.endpoints))
    return DecompGraph(vertices, edges)
