"""Fiber products of graph immersions and their circular components."""

from __future__ import annotations

from dataclasses import dataclass, field

from .graphs import (
    Edge,
    Graph,
    GraphMorphism,
    SignedEdge,
    connected_components,
    is_immersion,
    sort_key,
    valence,
)
from .words import Loop, MultiLoop, traversal_counts

__all__ = [
    "Component",
    "PullbackResult",
    "loop_morphism",
    "fiber_product",
    "circular_components",
    "pullback",
    "covering_degree",
    "is_reducible",
]


@dataclass(frozen=True)
class Component:
    vertices: tuple
    edges: tuple
    kind: str  # "circle" | "segment" | "other"


@dataclass(frozen=True, eq=False)
class PullbackResult:
    """Fiber product ``left x_base right`` with its projections.

    When built by :func:`pullback` the right factor is a (multi-)loop and
    ``circles`` holds the circular part as loops in the left factor.
    ``covers[c]`` names the base loop that circle ``c`` covers and
    ``degrees[c]`` the degree; circle position ``j`` lies over position
    ``j mod |base loop|`` of that base loop.
    """

    total: Graph
    proj_left: GraphMorphism
    proj_right: GraphMorphism
    components: tuple
    circles: MultiLoop | None = None
    covers: tuple = ()
    degrees: tuple = ()
    segments: int = 0
    subject: MultiLoop | None = field(default=None, repr=False)

    def sigma(self, ref) -> tuple:
        """Image in the base multiloop of a point ``(circle, position)``."""
        c, j = ref
        k = self.covers[c]
        return (k, j % len(self.subject.loops[k]))

    def report(self) -> dict:
        circles = self.circles.loops if self.circles is not None else ()
        return {
            "circles": [{"length": len(lp), "degree": d} for lp, d in zip(circles, self.degrees)],
            "segments": self.segments,
            "deg_sigma": covering_degree(self),
        }


def loop_morphism(loop: Loop | MultiLoop) -> GraphMorphism:
    """Subdivided circle(s) mapping onto the loop(s).

    Loop ``k`` of length ``m`` becomes vertices ``(k, i)`` and edges
    ``(k, i): (k, i) -> (k, i+1 mod m)`` over step ``i``.
    """
    ml = MultiLoop.of(loop)
    vertices, edges, vmap, emap = [], [], {}, {}
    for k, lp in enumerate(ml.loops):
        m = len(lp)
        for i, se in enumerate(lp.path):
            vertices.append((k, i))
            edges.append(Edge((k, i), (k, i), (k, (i + 1) % m)))
            vmap[(k, i)] = lp.vertex(i)
            emap[(k, i)] = se
    return GraphMorphism(Graph(vertices, edges), ml.graph, vmap, emap)


def _classify(g: Graph, vertices, edges) -> str:
    vals = [valence(g, v) for v in vertices]
    if edges and all(x == 2 for x in vals) and len(edges) == len(vertices):
        return "circle"
    if len(edges) == len(vertices) - 1 and all(x <= 2 for x in vals):
        return "segment"
    return "other"


def fiber_product(f1: GraphMorphism, f2: GraphMorphism) -> PullbackResult:
    """Pullback of two immersions into the same graph.

    Cells are pairs of cells with equal image.  The edge ``(e1, e2)`` is
    oriented along ``e1``; the right projection carries the relative sign.
    """
    if f1.codomain != f2.codomain:
        raise ValueError("fiber_product: codomains differ")
    if not is_immersion(f1) or not is_immersion(f2):
        raise ValueError("fiber_product: both maps must be immersions")

    over_vertex: dict = {}
    for v2 in f2.domain.vertices:
        over_vertex.setdefault(f2.vertex_map[v2], []).append(v2)
    over_edge: dict = {}
    for e2 in f2.domain.edges:
        over_edge.setdefault(f2.edge_map[e2.id].edge, []).append(e2)

    vertices = [(v1, v2) for v1 in f1.domain.vertices for v2 in over_vertex.get(f1.vertex_map[v1], ())]
    edges, left_e, right_e = [], {}, {}
    for e1 in f1.domain.edges:
        img1 = f1.edge_map[e1.id]
        for e2 in over_edge.get(img1.edge, ()):
            rel = img1.sign * f2.edge_map[e2.id].sign
            end2 = (e2.src, e2.dst) if rel > 0 else (e2.dst, e2.src)
            eid = (e1.id, e2.id)
            edges.append(Edge(eid, (e1.src, end2[0]), (e1.dst, end2[1])))
            left_e[eid] = SignedEdge(e1.id, 1)
            right_e[eid] = SignedEdge(e2.id, rel)
    total = Graph(vertices, edges)
    p1 = GraphMorphism(total, f1.domain, {v: v[0] for v in vertices}, left_e)
    p2 = GraphMorphism(total, f2.domain, {v: v[1] for v in vertices}, right_e)
    assert is_immersion(p1) and is_immersion(p2), "projections of a fiber product must be immersions"
    comps = tuple(Component(vs, es, _classify(total, vs, es)) for vs, es in connected_components(total))
    return PullbackResult(total, p1, p2, comps)


def circular_components(p: PullbackResult, subject: Loop | MultiLoop) -> PullbackResult:
    """Extract the circles of a pullback against ``loop_morphism(subject)``.

    Each circle is read in the direction that covers its base loop
    positively, starting over base position 0 at the least such edge.
    """
    ml = MultiLoop.of(subject)
    left = p.proj_left.codomain
    loops, provenance, covers, degrees = [], [], [], []
    segments = 0
    for comp in p.components:
        if comp.kind != "circle":
            segments += 1
            continue
        # forward-along-the-base step out of each vertex
        step_from = {}
        starts = []
        for eid in comp.edges:
            e = p.total.edge(eid)
            rel = p.proj_right.edge_map[eid].sign
            a, b = (e.src, e.dst) if rel > 0 else (e.dst, e.src)
            step_from[a] = (eid, rel, b)
            if eid[1][1] == 0:
                starts.append(eid)
        start = min(starts, key=sort_key)
        e = p.total.edge(start)
        v = e.src if p.proj_right.edge_map[start].sign > 0 else e.dst
        k = start[1][0]
        path, prov = [], []
        first = v
        while True:
            eid, rel, nxt = step_from[v]
            path.append(SignedEdge(eid[0], rel))
            prov.append((eid[1], eid[0]))
            v = nxt
            if v == first:
                break
        m = len(ml.loops[k])
        assert len(path) % m == 0, "circle length must be a multiple of the base loop length"
        loops.append(Loop(left, tuple(path)))
        provenance.append(tuple(prov))
        covers.append(k)
        degrees.append(len(path) // m)
    circles = MultiLoop(left, tuple(loops), tuple(provenance))
    return PullbackResult(
        p.total, p.proj_left, p.proj_right, p.components,
        circles, tuple(covers), tuple(degrees), segments, ml,
    )


def pullback(rho: GraphMorphism, subject: Loop | MultiLoop) -> PullbackResult:
    """Pull back ``subject`` (loops in ``rho.codomain``) along ``rho``."""
    return circular_components(fiber_product(rho, loop_morphism(subject)), subject)


def covering_degree(p: PullbackResult) -> int:
    """Degree of the covering of the base circle(s) by the circular part.

    With a single base loop this is the number of preimages of a point.
    """
    if p.circles is None or not p.circles.loops:
        return 0
    if len(p.subject.loops) == 1:
        return sum(len(lp) for lp in p.circles.loops) // len(p.subject.loops[0])
    return sum(p.degrees)


def is_reducible(loops: Loop | MultiLoop) -> tuple[bool, object]:
    """Whether some edge of the ambient graph is traversed at most once.

    Returns ``(flag, witness)``; the witness is a least-traversed edge,
    ties broken by edge ID.
    """
    counts = traversal_counts(loops)
    if not counts:
        return False, None
    e = min(counts, key=lambda e: (counts[e], sort_key(e)))
    return (True, e) if counts[e] <= 1 else (False, None)
