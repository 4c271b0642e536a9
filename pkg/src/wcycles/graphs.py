"""Finite graphs, cellular maps between them, and Stallings folding.

Edges are stored once with a fixed orientation.  A traversal of an edge
in either direction is a :class:`SignedEdge`.  Vertex and edge IDs may be
any hashable built from ints, strings and tuples; all deterministic
choices (spanning trees, folding order, "least" cell) use :func:`sort_key`.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Hashable, Iterable, NamedTuple, Sequence

__all__ = [
    "Edge",
    "SignedEdge",
    "Graph",
    "GraphMorphism",
    "sort_key",
    "rose",
    "circle_graph",
    "subdivided_rose",
    "validate_graph",
    "euler_characteristic",
    "rank",
    "valence",
    "is_connected",
    "connected_components",
    "is_core",
    "core",
    "is_tree",
    "identity",
    "inclusion",
    "restrict",
    "validate_morphism",
    "is_immersion",
    "spanning_tree",
    "fold",
]

LETTERS = "abcdefghijklmnopqrstuvwxyz"


def sort_key(x):
    """Total order on mixed int/str/tuple IDs."""
    if isinstance(x, tuple):
        return (2, tuple(sort_key(y) for y in x))
    if isinstance(x, str):
        return (1, x)
    if isinstance(x, (int, float)):
        return (0, x)
    return (3, repr(x))


class SignedEdge(NamedTuple):
    """A traversal of ``edge``; ``sign`` is +1 (forward) or -1 (backward)."""

    edge: Hashable
    sign: int = 1

    def inverse(self) -> "SignedEdge":
        return SignedEdge(self.edge, -self.sign)


@dataclass(frozen=True)
class Edge:
    id: Hashable
    src: Hashable
    dst: Hashable


class Graph:
    """A finite multigraph; loops and parallel edges are allowed.

    Construction never raises on malformed data so that
    :func:`validate_graph` can report it; operations that need a valid
    graph call :meth:`check`.
    """

    __slots__ = ("vertices", "edges", "_edge", "_vset", "_germs", "_hash")

    def __init__(self, vertices: Iterable = (), edges: Iterable = ()):
        self.vertices = tuple(sorted(vertices, key=sort_key))
        es = [e if isinstance(e, Edge) else Edge(*e) for e in edges]
        self.edges = tuple(sorted(es, key=lambda e: sort_key(e.id)))
        self._edge = {e.id: e for e in self.edges}
        self._vset = frozenset(self.vertices)
        self._germs = None
        self._hash = None

    # -- lookup ---------------------------------------------------------
    def __contains__(self, v) -> bool:
        return v in self._vset

    def has_edge(self, e) -> bool:
        return e in self._edge

    def edge(self, e) -> Edge:
        try:
            return self._edge[e]
        except KeyError:
            raise KeyError(f"unknown edge {e!r}") from None

    @property
    def edge_ids(self) -> tuple:
        return tuple(e.id for e in self.edges)

    def tail(self, se: SignedEdge):
        """Start vertex of a traversal."""
        e = self.edge(se.edge)
        return e.src if se.sign > 0 else e.dst

    def head(self, se: SignedEdge):
        """End vertex of a traversal."""
        e = self.edge(se.edge)
        return e.dst if se.sign > 0 else e.src

    def germs(self, v) -> tuple[SignedEdge, ...]:
        """Edge-ends at ``v``, as the traversals that leave ``v``.

        A loop at ``v`` contributes two germs, one per direction.
        """
        if self._germs is None:
            table: dict = {u: [] for u in self.vertices}
            for e in self.edges:
                table.setdefault(e.src, []).append(SignedEdge(e.id, 1))
                table.setdefault(e.dst, []).append(SignedEdge(e.id, -1))
            self._germs = {u: tuple(gs) for u, gs in table.items()}
        if v not in self._vset:
            raise KeyError(f"unknown vertex {v!r}")
        return self._germs.get(v, ())

    # -- construction helpers ---------------------------------------------
    def subgraph(self, vertices: Iterable, edges: Iterable) -> "Graph":
        es = set(edges)
        return Graph(vertices, [e for e in self.edges if e.id in es])

    def without_edges(self, edges: Iterable) -> "Graph":
        drop = set(edges)
        return Graph(self.vertices, [e for e in self.edges if e.id not in drop])

    def relabel(self) -> tuple["Graph", dict, dict]:
        """Copy with vertices and edges renumbered 0..n-1 in sorted order."""
        vmap = {v: i for i, v in enumerate(self.vertices)}
        emap = {e.id: i for i, e in enumerate(self.edges)}
        g = Graph(range(len(vmap)), [Edge(emap[e.id], vmap[e.src], vmap[e.dst]) for e in self.edges])
        return g, vmap, emap

    def check(self) -> None:
        problems = validate_graph(self)
        if problems:
            raise ValueError("invalid graph: " + "; ".join(problems))

    # -- value semantics ----------------------------------------------------
    def _canon(self):
        return (self.vertices, tuple((e.id, e.src, e.dst) for e in self.edges))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self._canon() == other._canon()

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self._canon())
        return self._hash

    def __repr__(self) -> str:
        return f"Graph(|V|={len(self.vertices)}, |E|={len(self.edges)})"


# ---------------------------------------------------------------------------
# standard graphs


def rose(letters: int | str = 2) -> Graph:
    """Bouquet of circles at vertex 0; edges are named by letters."""
    if isinstance(letters, int):
        if not 0 <= letters <= len(LETTERS):
            raise ValueError(f"rose rank must be in 0..{len(LETTERS)}")
        letters = LETTERS[:letters]
    return Graph([0], [Edge(c, 0, 0) for c in letters])


def circle_graph(n: int) -> Graph:
    """Cycle with vertices and edges 0..n-1, edge i running i -> i+1."""
    if n < 1:
        raise ValueError("a circle needs at least one edge")
    return Graph(range(n), [Edge(i, i, (i + 1) % n) for i in range(n)])


def subdivided_rose(letters: int | str, parts: int) -> Graph:
    """Rose whose petal ``c`` is cut into edges ``(c, 0) .. (c, parts-1)``.

    Interior vertices are ``(c, 1) .. (c, parts-1)``; the hub is 0.
    """
    if isinstance(letters, int):
        letters = LETTERS[:letters]
    if parts < 1:
        raise ValueError("parts must be positive")
    vertices: list = [0]
    edges = []
    for c in letters:
        chain = [0] + [(c, j) for j in range(1, parts)] + [0]
        vertices.extend(chain[1:-1])
        edges.extend(Edge((c, j), chain[j], chain[j + 1]) for j in range(parts))
    return Graph(vertices, edges)


# ---------------------------------------------------------------------------
# invariants of a single graph


def validate_graph(g: Graph) -> list[str]:
    """Return every invariant violation of ``g``; empty iff valid."""
    problems = []
    seen = set()
    for v in g.vertices:
        if v in seen:
            problems.append(f"duplicate vertex id {v!r}")
        seen.add(v)
    seen_e = set()
    for e in g.edges:
        if e.id in seen_e:
            problems.append(f"duplicate edge id {e.id!r}")
        seen_e.add(e.id)
        if e.src not in g:
            problems.append(f"edge {e.id!r}: missing source vertex {e.src!r}")
        if e.dst not in g:
            problems.append(f"edge {e.id!r}: missing target vertex {e.dst!r}")
    return problems


def euler_characteristic(g: Graph) -> int:
    g.check()
    return len(g.vertices) - len(g.edges)


def rank(g: Graph) -> int:
    """Rank of the fundamental group of a connected graph."""
    return 1 - euler_characteristic(g)


def valence(g: Graph, v) -> int:
    return len(g.germs(v))


def connected_components(g: Graph) -> list[tuple[tuple, tuple]]:
    """Components as (vertices, edge ids), ordered by least vertex."""
    parent = {v: v for v in g.vertices}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for e in g.edges:
        a, b = find(e.src), find(e.dst)
        if a != b:
            if sort_key(b) < sort_key(a):
                a, b = b, a
            parent[b] = a
    verts: dict = {}
    for v in g.vertices:
        verts.setdefault(find(v), []).append(v)
    edges: dict = {}
    for e in g.edges:
        edges.setdefault(find(e.src), []).append(e.id)
    return [(tuple(vs), tuple(edges.get(r, ()))) for r, vs in verts.items()]


def is_connected(g: Graph) -> bool:
    return len(connected_components(g)) <= 1


def is_core(g: Graph) -> bool:
    if len(g.vertices) == 1:
        return all(valence(g, v) != 1 for v in g.vertices)
    return all(valence(g, v) > 1 for v in g.vertices)


def is_tree(g: Graph) -> bool:
    return bool(g.vertices) and is_connected(g) and len(g.edges) == len(g.vertices) - 1


def _trim(g: Graph, keep=frozenset()) -> Graph:
    # Repeatedly drop vertices of valence <= 1 (except ``keep``) with
    # their edge; the last vertex standing is never removed.
    vertices = set(g.vertices)
    edges = {e.id: e for e in g.edges}
    incident: dict = {v: set() for v in vertices}
    for e in g.edges:
        incident[e.src].add(e.id)
        incident[e.dst].add(e.id)

    def val(v):
        return sum(2 if edges[i].src == edges[i].dst else 1 for i in incident[v])

    queue = deque(sorted((v for v in vertices if val(v) <= 1), key=sort_key))
    while queue and len(vertices) > 1:
        v = queue.popleft()
        if v not in vertices or v in keep or val(v) > 1:
            continue
        vertices.discard(v)
        for i in list(incident.pop(v)):
            e = edges.pop(i)
            other = e.dst if e.src == v else e.src
            incident[other].discard(i)
            if val(other) <= 1:
                queue.append(other)
    return Graph(vertices, edges.values())


def core(g: Graph) -> Graph:
    """Iteratively trim hanging trees.  A tree trims to a single vertex."""
    g.check()
    return _trim(g)


# ---------------------------------------------------------------------------
# morphisms


@dataclass(frozen=True, eq=False)
class GraphMorphism:
    """Cellular map; ``edge_map`` sends each domain edge to a traversal."""

    domain: Graph
    codomain: Graph
    vertex_map: dict
    edge_map: dict

    def __post_init__(self):
        em = {e: (se if isinstance(se, SignedEdge) else SignedEdge(*se)) for e, se in self.edge_map.items()}
        object.__setattr__(self, "edge_map", em)
        object.__setattr__(self, "vertex_map", dict(self.vertex_map))

    def map_germ(self, se: SignedEdge) -> SignedEdge:
        img = self.edge_map[se.edge]
        return SignedEdge(img.edge, img.sign * se.sign)

    def map_path(self, path: Iterable[SignedEdge]) -> tuple[SignedEdge, ...]:
        return tuple(self.map_germ(se) for se in path)

    def check(self) -> None:
        problems = validate_morphism(self)
        if problems:
            raise ValueError("invalid morphism: " + "; ".join(problems))


def identity(g: Graph) -> GraphMorphism:
    return GraphMorphism(g, g, {v: v for v in g.vertices}, {e.id: SignedEdge(e.id, 1) for e in g.edges})


def inclusion(sub: Graph, g: Graph) -> GraphMorphism:
    return GraphMorphism(sub, g, {v: v for v in sub.vertices}, {e.id: SignedEdge(e.id, 1) for e in sub.edges})


def restrict(m: GraphMorphism, sub: Graph) -> GraphMorphism:
    """Restriction of ``m`` to a subgraph of its domain."""
    return GraphMorphism(
        sub,
        m.codomain,
        {v: m.vertex_map[v] for v in sub.vertices},
        {e.id: m.edge_map[e.id] for e in sub.edges},
    )


def validate_morphism(m: GraphMorphism) -> list[str]:
    problems = [f"domain: {p}" for p in validate_graph(m.domain)]
    problems += [f"codomain: {p}" for p in validate_graph(m.codomain)]
    for v in m.domain.vertices:
        if v not in m.vertex_map:
            problems.append(f"vertex {v!r} unmapped")
        elif m.vertex_map[v] not in m.codomain:
            problems.append(f"vertex {v!r} maps outside codomain")
    for e in m.domain.edges:
        if e.id not in m.edge_map:
            problems.append(f"edge {e.id!r} unmapped")
            continue
        img = m.edge_map[e.id]
        if not m.codomain.has_edge(img.edge) or img.sign not in (1, -1):
            problems.append(f"edge {e.id!r} maps to invalid {img!r}")
            continue
        if m.vertex_map.get(e.src) != m.codomain.tail(img) or m.vertex_map.get(e.dst) != m.codomain.head(img):
            problems.append(f"edge {e.id!r} does not commute with incidence")
    return problems


def is_immersion(m: GraphMorphism) -> bool:
    """True iff ``m`` is injective on edge-germs at every vertex."""
    m.check()
    for v in m.domain.vertices:
        images = [m.map_germ(se) for se in m.domain.germs(v)]
        if len(set(images)) != len(images):
            return False
    return True


def spanning_tree(g: Graph) -> frozenset:
    """Breadth-first spanning tree from the least vertex, edges in ID order."""
    g.check()
    if not g.vertices:
        return frozenset()
    root = g.vertices[0]
    seen = {root}
    tree = set()
    queue = deque([root])
    while queue:
        v = queue.popleft()
        for se in sorted(g.germs(v), key=lambda s: (sort_key(s.edge), -s.sign)):
            w = g.head(se)
            if w not in seen:
                seen.add(w)
                tree.add(se.edge)
                queue.append(w)
    if len(seen) != len(g.vertices):
        raise ValueError("spanning_tree needs a connected graph")
    return frozenset(tree)


# ---------------------------------------------------------------------------
# Stallings folding


def _as_path(base: Graph, word) -> list[SignedEdge]:
    from .words import free_reduce, parse_word

    if isinstance(word, str):
        path = [SignedEdge(c, s) for c, s in parse_word(word)]
    else:
        path = [se if isinstance(se, SignedEdge) else SignedEdge(*se) for se in word]
    for se in path:
        if not base.has_edge(se.edge) or se.sign not in (1, -1):
            raise ValueError(f"unreadable word: {word!r} (bad letter {se.edge!r})")
    for a, b in zip(path, path[1:]):
        if base.head(a) != base.tail(b):
            raise ValueError(f"unreadable word: {word!r} is not an edge path")
    return free_reduce(path)


def fold(base: Graph, words: Sequence, *, absolute: bool = False) -> GraphMorphism:
    """Stallings graph of the subgroup generated by ``words``.

    Words are letter strings (over a rose) or signed-edge paths, all closed
    at a common basepoint.  The result is an immersion whose domain is
    connected and core except possibly at the basepoint (vertex 0).  With
    ``absolute=True`` the basepoint tail is trimmed as well.
    """
    base.check()
    paths = [p for p in (_as_path(base, w) for w in words) if p]
    if paths:
        basepoint = base.tail(paths[0][0])
    elif base.vertices:
        basepoint = base.vertices[0]
    else:
        raise ValueError("cannot fold over an empty graph")
    for p in paths:
        if base.tail(p[0]) != basepoint or base.head(p[-1]) != basepoint:
            raise ValueError("every word must be a closed path at the basepoint")

    # petals: edges oriented so that each maps forward onto its label
    image = {0: basepoint}
    edges: dict[int, list] = {}
    nv = 1
    for p in paths:
        cur = 0
        for k, se in enumerate(p):
            if k == len(p) - 1:
                nxt = 0
            else:
                nxt = nv
                image[nxt] = base.head(se)
                nv += 1
            src, dst = (cur, nxt) if se.sign > 0 else (nxt, cur)
            edges[len(edges)] = [src, dst, se.edge]
            cur = nxt

    parent = {v: v for v in image}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a, b):
        a, b = find(a), find(b)
        if a != b:
            a, b = min(a, b), max(a, b)
            parent[b] = a

    while True:
        clash = None
        table: dict = {}
        for eid in sorted(edges):
            src, dst, lab = edges[eid]
            for key, other in (((find(src), sort_key(lab), 1), dst), ((find(dst), sort_key(lab), -1), src)):
                if key in table:
                    prev_eid, prev_other = table[key]
                    cand = (key, prev_eid, eid, prev_other, other)
                    if clash is None or (cand[0], cand[1], cand[2]) < (clash[0], clash[1], clash[2]):
                        clash = cand
                else:
                    table[key] = (eid, other)
        if clash is None:
            break
        _, keep_eid, drop_eid, a, b = clash
        union(a, b)
        del edges[drop_eid]

    vertices = sorted({find(v) for v in image})
    renum = {v: i for i, v in enumerate(vertices)}
    g = Graph(range(len(vertices)), [Edge(i, renum[find(s)], renum[find(d)]) for i, (s, d, _) in enumerate(edges.values())])
    labels = {i: lab for i, (_, _, lab) in enumerate(edges.values())}
    g = _trim(g, keep=frozenset() if absolute else frozenset([0]))
    g, vmap, emap = g.relabel()
    inv_v = {new: old for old, new in vmap.items()}
    inv_e = {new: old for old, new in emap.items()}
    m = GraphMorphism(
        g,
        base,
        {v: image[vertices[inv_v[v]]] for v in g.vertices},
        {e.id: SignedEdge(labels[inv_e[e.id]], 1) for e in g.edges},
    )
    assert is_immersion(m), "folding produced a non-immersion"
    return m
