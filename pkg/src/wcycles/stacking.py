"""Stackings of immersed circles and their construction by cyclic towers.

A stacking of ``L: S -> G`` is encoded by linear orders (bottom to top)
on the traversals of each edge and the visits to each vertex.  Two arcs
over the same edge never cross, so their vertical order is constant along
the edge and must agree with the order of their endpoints at both ends;
that agreement is the whole embedding condition.

Traversals and visits are both referenced by ``(loop index, position)``:
``(k, i)`` is step ``i`` of loop ``k`` as a traversal, and the vertex at
the start of that step as a visit.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd

from .graphs import (
    Graph,
    GraphMorphism,
    SignedEdge,
    euler_characteristic,
    is_immersion,
    rank,
    sort_key,
    spanning_tree,
)
from .pullback import PullbackResult, pullback
from .words import Loop, MultiLoop, image_subgraph, is_primitive, traversal_counts

__all__ = [
    "Stacking",
    "VisibleSet",
    "VisibleComponent",
    "TowerStage",
    "TowerTrace",
    "Lift",
    "validate_stacking",
    "visible_set",
    "count_open_arcs",
    "is_good",
    "reducibility_link",
    "pullback_stacking",
    "select_cocycle",
    "lift_to_cyclic_cover",
    "construct_stacking",
]

ABOVE, BELOW = "above", "below"


@dataclass(frozen=True)
class Stacking:
    subject: MultiLoop
    edge_orders: dict
    vertex_orders: dict

    def __post_init__(self):
        object.__setattr__(self, "subject", MultiLoop.of(self.subject))
        object.__setattr__(self, "edge_orders", {e: tuple(map(tuple, o)) for e, o in self.edge_orders.items()})
        object.__setattr__(self, "vertex_orders", {v: tuple(map(tuple, o)) for v, o in self.vertex_orders.items()})

    def edge_rank(self) -> dict:
        return {ref: r for order in self.edge_orders.values() for r, ref in enumerate(order)}

    def vertex_rank(self) -> dict:
        return {ref: r for order in self.vertex_orders.values() for r, ref in enumerate(order)}

    def check(self) -> None:
        problems = validate_stacking(self)
        if problems:
            raise ValueError("invalid stacking: " + "; ".join(problems[:5]))


def validate_stacking(s: Stacking) -> list[str]:
    """Report permutation and two-ended compatibility violations."""
    ml = s.subject
    problems = []
    want_e: dict = {e: set() for e in ml.graph.edge_ids}
    for ref, se in ml.traversals():
        want_e[se.edge].add(ref)
    want_v: dict = {v: set() for v in ml.graph.vertices}
    for ref, v in ml.visits():
        want_v[v].add(ref)

    for label, want, orders in (("edge", want_e, s.edge_orders), ("vertex", want_v, s.vertex_orders)):
        for cell in orders:
            if cell not in want:
                problems.append(f"order given for unknown {label} {cell!r}")
        for cell, refs in want.items():
            got = orders.get(cell, ())
            if len(set(got)) != len(got) or set(got) != refs:
                problems.append(f"{label} {cell!r}: order is not a permutation of its {len(refs)} cells")
    if problems:
        return problems

    vrank = s.vertex_rank()
    for e, order in s.edge_orders.items():
        ends = [ml.endpoints(ref) for ref in order]
        for side, name in ((0, "source"), (1, "target")):
            ranks = [vrank[pair[side]] for pair in ends]
            if any(a >= b for a, b in zip(ranks, ranks[1:])):
                problems.append(f"edge {e!r}: order not preserved at its {name} end")
    return problems


# ---------------------------------------------------------------------------
# visible sets


@dataclass(frozen=True)
class VisibleComponent:
    kind: str  # "circle" | "arc"
    loop: int
    cells: tuple  # ("e"|"v", k, i) in cyclic order


@dataclass(frozen=True)
class VisibleSet:
    side: str
    points: frozenset
    components: tuple

    @property
    def arcs(self) -> tuple:
        return tuple(c for c in self.components if c.kind == "arc")


def visible_set(s: Stacking, side: str = ABOVE) -> VisibleSet:
    """Cells seen from above (tops of their orders) or below (bottoms)."""
    if side not in (ABOVE, BELOW):
        raise ValueError(f"side must be {ABOVE!r} or {BELOW!r}")
    s.check()
    pick = -1 if side == ABOVE else 0
    points = {("e",) + o[pick] for o in s.edge_orders.values() if o}
    points |= {("v",) + o[pick] for o in s.vertex_orders.values() if o}

    components = []
    for k, lp in enumerate(s.subject.loops):
        cells = [c for i in range(len(lp)) for c in (("v", k, i), ("e", k, i))]
        inside = [c in points for c in cells]
        if all(inside):
            components.append(VisibleComponent("circle", k, tuple(cells)))
            continue
        # rotate so the walk starts just after a hidden cell
        first_out = inside.index(False)
        order = cells[first_out + 1:] + cells[: first_out + 1]
        run: list = []
        for c in order:
            if c in points:
                run.append(c)
            elif run:
                components.append(VisibleComponent("arc", k, tuple(run)))
                run = []
        if run:
            components.append(VisibleComponent("arc", k, tuple(run)))
    for comp in components:
        if comp.kind == "arc":
            assert comp.cells[0][0] == "e" and comp.cells[-1][0] == "e", "visible arcs must be open"
    return VisibleSet(side, frozenset(points), tuple(components))


def count_open_arcs(s: Stacking, side: str = ABOVE) -> int:
    return len(visible_set(s, side).arcs)


def is_good(s: Stacking) -> bool:
    """Every circle meets both the above and the below visible sets."""
    above = visible_set(s, ABOVE).points
    below = visible_set(s, BELOW).points
    for k in range(len(s.subject)):
        if not any(p[1] == k for p in above) or not any(p[1] == k for p in below):
            return False
    return True


def reducibility_link(s: Stacking) -> dict:
    """Check both halves of the stacking characterisation of reducibility."""
    above = visible_set(s, ABOVE)
    below = visible_set(s, BELOW)
    both = above.points & below.points
    counts = traversal_counts(s.subject)
    image, _ = image_subgraph(s.subject)
    surjective = len(image.edges) == len(s.subject.graph.edges)

    edge_in_both = any(p[0] == "e" for p in both)
    once = any(counts[e] == 1 for e in counts)
    reducible = any(c <= 1 for c in counts.values())
    good = is_good(s)
    full_circle = any(c.kind == "circle" for c in above.components + below.components)
    return {
        "surjective": surjective,
        "edge_in_above_and_below": edge_in_both,
        "edge_traversed_once": once,
        "iff_holds": edge_in_both == once,
        "good": good,
        "full_circle_visible": full_circle,
        "reducible": reducible,
        "implication_holds": (not (good and full_circle)) or reducible,
    }


# ---------------------------------------------------------------------------
# pulling a stacking back along an immersion


def pullback_stacking(s: Stacking, rho: GraphMorphism, p: PullbackResult | None = None) -> Stacking:
    """Stacking of the circular part of ``s.subject x rho``, ordered via sigma."""
    s.check()
    if p is None:
        p = pullback(rho, s.subject)
    if p.subject != s.subject:
        raise ValueError("pullback was not taken against the stacked loops")
    sub = p.circles
    erank = s.edge_rank()
    vrank = s.vertex_rank()

    edge_refs: dict = {e: [] for e in sub.graph.edge_ids}
    for ref, se in sub.traversals():
        edge_refs[se.edge].append(ref)
    vertex_refs: dict = {v: [] for v in sub.graph.vertices}
    for ref, v in sub.visits():
        vertex_refs[v].append(ref)

    def induced(refs, ranks):
        keyed = sorted((ranks[p.sigma(r)], r) for r in refs)
        keys = [k for k, _ in keyed]
        if len(set(keys)) != len(keys):
            raise ValueError("sigma-image collision: malformed circular part")
        return tuple(r for _, r in keyed)

    out = Stacking(
        sub,
        {e: induced(refs, erank) for e, refs in edge_refs.items() if refs},
        {v: induced(refs, vrank) for v, refs in vertex_refs.items() if refs},
    )
    out.check()
    if is_good(s):
        assert is_good(out), "pullback of a good stacking must be good"
    return out


# ---------------------------------------------------------------------------
# cyclic tower construction


def _signed_counts(g: Graph, loop: Loop, edges) -> list[int]:
    index = {e: i for i, e in enumerate(edges)}
    v = [0] * len(edges)
    for se in loop.path:
        if se.edge in index:
            v[index[se.edge]] += se.sign
    return v


def select_cocycle(g: Graph, loop: Loop) -> dict:
    """Primitive integer edge weights killing ``loop``'s homology class.

    Weights vanish on :func:`spanning_tree` and are nonzero on some
    non-tree edge, so the induced map to the integers is onto while the
    loop itself has total weight zero.
    """
    g.check()
    if rank(g) < 2:
        raise ValueError("select_cocycle needs a graph of rank >= 2")
    tree = spanning_tree(g)
    cotree = [e.id for e in g.edges if e.id not in tree]
    v = _signed_counts(g, loop, cotree)
    z = [0] * len(cotree)
    if not any(v):
        z[0] = 1
    else:
        i, j = next((i, j) for i in range(len(v)) for j in range(i + 1, len(v)) if v[i] or v[j])
        d = gcd(v[i], v[j])
        z[i], z[j] = v[j] // d, -v[i] // d
        lead = next(x for x in z if x)
        if lead < 0:
            z = [-x for x in z]
    weights = {e.id: 0 for e in g.edges}
    weights.update(zip(cotree, z))
    return weights


@dataclass(frozen=True, eq=False)
class Lift:
    graph: Graph  # finite piece of the cover actually visited; cells are (cell, level)
    loop: Loop
    projection: GraphMorphism
    levels: tuple  # level of each vertex visit
    edge_levels: tuple  # level at the source end of each traversed cover edge


def lift_to_cyclic_cover(g: Graph, loop: Loop, weights: dict) -> Lift:
    """Lift ``loop`` to the infinite cyclic cover defined by ``weights``.

    Cover vertex ``(v, L)`` sits at level ``L``; cover edge ``(e, L)``
    runs from ``(src e, L)`` to ``(dst e, L + weights[e])``.
    """
    m = len(loop)
    levels = [0] * m
    edge_levels = [0] * m
    path = []
    level = 0
    for i, se in enumerate(loop.path):
        levels[i] = level
        w = weights[se.edge]
        base_level = level if se.sign > 0 else level - w
        edge_levels[i] = base_level
        path.append(SignedEdge((se.edge, base_level), se.sign))
        level += se.sign * w
    if level != 0:
        raise ValueError(f"loop has nonzero total weight {level}")

    vertices = {(loop.vertex(i), levels[i]) for i in range(m)}
    edges = {}
    for se in path:
        e, lvl = se.edge
        ge = g.edge(e)
        edges[se.edge] = ((ge.src, lvl), (ge.dst, lvl + weights[e]))
    cover = Graph(vertices, [(eid, a, b) for eid, (a, b) in edges.items()])
    proj = GraphMorphism(
        cover,
        g,
        {v: v[0] for v in cover.vertices},
        {e.id: SignedEdge(e.id[0], 1) for e in cover.edges},
    )
    lifted = Loop(cover, tuple(path))
    assert is_immersion(proj), "cover projection must be an immersion"
    image, _ = image_subgraph(loop)
    if (len(cover.edges), len(cover.vertices)) == (len(image.edges), len(image.vertices)):
        raise ValueError("weights are trivial on the loop's image; the lift does not unfold it")
    return Lift(cover, lifted, proj, tuple(levels), tuple(edge_levels))


@dataclass(frozen=True, eq=False)
class TowerStage:
    graph: Graph  # image graph at this stage
    loop: Loop
    weights: dict | None  # None at the base case
    levels: tuple | None
    lifted: Loop | None

    @property
    def edge_count(self) -> int:
        return len(self.graph.edges)

    def to_dict(self) -> dict:
        from .serialize import id_to_json

        return {
            "edges": self.edge_count,
            "vertices": len(self.graph.vertices),
            "weights": None if self.weights is None else [[id_to_json(e), w] for e, w in self.weights.items()],
            "levels": None if self.levels is None else list(self.levels),
        }


@dataclass(frozen=True, eq=False)
class TowerTrace:
    stages: tuple = field(default=())

    @property
    def depth(self) -> int:
        return len(self.stages) - 1

    def check(self, word_length: int) -> None:
        sizes = [_size(st.graph) for st in self.stages]
        assert all(a < b for a, b in zip(sizes, sizes[1:])), f"image sizes not increasing: {sizes}"
        assert sizes[-1][0] <= word_length
        last = self.stages[-1].graph
        assert len(last.edges) == len(last.vertices), "final stage must be a circle"
        for st in self.stages[:-1]:
            total = sum(se.sign * st.weights[se.edge] for se in st.loop.path)
            assert total == 0

    def to_dict(self) -> dict:
        return {"depth": self.depth, "stages": [st.to_dict() for st in self.stages]}


def construct_stacking(loop: Loop) -> tuple[Stacking, TowerTrace]:
    """Stack a primitive immersed loop by climbing a maximal cyclic tower.

    Each stage restricts to the image graph; while that image has rank at
    least two, the loop is lifted to an infinite cyclic cover in which it
    still closes up.  Neither the edge nor the vertex count of the image
    can drop and they never both stay put, so after at most ``2 |loop|``
    stages the image is a circle covered once.  Orders are then pushed back down
    the tower, sorting by (level, order one stage up).
    """
    if not is_primitive(loop):
        raise ValueError(f"loop {loop.word()!r} is not primitive")
    m = len(loop)
    stages = []
    lifts = []
    current = loop
    while True:
        image, _ = image_subgraph(current)
        current = Loop(image, current.path)
        if rank(image) <= 1:
            assert euler_characteristic(image) == 0 and len(image.edges) == m, "primitive loop must cover its circle once"
            stages.append(TowerStage(image, current, None, None, None))
            break
        weights = select_cocycle(image, current)
        lift = lift_to_cyclic_cover(image, current, weights)
        assert _size(lift.graph) > _size(image), "lift must strictly enlarge the image"
        assert is_primitive(lift.loop)
        stages.append(TowerStage(image, current, weights, lift.levels, lift.loop))
        lifts.append(lift)
        # flatten nested (cell, level) IDs so they stay small
        flat, vmap, emap = lift.graph.relabel()
        current = Loop(flat, tuple(SignedEdge(emap[se.edge], se.sign) for se in lift.loop.path))
        assert len(stages) <= 2 * m, "tower deeper than the size bound allows"

    # base case: a circle traversed once, every order is a singleton
    erank = [0] * m
    vrank = [0] * m
    for st, lift in zip(reversed(stages[:-1]), reversed(lifts)):
        path = st.loop.path
        ekey = sorted(range(m), key=lambda i: (sort_key(path[i].edge), lift.edge_levels[i], erank[i]))
        vkey = sorted(range(m), key=lambda i: (sort_key(st.loop.vertex(i)), lift.levels[i], vrank[i]))
        erank = _ranks_within(ekey, lambda i: path[i].edge)
        vrank = _ranks_within(vkey, st.loop.vertex)

    edge_orders: dict = {}
    for i in sorted(range(m), key=lambda i: erank[i]):
        edge_orders.setdefault(loop.path[i].edge, []).append((0, i))
    vertex_orders: dict = {}
    for i in sorted(range(m), key=lambda i: vrank[i]):
        vertex_orders.setdefault(loop.vertex(i), []).append((0, i))
    s = Stacking(MultiLoop.of(loop), edge_orders, vertex_orders)
    trace = TowerTrace(tuple(stages))
    s.check()
    trace.check(m)
    return s, trace


def _size(g: Graph) -> tuple[int, int]:
    # A surjective immersion that is bijective on edges and vertices is an
    # isomorphism, so each lift grows this pair lexicographically.
    return (len(g.edges), len(g.vertices))


def _ranks_within(ordered, cell_of) -> list[int]:
    ranks = [0] * len(ordered)
    seen: dict = {}
    for i in ordered:
        c = cell_of(i)
        ranks[i] = seen.get(c, 0)
        seen[c] = ranks[i] + 1
    return ranks
