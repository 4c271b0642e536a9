"""Cyclic words and immersed loops in graphs.

Letter syntax (over a rose whose edges are named by lowercase letters)::

    word    = { space | letter { inverse } } ;
    letter  = "a" .. "z" | "A" .. "Z" ;     (* uppercase = inverse *)
    inverse = "'" | "⁻¹" | "^-1" ;          (* each mark flips the sign again *)

so ``"aB"``, ``"ab'"`` and ``"a b⁻¹"`` all spell the same word.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Sequence, Union

from .graphs import Graph, GraphMorphism, SignedEdge, inclusion, is_core, sort_key

__all__ = [
    "parse_word",
    "format_word",
    "free_reduce",
    "cyclic_reduce",
    "least_rotation",
    "Loop",
    "MultiLoop",
    "validate_loop",
    "is_primitive",
    "loop_from_word",
    "image_subgraph",
    "traversal_counts",
]

_TOKEN = re.compile(r"\s+|([A-Za-z])((?:'|⁻¹|\^-1)*)")


def parse_word(text: str) -> list[tuple[str, int]]:
    """Parse a letter string into ``(letter, sign)`` pairs."""
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            raise ValueError(f"unreadable word {text!r} at position {pos}")
        pos = m.end()
        if m.group(1) is None:
            continue
        ch, marks = m.group(1), m.group(2)
        flips = len(re.findall(r"'|⁻¹|\^-1", marks)) + ch.isupper()
        out.append((ch.lower(), -1 if flips % 2 else 1))
    return out


def format_word(path: Iterable) -> str:
    """Inverse of :func:`parse_word` for single-letter edge names."""
    out = []
    for edge, sign in path:
        name = str(edge)
        out.append(name if sign > 0 else name.upper() if len(name) == 1 else name + "'")
    return "".join(out)


def free_reduce(path: Iterable) -> list[SignedEdge]:
    out: list[SignedEdge] = []
    for se in path:
        se = SignedEdge(*se)
        if out and out[-1] == se.inverse():
            out.pop()
        else:
            out.append(se)
    return out


def _cyclic_core(path: list) -> list:
    i, j = 0, len(path)
    while j - i >= 2 and path[i] == path[j - 1].inverse():
        i += 1
        j -= 1
    return path[i:j]


def least_rotation(path: Sequence) -> tuple:
    """Rotation that is least under (edge ID, forward-before-inverse)."""
    if not path:
        return ()
    keys = [(sort_key(se[0]), -se[1]) for se in path]
    n = len(keys)
    best = min(range(n), key=lambda k: keys[k:] + keys[:k])
    return tuple(path[best:]) + tuple(path[:best])


def cyclic_reduce(word: str | Sequence) -> str | tuple:
    """Freely and cyclically reduce, then rotate to the least rotation.

    Letter strings come back as letter strings; signed-edge sequences
    come back as tuples of :class:`SignedEdge`.
    """
    as_text = isinstance(word, str)
    path = free_reduce(parse_word(word) if as_text else word)
    path = list(least_rotation(_cyclic_core(path)))
    return format_word(path) if as_text else tuple(path)


# ---------------------------------------------------------------------------
# loops


def validate_loop(graph: Graph, path: Sequence[SignedEdge]) -> list[str]:
    problems = []
    m = len(path)
    if m == 0:
        return ["a loop needs at least one edge"]
    for i, se in enumerate(path):
        if not graph.has_edge(se.edge) or se.sign not in (1, -1):
            problems.append(f"step {i}: {se!r} is not a traversal of the graph")
    if problems:
        return problems
    for i in range(m):
        a, b = path[i], path[(i + 1) % m]
        if graph.head(a) != graph.tail(b):
            problems.append(f"steps {i} and {(i + 1) % m} are not composable")
        if b == a.inverse():
            problems.append(f"backtracking at step {(i + 1) % m}")
    return problems


@dataclass(frozen=True)
class Loop:
    """An immersed closed edge path, anchored at position 0."""

    graph: Graph
    path: tuple

    def __post_init__(self):
        path = tuple(se if isinstance(se, SignedEdge) else SignedEdge(*se) for se in self.path)
        object.__setattr__(self, "path", path)
        problems = validate_loop(self.graph, path)
        if problems:
            raise ValueError("invalid loop: " + "; ".join(problems))

    def __len__(self) -> int:
        return len(self.path)

    def vertex(self, i: int):
        """Vertex visited at position ``i`` (the start of step ``i``)."""
        return self.graph.tail(self.path[i % len(self.path)])

    @property
    def vertices(self) -> tuple:
        return tuple(self.graph.tail(se) for se in self.path)

    def word(self) -> str:
        return format_word(self.path)


@dataclass(frozen=True)
class MultiLoop:
    """A disjoint union of immersed circles in one graph.

    ``provenance`` optionally carries, per loop and position, where that
    point came from (the pullback records its base-loop position there).
    """

    graph: Graph
    loops: tuple = ()
    provenance: tuple | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "loops", tuple(self.loops))
        for lp in self.loops:
            if lp.graph != self.graph:
                raise ValueError("all loops of a MultiLoop must live in the same graph")

    @classmethod
    def of(cls, loop: "Loop | MultiLoop") -> "MultiLoop":
        return loop if isinstance(loop, MultiLoop) else cls(loop.graph, (loop,))

    def __len__(self) -> int:
        return len(self.loops)

    def traversals(self):
        """Yield ``((k, i), signed edge)`` for every step of every loop."""
        for k, lp in enumerate(self.loops):
            for i, se in enumerate(lp.path):
                yield (k, i), se

    def visits(self):
        """Yield ``((k, i), vertex)`` for every vertex visit."""
        for k, lp in enumerate(self.loops):
            for i, v in enumerate(lp.vertices):
                yield (k, i), v

    def step(self, ref) -> SignedEdge:
        k, i = ref
        return self.loops[k].path[i]

    def endpoints(self, ref) -> tuple:
        """Visits at the source end and the target end of the edge traversed at ``ref``.

        The answer is phrased relative to the edge's own orientation, not
        the direction of travel.
        """
        k, i = ref
        nxt = (k, (i + 1) % len(self.loops[k]))
        return ((k, i), nxt) if self.step(ref).sign > 0 else (nxt, (k, i))


def is_primitive(loop: Union[Loop, Sequence]) -> bool:
    """True iff the cyclic sequence is not a proper power."""
    seq = tuple(loop.path) if isinstance(loop, Loop) else tuple(loop)
    m = len(seq)
    if m == 0:
        return False
    for p in _prime_factors(m):
        d = m // p
        if seq == seq[:d] * p:
            return False
    return True


def _prime_factors(n: int) -> list[int]:
    out, p = [], 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        out.append(n)
    return out


def loop_from_word(base: Graph, word) -> Loop:
    """Loop spelling ``word``; the word must already be cyclically reduced."""
    if isinstance(word, str):
        path = [SignedEdge(c, s) for c, s in parse_word(word)]
    else:
        path = [se if isinstance(se, SignedEdge) else SignedEdge(*se) for se in word]
    if not path:
        raise ValueError("empty word")
    if list(_cyclic_core(free_reduce(path))) != path:
        raise ValueError(f"word {format_word(path)!r} is not cyclically reduced")
    return Loop(base, tuple(path))


def image_subgraph(loop: Loop | MultiLoop) -> tuple[Graph, GraphMorphism]:
    """Subgraph of cells traversed at least once, with its inclusion."""
    ml = MultiLoop.of(loop)
    edges = {se.edge for _, se in ml.traversals()}
    vertices = {v for _, v in ml.visits()}
    sub = ml.graph.subgraph(vertices, edges)
    if isinstance(loop, Loop):
        assert is_core(sub), "image of an immersed loop must be core"
    return sub, inclusion(sub, ml.graph)


def traversal_counts(loop: Loop | MultiLoop) -> dict:
    """Direction-insensitive traversal count of every edge of the graph."""
    ml = MultiLoop.of(loop)
    counts = {e: 0 for e in ml.graph.edge_ids}
    for _, se in ml.traversals():
        counts[se.edge] += 1
    return counts
