"""JSON encodings.  Tuple IDs become JSON arrays and come back as tuples."""

from __future__ import annotations

import json

from .graphs import Edge, Graph, GraphMorphism, SignedEdge
from .words import Loop, MultiLoop

__all__ = [
    "id_to_json",
    "id_from_json",
    "graph_to_json",
    "graph_from_json",
    "morphism_to_json",
    "morphism_from_json",
    "loop_to_json",
    "loop_from_json",
    "stacking_to_json",
    "stacking_from_json",
    "dumps",
]


def id_to_json(x):
    if isinstance(x, tuple):
        return [id_to_json(y) for y in x]
    return x


def id_from_json(x):
    if isinstance(x, list):
        return tuple(id_from_json(y) for y in x)
    if isinstance(x, (int, str)) and not isinstance(x, bool):
        return x
    raise ValueError(f"bad cell id {x!r}")


def _key(x) -> str:
    # JSON object keys are strings; non-string IDs are JSON-encoded
    return x if isinstance(x, str) else json.dumps(id_to_json(x))


def _unkey(k: str):
    try:
        return id_from_json(json.loads(k))
    except (ValueError, json.JSONDecodeError):
        return k


def graph_to_json(g: Graph) -> dict:
    return {
        "vertices": [id_to_json(v) for v in g.vertices],
        "edges": [{"id": id_to_json(e.id), "src": id_to_json(e.src), "dst": id_to_json(e.dst)} for e in g.edges],
    }


def graph_from_json(data) -> Graph:
    try:
        return Graph(
            [id_from_json(v) for v in data["vertices"]],
            [Edge(id_from_json(e["id"]), id_from_json(e["src"]), id_from_json(e["dst"])) for e in data["edges"]],
        )
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed graph JSON: {exc}") from exc


def _signed_to_json(se: SignedEdge) -> dict:
    return {"edge": id_to_json(se.edge), "dir": se.sign}


def _signed_from_json(d) -> SignedEdge:
    if d.get("dir") not in (1, -1):
        raise ValueError(f"bad direction in {d!r}")
    return SignedEdge(id_from_json(d["edge"]), d["dir"])


def morphism_to_json(m: GraphMorphism) -> dict:
    return {
        "domain": graph_to_json(m.domain),
        "codomain": graph_to_json(m.codomain),
        "vertex_map": [[id_to_json(v), id_to_json(w)] for v, w in m.vertex_map.items()],
        "edge_map": [[id_to_json(e), _signed_to_json(se)] for e, se in m.edge_map.items()],
    }


def morphism_from_json(data) -> GraphMorphism:
    try:
        m = GraphMorphism(
            graph_from_json(data["domain"]),
            graph_from_json(data["codomain"]),
            {id_from_json(v): id_from_json(w) for v, w in data["vertex_map"]},
            {id_from_json(e): _signed_from_json(se) for e, se in data["edge_map"]},
        )
    except (KeyError, TypeError, AttributeError) as exc:
        raise ValueError(f"malformed morphism JSON: {exc}") from exc
    m.check()
    return m


def loop_to_json(loop: Loop) -> list:
    return [_signed_to_json(se) for se in loop.path]


def loop_from_json(graph: Graph, data) -> Loop:
    try:
        return Loop(graph, tuple(_signed_from_json(d) for d in data))
    except (KeyError, TypeError, AttributeError) as exc:
        raise ValueError(f"malformed loop JSON: {exc}") from exc


def stacking_to_json(s) -> dict:
    return {
        "edge_orders": {_key(e): [list(r) for r in o] for e, o in s.edge_orders.items()},
        "vertex_orders": {_key(v): [list(r) for r in o] for v, o in s.vertex_orders.items()},
    }


def stacking_from_json(subject: Loop | MultiLoop, data):
    from .stacking import Stacking

    return Stacking(
        MultiLoop.of(subject),
        {_unkey(e): [tuple(r) for r in o] for e, o in data["edge_orders"].items()},
        {_unkey(v): [tuple(r) for r in o] for v, o in data["vertex_orders"].items()},
    )


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False)
