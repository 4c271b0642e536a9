"""Verifiers for the degree bound, the W-cycles bound and nonpositive immersions.

Each verifier checks its hypotheses first and raises :class:`HypothesisError`
when they fail; a returned :class:`Verdict` with ``passed=False`` means a
theorem was contradicted, which can only be a bug in this package.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .graphs import (
    Graph,
    GraphMorphism,
    connected_components,
    euler_characteristic,
    is_connected,
    is_core,
    is_immersion,
    is_tree,
    restrict,
    sort_key,
)
from .pullback import covering_degree, is_reducible, pullback
from .serialize import id_to_json
from .words import Loop, image_subgraph, is_primitive

__all__ = [
    "HypothesisError",
    "Verdict",
    "OneRelatorComplex",
    "verify_main_theorem",
    "wcycles_check",
    "npi_check",
    "replay_certificate",
    "genus_lower_bound",
    "GenusBound",
]


class HypothesisError(ValueError):
    """The instance does not satisfy a theorem's hypotheses."""


@dataclass
class Verdict:
    instance: str
    branch: str  # "reducible" | "bound_holds" | "vacuous" | "violated"
    passed: bool
    numbers: dict = field(default_factory=dict)
    witness: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "instance": self.instance,
            "branch": self.branch,
            "passed": self.passed,
            "numbers": self.numbers,
            "witness": self.witness,
        }


def _check_hypotheses(rho: GraphMorphism, w: Loop) -> None:
    try:
        rho.check()
    except ValueError as exc:
        raise HypothesisError(str(exc)) from None
    if not is_immersion(rho):
        raise HypothesisError("rho is not an immersion")
    g = rho.domain
    if not g.vertices or not is_connected(g) or not is_core(g):
        raise HypothesisError("the domain of rho must be a finite connected core graph")
    if w.graph != rho.codomain:
        raise HypothesisError("the loop does not live in the codomain of rho")
    if not is_primitive(w):
        raise HypothesisError(f"loop {w.word()!r} is not primitive")


def _describe(rho: GraphMorphism, w: Loop) -> str:
    g = rho.domain
    return f"Γ′(|V|={len(g.vertices)}, |E|={len(g.edges)}) over {w.word()}"


def verify_main_theorem(rho: GraphMorphism, w: Loop) -> Verdict:
    """Either the pullback of ``w`` to ``Γ′`` is reducible or deg σ ≤ -χ(Γ′)."""
    _check_hypotheses(rho, w)
    neg_chi = -euler_characteristic(rho.domain)
    p = pullback(rho, w)
    circles = p.circles
    numbers = {
        "deg_sigma": covering_degree(p),
        "neg_chi": neg_chi,
        "circles": len(circles),
        "rank": 1 + neg_chi,
        "segments": p.segments,
    }
    if not circles.loops:
        return Verdict(_describe(rho, w), "vacuous", True, numbers)
    assert numbers["deg_sigma"] == sum(p.degrees)
    witness = {"degrees": list(p.degrees)}
    reducible, edge = is_reducible(circles)
    if reducible:
        witness["edge"] = id_to_json(edge)
        return Verdict(_describe(rho, w), "reducible", True, numbers, witness)
    image, _ = image_subgraph(circles)
    numbers["neg_chi_image"] = -euler_characteristic(image)
    ok = numbers["deg_sigma"] <= numbers["neg_chi_image"] <= neg_chi
    return Verdict(_describe(rho, w), "bound_holds" if ok else "violated", ok, numbers, witness)


def wcycles_check(rho: GraphMorphism, w: Loop) -> Verdict:
    """Number of circular components is at most rank(Γ′)."""
    _check_hypotheses(rho, w)
    p = pullback(rho, w)
    rk = 1 - euler_characteristic(rho.domain)
    n = len(p.circles)
    numbers = {"circles": n, "rank": rk, "deg_sigma": covering_degree(p)}
    if n == 0:
        return Verdict(_describe(rho, w), "vacuous", True, numbers)
    ok = n <= rk
    return Verdict(_describe(rho, w), "bound_holds" if ok else "violated", ok, numbers, {"degrees": list(p.degrees)})


# ---------------------------------------------------------------------------
# one-relator complexes


def _cyclic_forms(path) -> set:
    path = tuple(path)
    inv = tuple(se.inverse() for se in reversed(path))
    n = len(path)
    return {p[k:] + p[:k] for p in (path, inv) for k in range(n)}


@dataclass(frozen=True, eq=False)
class OneRelatorComplex:
    """A 2-complex Y whose 2-cells are attached along lifts of the relator.

    ``rho`` is the immersion of the 1-skeleton into the relator complex's
    1-skeleton and ``relator`` the attaching loop there.
    """

    graph: Graph
    attachments: tuple
    rho: GraphMorphism
    relator: Loop

    def __post_init__(self):
        object.__setattr__(self, "attachments", tuple(self.attachments))
        problems = self.problems()
        if problems:
            raise HypothesisError("malformed complex: " + "; ".join(problems))

    def problems(self) -> list[str]:
        out = []
        if self.rho.domain != self.graph:
            out.append("rho is not defined on the 1-skeleton")
            return out
        if not is_immersion(self.rho):
            out.append("rho is not an immersion")
        if self.relator.graph != self.rho.codomain:
            out.append("relator does not live in the codomain of rho")
        if not is_primitive(self.relator):
            out.append("relator is not primitive")
        targets = _cyclic_forms(self.relator.path)
        seen: set = set()
        for n, a in enumerate(self.attachments):
            if a.graph != self.graph:
                out.append(f"attachment {n} is not a loop in the 1-skeleton")
                continue
            if self.rho.map_path(a.path) not in targets:
                out.append(f"attachment {n} does not lie over the relator")
            forms = _cyclic_forms(a.path)
            if forms & seen:
                out.append(f"attachment {n} repeats an earlier attachment")
            seen |= forms
        return out

    def euler_characteristic(self) -> int:
        return euler_characteristic(self.graph) + len(self.attachments)

    @classmethod
    def from_lifts(cls, rho: GraphMorphism, relator: Loop, limit: int | None = None) -> "OneRelatorComplex":
        """Attach a 2-cell along every degree-one lift of the relator."""
        p = pullback(rho, relator)
        lifts = [lp for lp, d in zip(p.circles.loops, p.degrees) if d == 1]
        return cls(rho.domain, tuple(lifts[:limit]), rho, relator)


def _counts(graph: Graph, paths) -> dict:
    counts = {e: 0 for e in graph.edge_ids}
    for path in paths:
        for se in path:
            counts[se.edge] += 1
    return counts


def _npi(graph: Graph, paths: list, rho: GraphMorphism, relator: Loop) -> dict:
    chi = len(graph.vertices) - len(graph.edges) + len(paths)
    if not paths:
        tree = is_tree(graph)
        return {"rule": "graph", "chi": chi, "trivial_pi1": tree,
                "vertices": len(graph.vertices), "edges": len(graph.edges)}
    counts = _counts(graph, paths)
    by_key = sorted(graph.edge_ids, key=sort_key)
    once = [e for e in by_key if counts[e] == 1]
    if once:
        e = once[0]
        idx = next(n for n, p in enumerate(paths) if any(se.edge == e for se in p))
        rest = paths[:idx] + paths[idx + 1:]
        child = _npi(graph.without_edges([e]), rest, rho, relator)
        return {"rule": "collapse", "edge": id_to_json(e), "attachment": idx, "chi": child["chi"],
                "trivial_pi1": child["trivial_pi1"], "child": child}
    zero = [e for e in by_key if counts[e] == 0]
    if zero:
        e = zero[0]
        smaller = graph.without_edges([e])
        children = []
        for vs, es in connected_components(smaller):
            sub = smaller.subgraph(vs, es)
            sub_paths = [p for p in paths if p[0].edge in set(es)]
            children.append(_npi(sub, sub_paths, rho, relator))
        total = sum(c["chi"] for c in children) - 1
        trivial = len(children) == 2 and all(c["trivial_pi1"] for c in children)
        return {"rule": "delete_edge", "edge": id_to_json(e), "chi": total,
                "trivial_pi1": trivial, "children": children}
    # every edge traversed at least twice: the degree bound applies
    sub_rho = restrict(rho, graph)
    verdict = verify_main_theorem(sub_rho, relator)
    d = verdict.numbers["deg_sigma"]
    neg = verdict.numbers["neg_chi"]
    ok = verdict.branch == "bound_holds" and len(paths) <= d <= neg
    return {"rule": "theorem", "chi": chi, "trivial_pi1": False, "attachments": len(paths),
            "deg_sigma": d, "neg_chi_graph": neg, "vertices": len(graph.vertices),
            "edges": len(graph.edges), "bound_ok": ok}


def npi_check(y: OneRelatorComplex) -> Verdict:
    """Certify χ(Y) ≤ 0 or trivial π₁ by the collapse / degree-bound recursion."""
    if not y.graph.vertices or not is_connected(y.graph):
        raise HypothesisError("Y must be compact and connected")
    cert = _npi(y.graph, [a.path for a in y.attachments], y.rho, y.relator)
    chi = y.euler_characteristic()
    replayed = replay_certificate(y, cert)
    ok = replayed == chi == cert["chi"] and (chi <= 0 or cert["trivial_pi1"]) and _bounds_ok(cert)
    branch = "trivial_pi1" if cert["trivial_pi1"] else ("chi_nonpositive" if ok else "violated")
    return Verdict(
        f"Y(|V|={len(y.graph.vertices)}, |E|={len(y.graph.edges)}, 2-cells={len(y.attachments)})",
        branch, ok, {"chi": chi, "attachments": len(y.attachments)}, {"certificate": cert},
    )


def _bounds_ok(cert: dict) -> bool:
    if cert["rule"] == "theorem":
        return cert["bound_ok"]
    kids = cert.get("children") or ([cert["child"]] if "child" in cert else [])
    return all(_bounds_ok(c) for c in kids)


def replay_certificate(y: OneRelatorComplex, cert: dict) -> int:
    """Re-run a certificate against ``y`` from raw cell counts.

    Every step is re-validated and every claimed χ is recomputed; returns
    the recomputed χ(Y) or raises ``ValueError`` on any mismatch.
    """
    from .serialize import id_from_json

    def run(graph: Graph, paths: list, node: dict) -> int:
        direct = len(graph.vertices) - len(graph.edges) + len(paths)
        rule = node["rule"]
        counts = _counts(graph, paths)
        if rule == "graph":
            if paths:
                raise ValueError("leaf claims no 2-cells")
            if node["trivial_pi1"] and len(graph.edges) != len(graph.vertices) - 1:
                raise ValueError("claimed tree is not a tree")
            got = direct
        elif rule == "collapse":
            e = id_from_json(node["edge"])
            if counts.get(e) != 1 or not any(se.edge == e for se in paths[node["attachment"]]):
                raise ValueError(f"edge {e!r} is not a free face of attachment {node['attachment']}")
            rest = paths[: node["attachment"]] + paths[node["attachment"] + 1:]
            got = run(graph.without_edges([e]), rest, node["child"])
        elif rule == "delete_edge":
            e = id_from_json(node["edge"])
            if counts.get(e) != 0:
                raise ValueError(f"deleted edge {e!r} is traversed")
            smaller = graph.without_edges([e])
            comps = connected_components(smaller)
            if len(comps) != len(node["children"]):
                raise ValueError("component count mismatch")
            got = -1
            for (vs, es), child in zip(comps, node["children"]):
                sub = smaller.subgraph(vs, es)
                got += run(sub, [p for p in paths if p[0].edge in set(es)], child)
        elif rule == "theorem":
            if any(c < 2 for c in counts.values()):
                raise ValueError("degree-bound leaf has an edge traversed fewer than twice")
            if len(paths) > node["neg_chi_graph"] or -(len(graph.vertices) - len(graph.edges)) != node["neg_chi_graph"]:
                raise ValueError("degree-bound leaf numbers do not match")
            got = direct
        else:
            raise ValueError(f"unknown rule {rule!r}")
        if got != node["chi"] or got != direct:
            raise ValueError(f"χ mismatch at {rule}: claimed {node['chi']}, replayed {got}, direct {direct}")
        return got

    return run(y.graph, [a.path for a in y.attachments], cert)


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GenusBound:
    value: Fraction
    chain: tuple


def genus_lower_bound(w: Loop, m: int) -> GenusBound:
    """Lower bound m/2 on the genus of the m-th power of a primitive loop."""
    if not is_primitive(w):
        raise HypothesisError(f"loop {w.word()!r} is not primitive")
    if m < 1:
        raise HypothesisError("m must be a positive integer")
    chain = (
        f"m = {m} ≤ -χ(Γ′) (degree bound, Γ′ irreducible)",
        "-χ(Γ′) ≤ -χ(Σ) = 2g - 1 (π₁-surjection from the once-holed surface)",
        f"g ≥ (m + 1)/2 ≥ {Fraction(m, 2)}",
    )
    return GenusBound(Fraction(m, 2), chain)
