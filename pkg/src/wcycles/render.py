"""DOT export of graphs and SVG pictures of stackings."""

from __future__ import annotations

from xml.sax.saxutils import escape, quoteattr

from .graphs import Graph, GraphMorphism
from .stacking import Stacking


def _q(x) -> str:
    return '"' + str(x).replace('"', r"\"") + '"'


def to_dot(g: Graph | GraphMorphism, name: str = "G") -> str:
    """DOT source; a morphism is drawn as its domain with edges labelled by image."""
    m = g if isinstance(g, GraphMorphism) else None
    graph = m.domain if m else g
    lines = [f"digraph {name} {{"]
    for v in graph.vertices:
        label = f"{v}" if m is None else f"{v} ↦ {m.vertex_map[v]}"
        lines.append(f"  {_q(v)} [label={_q(label)}];")
    for e in graph.edges:
        if m is None:
            label = str(e.id)
        else:
            img = m.edge_map[e.id]
            label = f"{img.edge}" if img.sign > 0 else f"{img.edge}⁻¹"
        lines.append(f"  {_q(e.src)} -> {_q(e.dst)} [label={_q(label)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def stacking_svg(s: Stacking, *, width: int = 120, gap: int = 40, step: int = 24) -> str:
    """Stacked arcs over the edges of the graph laid side by side.

    Each edge gets a horizontal slot; a traversal is a polyline that
    leaves its source-end visit, runs flat at the height given by its rank
    in the edge order, and lands on its target-end visit.  Vertex visits
    are dots at the slot ends, at heights given by the vertex order.
    """
    ml = s.subject
    vrank = s.vertex_rank()
    edges = [e for e in ml.graph.edge_ids if s.edge_orders.get(e)]
    tallest = max([len(o) for o in s.vertex_orders.values()] + [len(o) for o in s.edge_orders.values()] + [1])
    height = (tallest + 1) * step + 2 * gap
    total_w = len(edges) * (width + gap) + gap

    def y(rank: int) -> int:
        # larger rank is drawn higher up; SVG y grows downwards
        return height - gap - rank * step

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{total_w}" height="{height}" '
        f'viewBox="0 0 {total_w} {height}">',
        '<g font-family="sans-serif" font-size="12">',
    ]
    for slot, e in enumerate(edges):
        x0 = gap + slot * (width + gap)
        x1 = x0 + width
        parts.append(f'<text x="{x0 + width // 2}" y="{height - 8}" text-anchor="middle">{escape(str(e))}</text>')
        for r, ref in enumerate(s.edge_orders[e]):
            a, b = ml.endpoints(ref)
            ya, yb, ye = y(vrank[a]), y(vrank[b]), y(r)
            pts = f"{x0},{ya} {x0 + 15},{ye} {x1 - 15},{ye} {x1},{yb}"
            parts.append(
                f'<polyline class="arc" data-edge={quoteattr(str(e))} data-ref="{ref[0]},{ref[1]}" '
                f'data-rank="{r}" data-y="{ye}" points="{pts}" fill="none" stroke="black"/>'
            )
            for x, yy in ((x0, ya), (x1, yb)):
                parts.append(f'<circle cx="{x}" cy="{yy}" r="2.5"/>')
    parts += ["</g>", "</svg>"]
    return "\n".join(parts) + "\n"
