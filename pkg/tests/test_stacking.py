import random
import re

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import all_valid_stackings
from wcycles.graphs import Edge, Graph, GraphMorphism, SignedEdge, circle_graph, euler_characteristic, fold, identity, rose
from wcycles.harness import random_primitive_word
from wcycles.pullback import pullback
from wcycles.render import stacking_svg
from wcycles.stacking import (
    Stacking,
    construct_stacking,
    count_open_arcs,
    is_good,
    lift_to_cyclic_cover,
    pullback_stacking,
    reducibility_link,
    select_cocycle,
    validate_stacking,
    visible_set,
)
from wcycles.words import Loop, MultiLoop, image_subgraph, loop_from_word


def aabbb():
    return loop_from_word(rose(2), "aabbb")


def a_on_circle():
    return loop_from_word(circle_graph(1), [SignedEdge(0, 1)])


def three_stacked_circles():
    lp = a_on_circle()
    ml = MultiLoop(lp.graph, (lp, lp, lp))
    order = ((0, 0), (1, 0), (2, 0))
    return Stacking(ml, {0: order}, {0: order})


# --- validation --------------------------------------------------------------


def test_single_traversal_stacking_is_valid():
    lp = loop_from_word(rose(2), "ab")
    s = Stacking(lp, {"a": [(0, 0)], "b": [(0, 1)]}, {0: [(0, 0), (0, 1)]})
    assert validate_stacking(s) == []


def test_corrupted_vertex_order_is_reported():
    s, _ = construct_stacking(aabbb())
    assert validate_stacking(s) == []
    order = list(s.vertex_orders[0])
    i, j = order.index((0, 0)), order.index((0, 1))
    order[i], order[j] = order[j], order[i]
    bad = Stacking(s.subject, s.edge_orders, {0: order})
    problems = validate_stacking(bad)
    assert problems and any("'a'" in p for p in problems)


def test_missing_cells_are_reported():
    s, _ = construct_stacking(aabbb())
    bad = Stacking(s.subject, {"a": s.edge_orders["a"][:1], "b": s.edge_orders["b"]}, s.vertex_orders)
    assert any("permutation" in p for p in validate_stacking(bad))


# --- the aabbb worked example ------------------------------------------------


def test_aabbb_constructed_orders():
    s, trace = construct_stacking(aabbb())
    assert trace.depth == 1
    assert s.edge_orders["a"] == ((0, 0), (0, 1))
    assert s.edge_orders["b"] == ((0, 4), (0, 3), (0, 2))
    assert [i for _, i in s.vertex_orders[0]] == [0, 4, 1, 3, 2]


def test_aabbb_visible_sets():
    s, _ = construct_stacking(aabbb())
    above, below = visible_set(s, "above"), visible_set(s, "below")
    assert [c.cells for c in above.components] == [(("e", 0, 1), ("v", 0, 2), ("e", 0, 2))]
    assert [c.cells for c in below.components] == [(("e", 0, 4), ("v", 0, 0), ("e", 0, 0))]
    assert count_open_arcs(s, "above") == count_open_arcs(s, "below") == 1
    assert is_good(s)


def test_trivial_circle_is_fully_visible():
    s, trace = construct_stacking(a_on_circle())
    assert trace.depth == 0
    vis = visible_set(s, "above")
    assert [c.kind for c in vis.components] == ["circle"]
    assert count_open_arcs(s) == 0


def test_three_stacked_circles_is_not_good():
    s = three_stacked_circles()
    assert validate_stacking(s) == []
    assert not is_good(s)
    link = reducibility_link(s)
    assert link["full_circle_visible"] and not link["reducible"]
    assert link["implication_holds"] and link["iff_holds"]


def test_reducibility_link_examples():
    lp = loop_from_word(rose(2), "ab")
    for s in all_valid_stackings(MultiLoop.of(lp)):
        link = reducibility_link(s)
        assert link["edge_in_above_and_below"] and link["edge_traversed_once"]
    link = reducibility_link(construct_stacking(aabbb())[0])
    assert not link["edge_in_above_and_below"] and not link["edge_traversed_once"]


def test_commutator_every_stacking_has_one_arc():
    lp = loop_from_word(rose(2), "abAB")
    stackings = list(all_valid_stackings(MultiLoop.of(lp)))
    assert stackings
    for s in stackings:
        assert count_open_arcs(s, "above") == count_open_arcs(s, "below") == 1
    s, trace = construct_stacking(lp)
    assert trace.depth >= 1 and is_good(s) and count_open_arcs(s) == 1
    assert any(t.edge_orders == s.edge_orders and t.vertex_orders == s.vertex_orders for t in stackings)


# --- cocycles and lifts ------------------------------------------------------


@pytest.mark.parametrize(
    "rank, word, weights",
    [(2, "aabbb", {"a": 3, "b": -2}), (2, "abAB", {"a": 1, "b": 0}), (3, "abc", {"a": 1, "b": -1, "c": 0})],
)
def test_select_cocycle_examples(rank, word, weights):
    assert select_cocycle(rose(rank), loop_from_word(rose(rank), word)) == weights


def test_select_cocycle_needs_rank_two():
    with pytest.raises(ValueError):
        select_cocycle(rose(1), loop_from_word(rose(1), "a"))


def test_lift_aabbb():
    lift = lift_to_cyclic_cover(rose(2), aabbb(), {"a": 3, "b": -2})
    assert lift.levels == (0, 3, 6, 4, 2)
    assert len(lift.graph.edges) == len(lift.graph.vertices) == 5


def test_lift_commutator():
    lift = lift_to_cyclic_cover(rose(2), loop_from_word(rose(2), "abAB"), {"a": 1, "b": 0})
    assert lift.levels == (0, 1, 1, 0)
    # a is shared by both ends of the loop; only b splits into two levels
    assert sorted(e.id for e in lift.graph.edges) == [("a", 0), ("b", 0), ("b", 1)]


def test_lift_rejects_bad_weights():
    lp = loop_from_word(rose(3), "ab")
    with pytest.raises(ValueError, match="nonzero total"):
        lift_to_cyclic_cover(rose(3), lp, {"a": 1, "b": 0, "c": 0})
    with pytest.raises(ValueError, match="trivial"):
        lift_to_cyclic_cover(rose(3), lp, {"a": 0, "b": 0, "c": 1})


def test_construct_rejects_proper_powers():
    with pytest.raises(ValueError, match="primitive"):
        construct_stacking(loop_from_word(rose(2), "abab"))


# --- pullback stackings ------------------------------------------------------


def test_pullback_along_identity_is_the_same_stacking():
    s, _ = construct_stacking(aabbb())
    t = pullback_stacking(s, identity(rose(2)))
    assert t.edge_orders == s.edge_orders and t.vertex_orders == s.vertex_orders


def test_pullback_to_double_cover():
    cover = Graph([0, 1], [Edge("a0", 0, 1), Edge("a1", 1, 0), Edge("b0", 0, 0), Edge("b1", 1, 1)])
    rho = GraphMorphism(cover, rose(2), {0: 0, 1: 0}, {e: SignedEdge(e[0], 1) for e in ("a0", "a1", "b0", "b1")})
    s, _ = construct_stacking(aabbb())
    p = pullback(rho, s.subject)
    assert len(p.circles) == 2 and p.degrees == (1, 1)
    t = pullback_stacking(s, rho, p)
    assert validate_stacking(t) == [] and is_good(t)


def test_pullback_to_stallings_graph_has_singleton_orders():
    rho = fold(rose(2), ["aa", "b"])
    s, _ = construct_stacking(loop_from_word(rose(2), "a"))
    t = pullback_stacking(s, rho)
    assert validate_stacking(t) == []
    assert all(len(o) == 1 for o in t.edge_orders.values())


# --- properties --------------------------------------------------------------


def primitive_loops(max_len):
    return st.tuples(st.integers(0, 10**9), st.integers(2, 3)).map(
        lambda t: loop_from_word(rose(t[1]), random_primitive_word(random.Random(t[0]), t[1], max_len))
    )


@settings(max_examples=120, deadline=None)
@given(primitive_loops(30))
def test_constructed_stacking_invariants(lp):
    s, trace = construct_stacking(lp)
    assert validate_stacking(s) == []
    assert is_good(s)
    image, _ = image_subgraph(lp)
    assert count_open_arcs(s, "above") == count_open_arcs(s, "below") == -euler_characteristic(image)
    assert trace.depth <= len(lp)
    link = reducibility_link(s)
    assert link["iff_holds"] and link["implication_holds"]


@settings(max_examples=60, deadline=None)
@given(primitive_loops(6))
def test_every_valid_stacking_of_a_short_word(lp):
    image, _ = image_subgraph(lp)
    target = -euler_characteristic(image)
    for s in all_valid_stackings(MultiLoop.of(lp)):
        assert validate_stacking(s) == []
        assert is_good(s)
        assert count_open_arcs(s, "above") == count_open_arcs(s, "below") == target
        for side in ("above", "below"):
            for comp in visible_set(s, side).components:
                assert comp.kind in ("circle", "arc")
        link = reducibility_link(s)
        assert link["iff_holds"] and link["implication_holds"]


def test_oracle_agrees_with_validator_on_all_orders():
    # every pair of vertex and edge permutations, validator vs oracle
    import itertools

    lp = loop_from_word(rose(2), "aab")
    ml = MultiLoop.of(lp)
    accepted = {
        (tuple(s.edge_orders["a"]), tuple(s.vertex_orders[0])) for s in all_valid_stackings(ml)
    }
    refs = [(0, i) for i in range(3)]
    for vo in itertools.permutations(refs):
        for ao in itertools.permutations([(0, 0), (0, 1)]):
            s = Stacking(ml, {"a": ao, "b": [(0, 2)]}, {0: vo})
            assert (validate_stacking(s) == []) == ((ao, vo) in accepted)


@settings(max_examples=60, deadline=None)
@given(primitive_loops(20))
def test_svg_heights_follow_edge_order(lp):
    s, _ = construct_stacking(lp)
    svg = stacking_svg(s)
    arcs = re.findall(r'data-edge="([^"]*)" data-ref="[^"]*" data-rank="(\d+)" data-y="(\d+)"', svg)
    assert len(arcs) == len(lp)
    by_edge = {}
    for e, r, y in arcs:
        by_edge.setdefault(e, []).append((int(r), int(y)))
    for pts in by_edge.values():
        pts.sort()
        ys = [y for _, y in pts]
        assert all(a > b for a, b in zip(ys, ys[1:]))  # higher rank, smaller SVG y


def test_svg_of_aabbb_has_five_arcs():
    svg = stacking_svg(construct_stacking(aabbb())[0])
    assert svg.count('data-edge="a"') == 2 and svg.count('data-edge="b"') == 3


def test_loop_in_lifted_graph_is_a_loop():
    lift = lift_to_cyclic_cover(rose(2), aabbb(), {"a": 3, "b": -2})
    assert isinstance(lift.loop, Loop) and lift.projection.map_path(lift.loop.path) == aabbb().path
