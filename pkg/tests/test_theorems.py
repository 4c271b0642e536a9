import copy
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wcycles.graphs import Edge, Graph, GraphMorphism, SignedEdge, circle_graph, fold, identity, rose
from wcycles.harness import random_instance
from wcycles.theorems import (
    HypothesisError,
    OneRelatorComplex,
    genus_lower_bound,
    npi_check,
    replay_certificate,
    verify_main_theorem,
    wcycles_check,
)
from wcycles.words import loop_from_word


def b_loop():
    g = Graph([0], [Edge("y", 0, 0)])
    return GraphMorphism(g, rose(2), {0: 0}, {"y": SignedEdge("b", 1)})


# --- degree bound ------------------------------------------------------------


def test_identity_commutator_meets_the_bound():
    v = verify_main_theorem(identity(rose(2)), loop_from_word(rose(2), "abAB"))
    assert v.passed and v.branch == "bound_holds"
    assert v.numbers["deg_sigma"] == 1 == v.numbers["neg_chi"]


def test_stallings_a2_b_is_reducible():
    v = verify_main_theorem(fold(rose(2), ["aa", "b"]), loop_from_word(rose(2), "a"))
    assert v.passed and v.branch == "reducible"
    # the bound itself fails here; it is only claimed for irreducible pullbacks
    assert v.numbers["deg_sigma"] == 2 > v.numbers["neg_chi"] == 1


def test_b_loop_is_vacuous():
    v = verify_main_theorem(b_loop(), loop_from_word(rose(2), "a"))
    assert v.passed and v.branch == "vacuous"


def test_hypotheses_are_input_errors():
    with pytest.raises(HypothesisError):
        verify_main_theorem(identity(rose(2)), loop_from_word(rose(2), "abab"))
    tail = fold(rose(2), ["abA"])  # basepoint tail: not core
    with pytest.raises(HypothesisError):
        wcycles_check(tail, loop_from_word(rose(2), "b"))
    dom = Graph([0], [Edge("x", 0, 0), Edge("y", 0, 0)])
    folded = GraphMorphism(dom, rose(2), {0: 0}, {"x": SignedEdge("a", 1), "y": SignedEdge("a", 1)})
    with pytest.raises(HypothesisError):
        verify_main_theorem(folded, loop_from_word(rose(2), "a"))


# --- W-cycles bound ----------------------------------------------------------


@pytest.mark.parametrize("word", ["a", "ab", "aabbb", "abAB"])
def test_wcycles_identity(word):
    v = wcycles_check(identity(rose(2)), loop_from_word(rose(2), word))
    assert v.passed and v.numbers["circles"] == 1 <= v.numbers["rank"]


def test_wcycles_stallings():
    v = wcycles_check(fold(rose(2), ["aa", "b"]), loop_from_word(rose(2), "a"))
    assert v.passed and v.numbers == {"circles": 1, "rank": 2, "deg_sigma": 2}


def test_wcycles_rank_three_subgroup():
    rho = fold(rose(2), ["aa", "bb", "abab"], absolute=True)
    v = wcycles_check(rho, loop_from_word(rose(2), "ab"))
    assert v.numbers["rank"] == 3
    assert v.passed and v.numbers["circles"] <= 3


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10**6))
def test_theorems_hold_on_random_instances(index):
    inst = random_instance("prop", index)
    main = verify_main_theorem(inst.rho, inst.loop)
    assert main.passed
    if main.branch == "bound_holds":
        n = main.numbers
        assert n["deg_sigma"] <= n["neg_chi_image"] <= n["neg_chi"]
    assert wcycles_check(inst.rho, inst.loop).passed


# --- nonpositive immersions --------------------------------------------------


def test_npi_commutator_uses_the_degree_bound():
    w = loop_from_word(rose(2), "abAB")
    y = OneRelatorComplex(rose(2), (w,), identity(rose(2)), w)
    v = npi_check(y)
    cert = v.witness["certificate"]
    assert v.passed and v.numbers["chi"] == 0
    assert cert["rule"] == "theorem" and cert["deg_sigma"] == 1 == cert["neg_chi_graph"]


def test_npi_disc_collapses():
    w = loop_from_word(circle_graph(1), [SignedEdge(0, 1)])
    y = OneRelatorComplex(circle_graph(1), (w,), identity(circle_graph(1)), w)
    v = npi_check(y)
    assert v.passed and v.branch == "trivial_pi1" and v.numbers["chi"] == 1
    assert v.witness["certificate"]["rule"] == "collapse"


def test_npi_bare_graph():
    rho = fold(rose(2), ["aa", "b"])
    y = OneRelatorComplex(rho.domain, (), rho, loop_from_word(rose(2), "a"))
    v = npi_check(y)
    assert v.passed and v.numbers["chi"] == -1 and v.branch == "chi_nonpositive"


def test_attachment_must_lie_over_relator():
    w = loop_from_word(rose(2), "ab")
    with pytest.raises(HypothesisError):
        OneRelatorComplex(rose(2), (loop_from_word(rose(2), "aab"),), identity(rose(2)), w)
    with pytest.raises(HypothesisError):
        OneRelatorComplex(rose(2), (w, loop_from_word(rose(2), "ba")), identity(rose(2)), w)


def test_tampered_certificate_is_rejected():
    rho = fold(rose(2), ["aab", "bbA", "ab"], absolute=True)
    w = loop_from_word(rose(2), "ab")
    y = OneRelatorComplex.from_lifts(rho, w)
    cert = npi_check(y).witness["certificate"]
    assert replay_certificate(y, cert) == y.euler_characteristic()
    bad = copy.deepcopy(cert)
    bad["chi"] += 1
    with pytest.raises(ValueError):
        replay_certificate(y, bad)


@settings(max_examples=120, deadline=None)
@given(st.integers(0, 10**6))
def test_npi_on_random_complexes(index):
    inst = random_instance("npi", index)
    y = OneRelatorComplex.from_lifts(inst.rho, inst.loop)
    v = npi_check(y)
    assert v.passed
    assert v.numbers["chi"] <= 0 or v.branch == "trivial_pi1"
    assert replay_certificate(y, v.witness["certificate"]) == y.euler_characteristic()


# --- genus -------------------------------------------------------------------


def test_genus_lower_bound():
    w = loop_from_word(rose(2), "abAB")
    assert genus_lower_bound(w, 1).value == Fraction(1, 2)
    assert genus_lower_bound(w, 2).value == 1
    with pytest.raises(HypothesisError):
        genus_lower_bound(loop_from_word(rose(2), "abab"), 1)
    with pytest.raises(HypothesisError):
        genus_lower_bound(w, 0)


def test_random_instances_are_deterministic():
    a, b = random_instance(3, 5), random_instance(3, 5)
    assert (a.word, a.gens, a.parts) == (b.word, b.gens, b.parts)
    assert a.rho.domain == b.rho.domain
