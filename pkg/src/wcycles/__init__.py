"""Graph immersions, fiber products, stackings of immersed circles, and
verifiers for the W-cycles bound and nonpositive immersions."""

from .graphs import (
    Edge,
    Graph,
    GraphMorphism,
    SignedEdge,
    core,
    euler_characteristic,
    fold,
    identity,
    is_core,
    is_immersion,
    rose,
    spanning_tree,
    validate_graph,
    valence,
)
from .pullback import covering_degree, fiber_product, is_reducible, pullback
from .stacking import (
    Stacking,
    construct_stacking,
    count_open_arcs,
    is_good,
    pullback_stacking,
    validate_stacking,
    visible_set,
)
from .theorems import (
    HypothesisError,
    OneRelatorComplex,
    genus_lower_bound,
    npi_check,
    verify_main_theorem,
    wcycles_check,
)
from .words import Loop, MultiLoop, cyclic_reduce, is_primitive, loop_from_word

__version__ = "0.1.0"

__all__ = [
    "Edge",
    "Graph",
    "GraphMorphism",
    "SignedEdge",
    "core",
    "euler_characteristic",
    "fold",
    "identity",
    "is_core",
    "is_immersion",
    "rose",
    "spanning_tree",
    "validate_graph",
    "valence",
    "covering_degree",
    "fiber_product",
    "is_reducible",
    "pullback",
    "Stacking",
    "construct_stacking",
    "count_open_arcs",
    "is_good",
    "pullback_stacking",
    "validate_stacking",
    "visible_set",
    "HypothesisError",
    "OneRelatorComplex",
    "genus_lower_bound",
    "npi_check",
    "verify_main_theorem",
    "wcycles_check",
    "Loop",
    "MultiLoop",
    "cyclic_reduce",
    "is_primitive",
    "loop_from_word",
]
