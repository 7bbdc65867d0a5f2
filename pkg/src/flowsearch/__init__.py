"""Electric-network quantum walk search: an exact classical simulator.

The package builds the walk operator of a weighted bipartite graph augmented
with a start vertex and tails on the marked vertices, simulates phase and
amplitude estimation on it, and runs the resulting search and
resistance-estimation algorithms while counting walk steps.
"""

from .augment import START, AugmentedGraph, augment, resistance_curve
from .electric import effective_resistance, electric_solution, hitting_time
from .graph import Distribution, Graph, bipartite_double, build_graph, load_instance
from .ledger import BudgetExhausted, CostLedger
from .search import (
    SearchConfig,
    SearchOutcome,
    estimate_resistance,
    find_eta,
    find_marked,
    find_marked_simple,
    find_marked_unknown_w,
)
from .walk import WalkOperator, build_walk_operator

__version__ = "0.1.0"

__all__ = [
    "START",
    "AugmentedGraph",
    "BudgetExhausted",
    "CostLedger",
    "Distribution",
    "Graph",
    "SearchConfig",
    "SearchOutcome",
    "WalkOperator",
    "augment",
    "bipartite_double",
    "build_graph",
    "build_walk_operator",
    "effective_resistance",
    "electric_solution",
    "estimate_resistance",
    "find_eta",
    "find_marked",
    "find_marked_simple",
    "find_marked_unknown_w",
    "hitting_time",
    "load_instance",
    "resistance_curve",
]
