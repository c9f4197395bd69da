"""Conflict-free random greedy hypergraph matching, with verification tooling.

Library layout:

- hypergraph: k-uniform hosts with degree/codegree/link queries
- conflicts: conflict systems, boundedness conditions, regularization
- process / oracle: the greedy matching process and its exact oracle
- trajectory: idealized trajectories, error bands, counting bound
- tracking: test systems/functions and containment statistics
- interactions: local-interaction hypergraphs and spreadness checks
- steiner: high-girth Steiner / Latin / packing instance generators
- cli: experiment command line
"""

from .hypergraph import Hypergraph
from .conflicts import BoundsParams, ConflictSystem, boundedness_report, normalize
from .process import ProcessState, derive_run_seed, init, recompute_available
from .oracle import exact_distribution

__all__ = [
    "Hypergraph",
    "ConflictSystem",
    "BoundsParams",
    "normalize",
    "boundedness_report",
    "ProcessState",
    "init",
    "recompute_available",
    "derive_run_seed",
    "exact_distribution",
]

__version__ = "0.1.0"
