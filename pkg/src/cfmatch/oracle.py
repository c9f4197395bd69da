"""Exact distribution of the greedy process by decision-tree enumeration.

Walks every branch of the process with exact rational probabilities and
returns the distribution over final matchings (as frozensets of edge ids).
Availability is recomputed from the definition at every node, so this is
independent of the incremental bookkeeping in ProcessState and serves as
its oracle. Exponential in the instance size; refuses beyond a hard cap.
"""

from __future__ import annotations

from fractions import Fraction

from .conflicts import ConflictSystem
from .errors import InputError
from .hypergraph import Hypergraph
from .process import recompute_available

__all__ = ["exact_distribution"]

DEFAULT_EDGE_CAP = 12


def exact_distribution(
    h: Hypergraph,
    c: ConflictSystem,
    target: int | None = None,
    edge_cap: int = DEFAULT_EDGE_CAP,
) -> dict[frozenset[int], Fraction]:
    """Map final matching -> exact probability; probabilities sum to 1."""
    if len(h.edges) > edge_cap:
        raise InputError(
            f"instance has {len(h.edges)} edges, above the enumeration cap {edge_cap}"
        )
    memo: dict[frozenset[int], dict[frozenset[int], Fraction]] = {}

    def walk(matching: frozenset[int]) -> dict[frozenset[int], Fraction]:
        got = memo.get(matching)
        if got is not None:
            return got
        if target is not None and len(matching) >= target:
            out = {matching: Fraction(1)}
        else:
            avail = recompute_available(h, c, matching)
            if not avail:
                out = {matching: Fraction(1)}
            else:
                out = {}
                p = Fraction(1, len(avail))
                for e in avail:
                    for fin, q in walk(matching | {e}).items():
                        out[fin] = out.get(fin, Fraction(0)) + p * q
        memo[matching] = out
        return out

    return walk(frozenset())
