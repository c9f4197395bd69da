"""Uniform hypergraphs with degree, codegree and link queries.

A hypergraph here is a k-uniform edge list over dense 0-based vertex ids.
Edges are canonicalized at construction: each edge is stored as a sorted
vertex tuple and the edge sequence is sorted lexicographically, so edge ids
are deterministic and independent of input order. Instances are immutable
after construction and safe to share across concurrent runs.
"""

from __future__ import annotations

import json
from itertools import combinations
from typing import Iterable, Iterator, Sequence

from .errors import InputError

EdgeIds = Iterable[int]


class Hypergraph:
    """Immutable k-uniform hypergraph on vertices 0..n-1.

    Duplicate edges are rejected rather than deduplicated: a repeated edge
    would silently change selection probabilities downstream.
    """

    __slots__ = ("k", "n", "edges", "_incidence", "_edge_index")

    def __init__(self, k: int, n: int, edges: Iterable[Iterable[int]]):
        if k < 1:
            raise InputError(f"uniformity must be >= 1, got {k}")
        if n < 0:
            raise InputError(f"vertex count must be >= 0, got {n}")
        canon = []
        for e in edges:
            tup = tuple(sorted(e))
            if len(tup) != k or len(set(tup)) != k:
                raise InputError(f"edge {tup} does not have {k} distinct vertices")
            if tup[0] < 0 or tup[-1] >= n:
                raise InputError(f"edge {tup} has vertex ids outside [0, {n})")
            canon.append(tup)
        canon.sort()
        for a, b in zip(canon, canon[1:]):
            if a == b:
                raise InputError(f"duplicate edge {a}")
        self.k = k
        self.n = n
        self.edges: tuple[tuple[int, ...], ...] = tuple(canon)
        incidence: list[list[int]] = [[] for _ in range(n)]
        for eid, e in enumerate(self.edges):
            for v in e:
                incidence[v].append(eid)
        self._incidence: tuple[tuple[int, ...], ...] = tuple(
            tuple(lst) for lst in incidence
        )
        self._edge_index = {e: i for i, e in enumerate(self.edges)}

    # -- basic accessors -------------------------------------------------

    def __len__(self) -> int:
        return len(self.edges)

    def __iter__(self) -> Iterator[tuple[int, ...]]:
        return iter(self.edges)

    def incident_edges(self, v: int) -> tuple[int, ...]:
        """Edge ids containing vertex v, ascending."""
        self._check_vertex(v)
        return self._incidence[v]

    def edge_id(self, e: Iterable[int]) -> int:
        """Canonical id of an edge given as a vertex set; InputError if absent."""
        tup = tuple(sorted(e))
        try:
            return self._edge_index[tup]
        except KeyError:
            raise InputError(f"no such edge: {tup}") from None

    def _check_vertex(self, v: int) -> None:
        if not (0 <= v < self.n):
            raise InputError(f"vertex id {v} outside [0, {self.n})")

    # -- queries ---------------------------------------------------------

    def degree(self, vs: Iterable[int]) -> int:
        """Number of edges containing every vertex of the nonempty set vs."""
        vset = sorted(set(vs))
        if not vset:
            raise InputError("degree requires a nonempty vertex set")
        for v in vset:
            self._check_vertex(v)
        # intersect incidence lists, smallest first
        lists = sorted((self._incidence[v] for v in vset), key=len)
        result = set(lists[0])
        for lst in lists[1:]:
            result.intersection_update(lst)
            if not result:
                return 0
        return len(result)

    def codegree_max(self, j: int) -> int:
        """Maximum j-degree, scanning only j-subsets of actual edges."""
        if not (1 <= j <= self.k):
            raise InputError(f"codegree order {j} outside [1, {self.k}]")
        counts: dict[tuple[int, ...], int] = {}
        best = 0
        for e in self.edges:
            for sub in combinations(e, j):
                c = counts.get(sub, 0) + 1
                counts[sub] = c
                if c > best:
                    best = c
        return best

    def is_matching(self, edge_ids: EdgeIds) -> bool:
        """True iff the given edges are pairwise vertex-disjoint."""
        seen: set[int] = set()
        for eid in edge_ids:
            e = self.edges[eid]
            for v in e:
                if v in seen:
                    return False
            seen.update(e)
        return True

    def covered_vertices(self, edge_ids: EdgeIds) -> set[int]:
        out: set[int] = set()
        for eid in edge_ids:
            out.update(self.edges[eid])
        return out

    def link(self, v: int) -> "Hypergraph":
        """The (k-1)-uniform link of v: edges {e - v : v in e}, same id space.

        Vertex v keeps its id but becomes isolated; this preserves vertex
        identity across link operations.
        """
        self._check_vertex(v)
        link_edges = [
            tuple(u for u in self.edges[eid] if u != v) for eid in self._incidence[v]
        ]
        return Hypergraph(self.k - 1, self.n, link_edges)


def check_edge_ids(h: Hypergraph, edge_ids: EdgeIds) -> tuple[int, ...]:
    """Validate and canonicalize a set of edge ids (sorted, deduplicated)."""
    ids = sorted(set(edge_ids))
    if ids and (ids[0] < 0 or ids[-1] >= len(h.edges)):
        raise InputError(f"edge id outside [0, {len(h.edges)})")
    return tuple(ids)


# -- JSON interface -------------------------------------------------------


def hypergraph_to_json(h: Hypergraph) -> dict:
    return {"k": h.k, "n": h.n, "edges": [list(e) for e in h.edges]}


def hypergraph_from_json(obj: dict) -> Hypergraph:
    """Load an instance object {k, n, edges}; enforces the schema strictly.

    Each edge array must already be sorted ascending; the edge sequence is
    sorted here, which fixes the canonical edge ids.
    """
    try:
        k, n, edges = obj["k"], obj["n"], obj["edges"]
    except (KeyError, TypeError) as exc:
        raise InputError(f"instance object missing field: {exc}") from None
    if not isinstance(k, int) or not isinstance(n, int):
        raise InputError("fields 'k' and 'n' must be integers")
    if k < 2:
        raise InputError(f"instance uniformity must be >= 2, got {k}")
    for e in edges:
        if not all(isinstance(v, int) for v in e):
            raise InputError(f"edge {e} has non-integer vertex ids")
        if list(e) != sorted(e):
            raise InputError(f"edge {e} is not sorted ascending")
    return Hypergraph(k, n, edges)


def load_hypergraph(path) -> Hypergraph:
    with open(path, "r", encoding="utf-8") as fh:
        return hypergraph_from_json(json.load(fh))


def dump_hypergraph(h: Hypergraph, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(hypergraph_to_json(h), fh, sort_keys=True, separators=(",", ":"))
        fh.write("\n")
