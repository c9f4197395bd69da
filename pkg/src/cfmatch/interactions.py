"""Local-interaction hypergraphs and spreadness checks.

Six families of configurations mediate how one choice of the process can
affect other edges: tests meeting a vertex neighborhood (Z_v), links of
tests (Z_e), test-conflict overlaps anchored at an edge (Z_e2) or free
(Z_2), overlapping semiconflict pairs (C_e2), and semiconflicts of f
meeting a 2-conflict partner of e (C_ef2star). These are verification
instruments, quadratic in conflict incidences, so construction takes a
budget and refuses beyond it.

The immediate-evictor relation exists only for conflict-link systems: g
evicts the link system of f when g meets f or {g, f} is a 2-conflict.
Externally supplied test systems are never evicted.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

from .conflicts import ConditionReport, ConflictSystem
from .errors import BudgetError, InputError
from .hypergraph import Hypergraph
from .process import ProcessState
from .tracking import TestSystem

__all__ = [
    "InteractionSource",
    "ExternalSystem",
    "ConflictLinkSystem",
    "build_interaction",
    "is_spread",
    "spread_event_check",
    "KINDS",
]

KINDS = ("Z_v", "Z_e", "Z_e2", "Z_2", "C_e2", "C_ef2star")


class InteractionSource:
    """A test source: the tests plus the system-level evictor predicate."""

    j: int

    def tests(self) -> Sequence[tuple[int, ...]]:
        raise NotImplementedError

    def is_evictor(self, g: int) -> bool:
        raise NotImplementedError


class ExternalSystem(InteractionSource):
    """Wraps a TestSystem; external systems have no immediate evictors."""

    def __init__(self, z: TestSystem):
        self.z = z
        self.j = z.j

    def tests(self) -> Sequence[tuple[int, ...]]:
        return self.z.tests

    def is_evictor(self, g: int) -> bool:
        return False

    def __len__(self) -> int:
        return len(self.z)


class ConflictLinkSystem(InteractionSource):
    """The j-uniform link of edge f in the conflict system."""

    def __init__(self, h: Hypergraph, c: ConflictSystem, f: int, j: int):
        if not c.normalized:
            raise InputError("conflict-link systems require a normalized system")
        self.h = h
        self.c = c
        self.f = f
        self.j = j
        self._tests = tuple(
            sorted(tuple(sorted(link)) for link in c.link_of(f, j))
        )
        self._fverts = set(h.edges[f])
        self._partners = set(c.n2_neighborhood(f))

    def tests(self) -> Sequence[tuple[int, ...]]:
        return self._tests

    def is_evictor(self, g: int) -> bool:
        if set(self.h.edges[g]) & self._fverts:
            return True
        return g in self._partners

    def __len__(self) -> int:
        return len(self._tests)


def _conflict_links(c: ConflictSystem, e: int) -> list[frozenset[int]]:
    """All link edges of e (any size), i.e. C - {e} over conflicts C with e."""
    out = []
    for ci in c.incidence_of(e):
        ci = int(ci)
        mem = c.members(ci)
        out.append(frozenset(x for x in mem if x != e))
    return out


def build_interaction(
    kind: str,
    source: InteractionSource | None,
    c: ConflictSystem,
    h: Hypergraph,
    v: int | None = None,
    e: int | None = None,
    f: int | None = None,
    budget: int = 1_000_000,
) -> list[frozenset[int]]:
    """Materialize one interaction family, deduplicated.

    Anchors: Z_v needs v; Z_e and Z_e2 need e; C_e2 needs e; C_ef2star
    needs e and f (disjoint). Z kinds need a source; C kinds do not.
    Output order is canonical (sorted) so construction is invariant under
    input reordering.
    """
    if kind not in KINDS:
        raise InputError(f"unknown interaction kind {kind!r}")
    out: set[frozenset[int]] = set()

    def add(x: frozenset[int]):
        out.add(x)
        if len(out) > budget:
            raise BudgetError(
                f"interaction {kind} exceeded budget {budget}", estimate=len(out)
            )

    if kind in ("Z_v", "Z_e", "Z_e2", "Z_2"):
        if source is None:
            raise InputError(f"{kind} requires a test source")
    if kind == "Z_v":
        if v is None:
            raise InputError("Z_v requires the anchoring vertex")
        dv0 = set(h.incident_edges(v))
        for t in source.tests():
            if any(x in dv0 for x in t):
                add(frozenset(t))
    elif kind == "Z_e":
        if e is None:
            raise InputError("Z_e requires the anchoring edge")
        for t in source.tests():
            if e in t:
                add(frozenset(x for x in t if x != e))
    elif kind == "Z_e2":
        if e is None:
            raise InputError("Z_e2 requires the anchoring edge")
        links = _conflict_links(c, e)
        for t in source.tests():
            ts = frozenset(t)
            for link in links:
                if ts & link:
                    add(ts | link)
    elif kind == "Z_2":
        for t in source.tests():
            ts = frozenset(t)
            seen_cids = set()
            for x in t:
                for ci in c.incidence_of(x).tolist():
                    if ci in seen_cids:
                        continue
                    seen_cids.add(ci)
                    mem = frozenset(c.members(ci))
                    if len(ts & mem) < 2:
                        continue
                    if any(source.is_evictor(g) for g in mem - ts):
                        continue
                    add(ts | mem)
    elif kind == "C_e2":
        if e is None:
            raise InputError("C_e2 requires the anchoring edge")
        links = _conflict_links(c, e)
        for c1, c2 in combinations(links, 2):
            if c1 != c2 and c1 & c2:
                add(c1 | c2)
    else:  # C_ef2star
        if e is None or f is None:
            raise InputError("C_ef2star requires both anchoring edges")
        if set(h.edges[e]) & set(h.edges[f]):
            raise InputError("C_ef2star anchors must be disjoint")
        partners = set(c.n2_neighborhood(e))
        for link in _conflict_links(c, f):
            if len(link) >= 2 and link & partners:
                add(link)
    return sorted(out, key=lambda s: (len(s), sorted(s)))


def is_spread(
    x: Sequence[frozenset[int]] | Sequence[tuple[int, ...]],
    j: int,
    d0: float,
    delta: float,
) -> list[ConditionReport]:
    """Per-order verdicts that Delta_{j'}(x) <= delta^{j'} d0 for j' in [0, j-1].

    x must be j-uniform; callers split mixed-size families by size first.
    """
    edges = [tuple(sorted(t)) for t in x]
    for t in edges:
        if len(t) != j:
            raise InputError(f"edge {t} is not {j}-uniform")
    reports = []
    for jp in range(0, j):
        if jp == 0:
            measured = len(edges)
            wit = None
        else:
            counts: dict[tuple[int, ...], int] = {}
            for t in edges:
                for sub in combinations(t, jp):
                    counts[sub] = counts.get(sub, 0) + 1
            if counts:
                wit, measured = max(counts.items(), key=lambda kv: kv[1])
            else:
                wit, measured = None, 0
        thr = (delta**jp) * d0
        reports.append(
            ConditionReport(f"spread_{jp}", measured <= thr, float(measured), thr, wit)
        )
    return reports


def _partial_count(
    edges: Iterable[frozenset[int]], state: ProcessState, s: int
) -> int:
    """Edges with exactly s members available and the rest matched."""
    alive = state.is_alive
    matched = state.in_matching
    count = 0
    for t in edges:
        n_alive = 0
        ok = True
        for x in t:
            if alive[x]:
                n_alive += 1
                if n_alive > s:
                    ok = False
                    break
            elif not matched[x]:
                ok = False
                break
        if ok and n_alive == s:
            count += 1
    return count


def spread_event_check(
    state: ProcessState,
    sources: Sequence[InteractionSource],
    c: ConflictSystem,
    d: float,
    eps: float,
    ell: int | None = None,
    budget: int = 1_000_000,
) -> dict:
    """Evaluate the spreadness event on the current state.

    For every supplied source Z of uniformity j, the four Z-families are
    required to satisfy |X^[s]| <= d^(s - j - eps/3) |Z| over their anchor
    and s ranges; the two conflict families obey |C_e2^[s]| <= d^(s-eps/3)
    and |C_ef2star^[1]| <= d^(1-eps/3). Returns per-family worst cases,
    overall verdict, and a vacuity flag for thresholds below 1 (no desk-
    scale violation is even expressible there).
    """
    h = state.h
    if ell is None:
        ell = max(c.max_size(), 2)
    ne = len(h.edges)
    families: dict[str, dict] = {}

    def family(name):
        return families.setdefault(
            name, {"worst": None, "pass": True, "vacuous_thresholds": 0, "checks": 0}
        )

    def record(name, measured, thr, wit):
        fam = family(name)
        fam["checks"] += 1
        if thr < 1:
            fam["vacuous_thresholds"] += 1
        if measured > thr:
            fam["pass"] = False
        if fam["worst"] is None or measured - thr > fam["worst"][0]:
            fam["worst"] = (measured - thr, measured, thr, wit)

    for zi, src in enumerate(sources):
        j = src.j
        size = len(src.tests())
        if size == 0:
            continue
        is_link = isinstance(src, ConflictLinkSystem)
        # Z_v
        for v in range(h.n):
            x = build_interaction("Z_v", src, c, h, v=v, budget=budget)
            for s in range(1, ell + 1):
                thr = d ** (s - j - eps / 3) * size
                record("Z_v", _partial_count(x, state, s), thr,
                       {"source": zi, "v": v, "s": s})
        # Z_e
        for e in range(ne):
            x = build_interaction("Z_e", src, c, h, e=e, budget=budget)
            s_lo = 1 if is_link else 0
            for s in range(s_lo, ell + 1):
                thr = d ** (s - j - eps / 3) * size
                record("Z_e", _partial_count(x, state, s), thr,
                       {"source": zi, "e": e, "s": s})
        # Z_e2 (skip anchors that immediately evict the source)
        for e in range(ne):
            if src.is_evictor(e):
                continue
            x = build_interaction("Z_e2", src, c, h, e=e, budget=budget)
            for s in range(1, ell + 1):
                thr = d ** (s - j - eps / 3) * size
                record("Z_e2", _partial_count(x, state, s), thr,
                       {"source": zi, "e": e, "s": s})
        # Z_2
        x = build_interaction("Z_2", src, c, h, budget=budget)
        for s in range(2, ell + 1):
            thr = d ** (s - j - eps / 3) * size
            record("Z_2", _partial_count(x, state, s), thr, {"source": zi, "s": s})

    # conflict families are source-independent
    for e in range(ne):
        x = build_interaction("C_e2", None, c, h, e=e, budget=budget)
        for s in range(1, ell):
            thr = d ** (s - eps / 3)
            record("C_e2", _partial_count(x, state, s), thr, {"e": e, "s": s})
    partnered = [e for e in range(ne) if c.n2_neighborhood(e)]
    for e in partnered:
        everts = set(h.edges[e])
        for f in range(ne):
            if f == e or set(h.edges[f]) & everts:
                continue
            x = build_interaction("C_ef2star", None, c, h, e=e, f=f, budget=budget)
            thr = d ** (1 - eps / 3)
            record("C_ef2star", _partial_count(x, state, 1), thr, {"e": e, "f": f})

    overall = all(fam["pass"] for fam in families.values())
    return {"pass": overall, "families": families, "ell": ell}
