"""Conflict systems: forbidden edge subsets over a host hypergraph.

A conflict system is a non-uniform hypergraph whose vertices are the edge
ids of a host k-graph; its edges ("conflicts") are the subsets a matching
must not fully contain. Storage is a flat int32 member array with offsets,
so systems with tens of millions of conflicts stay affordable; the
per-conflict view is materialized on demand.

An edge set E is conflict-free when no conflict is a subset of E. A system
is *normalized* when every conflict is a matching in the host and no
conflict contains another; the greedy process requires normalized input
because its incremental counters assume both properties.
"""

from __future__ import annotations

import json
import math
import random
import warnings
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import BudgetError, InputError
from .hypergraph import Hypergraph

__all__ = [
    "ConflictSystem",
    "BoundsParams",
    "ConditionReport",
    "BoundsReport",
    "normalize",
    "boundedness_report",
    "pair_augment",
    "regularize",
]


class ConflictSystem:
    """Immutable collection of conflicts (edge-id sets of size >= 2)."""

    __slots__ = ("n_edges", "_data", "_off", "_uniform", "sizes", "_inc", "normalized")

    def __init__(
        self,
        n_edges: int,
        data: np.ndarray,
        offsets: np.ndarray | None,
        uniform_size: int | None,
        normalized: bool = False,
    ):
        self.n_edges = int(n_edges)
        self._data = data
        self._off = offsets
        self._uniform = uniform_size
        if uniform_size is not None:
            nc = len(data) // uniform_size
            self.sizes = None  # implicit: all equal to uniform_size
            if len(data) != nc * uniform_size:
                raise InputError("flat data length not a multiple of uniform size")
        else:
            self.sizes = np.diff(offsets).astype(np.int32)
        self._inc = None
        self.normalized = normalized
        if len(data) and (data.min() < 0 or data.max() >= n_edges):
            raise InputError("conflict references an edge id outside the host")
        for j in self.size_of_range():
            if j < 2:
                raise InputError("every conflict must have size >= 2")

    # -- construction ------------------------------------------------------

    @classmethod
    def from_iterable(
        cls,
        conflicts: Iterable[Iterable[int]],
        n_edges: int,
        normalized: bool = False,
    ) -> "ConflictSystem":
        rows = []
        for c in conflicts:
            tup = tuple(sorted(c))
            if len(set(tup)) != len(tup):
                raise InputError(f"conflict {tup} repeats an edge id")
            rows.append(tup)
        sizes = {len(r) for r in rows}
        if len(sizes) == 1:
            (j,) = sizes
            data = np.fromiter(
                (x for r in rows for x in r), dtype=np.int32, count=len(rows) * j
            )
            return cls(n_edges, data, None, j, normalized)
        data = np.fromiter((x for r in rows for x in r), dtype=np.int32)
        off = np.zeros(len(rows) + 1, dtype=np.int64)
        np.cumsum([len(r) for r in rows], out=off[1:])
        return cls(n_edges, data, off, None, normalized)

    @classmethod
    def from_uniform_array(
        cls, members: np.ndarray, n_edges: int, normalized: bool = False
    ) -> "ConflictSystem":
        """Build from an (nc, j) int array; rows are sorted in place."""
        if members.ndim != 2:
            raise InputError("expected a 2-d member array")
        members = np.ascontiguousarray(members, dtype=np.int32)
        members.sort(axis=1)
        if len(members) and np.any(members[:, :-1] == members[:, 1:]):
            raise InputError("a conflict repeats an edge id")
        return cls(n_edges, members.reshape(-1), None, members.shape[1], normalized)

    @classmethod
    def empty(cls, n_edges: int) -> "ConflictSystem":
        return cls(n_edges, np.empty(0, dtype=np.int32), None, 2, normalized=True)

    # -- views -------------------------------------------------------------

    @property
    def n_conflicts(self) -> int:
        if self._uniform is not None:
            return len(self._data) // self._uniform
        return len(self._off) - 1

    def __len__(self) -> int:
        return self.n_conflicts

    def size_of(self, ci: int) -> int:
        if self._uniform is not None:
            return self._uniform
        return int(self.sizes[ci])

    def size_of_range(self):
        """Distinct conflict sizes present."""
        if self.n_conflicts == 0:
            return ()
        if self._uniform is not None:
            return (self._uniform,)
        return tuple(int(j) for j in np.unique(self.sizes))

    def members(self, ci: int) -> tuple[int, ...]:
        if self._uniform is not None:
            j = self._uniform
            return tuple(int(x) for x in self._data[ci * j : (ci + 1) * j])
        return tuple(int(x) for x in self._data[self._off[ci] : self._off[ci + 1]])

    def __iter__(self) -> Iterator[tuple[int, ...]]:
        for ci in range(self.n_conflicts):
            yield self.members(ci)

    def by_size(self) -> dict[int, np.ndarray]:
        """Map size j -> array of conflict indices of that size."""
        if self.n_conflicts == 0:
            return {}
        if self._uniform is not None:
            return {self._uniform: np.arange(self.n_conflicts, dtype=np.int64)}
        return {
            int(j): np.nonzero(self.sizes == j)[0]
            for j in np.unique(self.sizes)
        }

    def max_size(self) -> int:
        rng = self.size_of_range()
        return max(rng) if rng else 2

    # -- incidence ----------------------------------------------------------

    def _incidence(self) -> tuple[np.ndarray, np.ndarray]:
        """CSR incidence: for each host edge, the ids of conflicts containing it."""
        if self._inc is None:
            flat = self._data
            counts = np.bincount(flat, minlength=self.n_edges)
            off = np.zeros(self.n_edges + 1, dtype=np.int64)
            np.cumsum(counts, out=off[1:])
            order = np.argsort(flat, kind="stable")
            if self._uniform is not None:
                ids = (order // self._uniform).astype(np.int32)
            else:
                slot_to_cid = np.repeat(
                    np.arange(self.n_conflicts, dtype=np.int32), self.sizes
                )
                ids = slot_to_cid[order]
            self._inc = (ids, off)
        return self._inc

    def incidence_of(self, e: int) -> np.ndarray:
        """Conflict ids containing host edge e."""
        if not (0 <= e < self.n_edges):
            raise InputError(f"edge id {e} outside [0, {self.n_edges})")
        ids, off = self._incidence()
        return ids[off[e] : off[e + 1]]

    def conflict_degree(self, e: int) -> int:
        return len(self.incidence_of(e))

    # -- semantics -----------------------------------------------------------

    def is_cfree(self, edge_ids: Iterable[int]) -> bool:
        """True iff no conflict is fully contained in the given edge set."""
        ids = list(set(edge_ids))
        if not ids or self.n_conflicts == 0:
            return True
        touched = np.concatenate([self.incidence_of(e) for e in ids])
        if len(touched) == 0:
            return True
        cids, counts = np.unique(touched, return_counts=True)
        if self._uniform is not None:
            return not bool(np.any(counts == self._uniform))
        return not bool(np.any(counts == self.sizes[cids]))

    def n2_neighborhood(self, e: int) -> tuple[int, ...]:
        """Partners of e in size-2 conflicts, sorted ascending."""
        out = set()
        for ci in self.incidence_of(e):
            if self.size_of(int(ci)) == 2:
                a, b = self.members(int(ci))
                out.add(b if a == e else a)
        return tuple(sorted(out))

    def link_of(self, e: int, j: int) -> set[frozenset[int]]:
        """Size-j link edges of e: {C - {e} : C a conflict of size j+1 with e in C}."""
        out: set[frozenset[int]] = set()
        for ci in self.incidence_of(e):
            ci = int(ci)
            if self.size_of(ci) == j + 1:
                mem = self.members(ci)
                out.add(frozenset(x for x in mem if x != e))
        return out

    def as_set(self) -> set[frozenset[int]]:
        """All conflicts as frozensets. Only sensible at desk scale."""
        return {frozenset(self.members(ci)) for ci in range(self.n_conflicts)}


# -- normalization ---------------------------------------------------------


@dataclass
class RemovalLog:
    """Per-conflict removal records from normalize(): (conflict, reason)."""

    removed: list[tuple[tuple[int, ...], str]] = field(default_factory=list)

    def reasons(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for _, r in self.removed:
            out[r] = out.get(r, 0) + 1
        return out


def normalize(h: Hypergraph, c: ConflictSystem) -> tuple[ConflictSystem, RemovalLog]:
    """Drop non-matching conflicts, duplicates, and supersets of retained conflicts.

    The result has exactly the conflict-free matchings of the input: a
    non-matching conflict can never sit inside a matching, and a superset
    is implied by its subset. Intended for desk-scale systems; generators
    emit already-normalized systems and mark them as such.
    """
    if c.n_edges != len(h.edges):
        raise InputError("conflict system does not match the host edge count")
    log = RemovalLog()
    kept: list[frozenset[int]] = []
    seen: set[frozenset[int]] = set()
    for ci in range(c.n_conflicts):
        mem = c.members(ci)
        fs = frozenset(mem)
        if not h.is_matching(mem):
            log.removed.append((mem, "non-matching"))
            continue
        if fs in seen:
            log.removed.append((mem, "duplicate"))
            continue
        seen.add(fs)
        kept.append(fs)
    # subset filtering: keep minimal elements only
    kept.sort(key=len)
    minimal: list[frozenset[int]] = []
    for fs in kept:
        if any(m <= fs for m in minimal if len(m) < len(fs)):
            log.removed.append((tuple(sorted(fs)), "superset"))
            continue
        minimal.append(fs)
    out = ConflictSystem.from_iterable(
        (tuple(sorted(fs)) for fs in minimal), c.n_edges, normalized=True
    ) if minimal else ConflictSystem.empty(c.n_edges)
    return out, log


# -- boundedness ------------------------------------------------------------


@dataclass(frozen=True)
class BoundsParams:
    """Degree-scale parameters for the boundedness conditions."""

    d: float
    ell: int
    gamma: float
    eps: float

    def __post_init__(self):
        if self.ell < 2:
            raise InputError("ell must be >= 2")
        if not (0 < self.eps < 1):
            raise InputError("eps must lie in (0, 1)")
        if self.gamma < 1:
            raise InputError("gamma must be >= 1")
        if self.d <= 0:
            raise InputError("d must be positive")


@dataclass
class ConditionReport:
    name: str
    passed: bool
    measured: float
    threshold: float
    witness: object = None

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "pass": self.passed,
            "measured": self.measured,
            "threshold": self.threshold,
            "witness": _jsonable(self.witness),
        }


def _jsonable(obj):
    if obj is None or isinstance(obj, (int, float, str, bool)):
        return obj
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (set, frozenset)):
        return [_jsonable(x) for x in sorted(obj)]
    if isinstance(obj, (list, tuple)):
        return [_jsonable(x) for x in obj]
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    return str(obj)


@dataclass
class BoundsReport:
    conditions: list[ConditionReport]

    @property
    def all_pass(self) -> bool:
        return all(c.passed for c in self.conditions)

    def get(self, name: str) -> ConditionReport:
        for c in self.conditions:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_json(self) -> list[dict]:
        return [c.to_json() for c in self.conditions]


def _degree_by_size(c: ConflictSystem) -> dict[int, dict[int, int]]:
    """size j -> {edge e -> number of size-j conflicts containing e}."""
    out: dict[int, dict[int, int]] = {}
    for ci in range(c.n_conflicts):
        j = c.size_of(ci)
        d = out.setdefault(j, {})
        for e in c.members(ci):
            d[e] = d.get(e, 0) + 1
    return out


def _delta_by_size(c: ConflictSystem) -> dict[int, int]:
    """size j -> max over edges of the size-j conflict degree."""
    return {j: (max(d.values()) if d else 0) for j, d in _degree_by_size(c).items()}


def delta_map(c: ConflictSystem, ell: int) -> dict[int, int]:
    """Max degree of each uniform layer, zero-filled for j in [2, ell].

    Fast path for uniform systems (incidence row lengths); generic scan
    otherwise.
    """
    out = {j: 0 for j in range(2, ell + 1)}
    if c.n_conflicts == 0:
        return out
    if c._uniform is not None:
        _, off = c._incidence()
        out[c._uniform] = int(np.max(np.diff(off))) if c.n_edges else 0
        return out
    out.update(_delta_by_size(c))
    return out


def _shared_link_pairs(c: ConflictSystem, j: int) -> dict[tuple[int, int], int]:
    """For link order j: (e, f) -> |C_e^(j) cap C_f^(j)|, over co-linked pairs.

    Conflicts of size j+1 index this: each conflict C and member e yield the
    link set C - {e}; two edges e, f share that link when C-{e} == C'-{f}.
    """
    by_link: dict[frozenset[int], list[int]] = {}
    for ci in range(c.n_conflicts):
        if c.size_of(ci) != j + 1:
            continue
        mem = c.members(ci)
        ms = frozenset(mem)
        for e in mem:
            by_link.setdefault(ms - {e}, []).append(e)
    pairs: dict[tuple[int, int], int] = {}
    for link, edges in by_link.items():
        if len(edges) < 2:
            continue
        edges = sorted(set(edges))
        for a, b in combinations(edges, 2):
            pairs[(a, b)] = pairs.get((a, b), 0) + 1
    return pairs


def boundedness_report(
    h: Hypergraph,
    c: ConflictSystem,
    p: BoundsParams,
    extended: bool = False,
) -> BoundsReport:
    """Evaluate the degree/codegree conditions on (h, c) exhaustively.

    Failures are verdicts, not errors. Ties go to pass: measured <= threshold
    passes, compared at double precision. With extended=True the setup
    conditions (matching conflicts, antichain, regularity, pairwise link
    bounds) are also evaluated; extended evaluation requires a normalized
    system because the setup conditions presume one.
    """
    if extended and not c.normalized:
        raise InputError("extended boundedness evaluation requires a normalized system")
    d, ell, gamma, eps = p.d, p.ell, p.gamma, p.eps
    conds: list[ConditionReport] = []

    deg_by_size = _degree_by_size(c)
    sizes_present = sorted(deg_by_size)

    # C1: conflict sizes within [2, ell]
    if c.n_conflicts:
        max_j = max(sizes_present)
        worst = next(
            ci for ci in range(c.n_conflicts) if c.size_of(ci) == max_j
        )
        conds.append(
            ConditionReport(
                "C1", max_j <= ell, float(max_j), float(ell), c.members(worst)
            )
        )
    else:
        conds.append(ConditionReport("C1", True, 0.0, float(ell), None))

    # C2: sum_j Delta(C^(j))/d^(j-1) <= Gamma, and #nonempty layers <= Gamma
    deltas = {j: max(dd.values()) for j, dd in deg_by_size.items()}
    total = sum(dj / d ** (j - 1) for j, dj in deltas.items())
    n_layers = len([j for j, dj in deltas.items() if dj > 0])
    conds.append(
        ConditionReport(
            "C2",
            total <= gamma and n_layers <= gamma,
            float(total),
            float(gamma),
            {"deltas": deltas, "nonempty_layers": n_layers},
        )
    )

    # C3: Delta_{j'}(C^(j)) <= d^(j-j'-eps) for j in [ell]_2, j' in [j-1]_2
    worst3 = None
    for j in sizes_present:
        idx = [ci for ci in range(c.n_conflicts) if c.size_of(ci) == j]
        for jp in range(2, j):
            counts: dict[tuple[int, ...], int] = {}
            for ci in idx:
                for sub in combinations(c.members(ci), jp):
                    counts[sub] = counts.get(sub, 0) + 1
            if not counts:
                continue
            sub, measured = max(counts.items(), key=lambda kv: kv[1])
            thr = d ** (j - jp - eps)
            cand = (measured - thr, measured, thr, {"j": j, "j_prime": jp, "subset": sub})
            if worst3 is None or cand[0] > worst3[0]:
                worst3 = cand
    if worst3 is None:
        conds.append(ConditionReport("C3", True, 0.0, d ** (2 - eps), None))
    else:
        _, measured, thr, wit = worst3
        conds.append(ConditionReport("C3", measured <= thr, float(measured), thr, wit))

    # C4: vertex-concentration of 2-conflict partners
    # count, per (edge, vertex), the partners f in N2(e) with v in f
    thr45 = d ** (1 - eps)
    worst4 = (0.0, None)
    counts4: dict[tuple[int, int], int] = {}
    for ci in range(c.n_conflicts):
        if c.size_of(ci) != 2:
            continue
        a, b = c.members(ci)
        for e, f in ((a, b), (b, a)):
            for v in h.edges[f]:
                key = (e, v)
                counts4[key] = counts4.get(key, 0) + 1
    if counts4:
        key, measured = max(counts4.items(), key=lambda kv: kv[1])
        worst4 = (float(measured), {"edge": key[0], "vertex": key[1]})
    conds.append(ConditionReport("C4", worst4[0] <= thr45, worst4[0], thr45, worst4[1]))

    # C5: |N2(e) cap N2(f)| for disjoint e, f
    n2: dict[int, set[int]] = {}
    for ci in range(c.n_conflicts):
        if c.size_of(ci) != 2:
            continue
        a, b = c.members(ci)
        n2.setdefault(a, set()).add(b)
        n2.setdefault(b, set()).add(a)
    pair_counts: dict[tuple[int, int], int] = {}
    for g, nbrs in n2.items():
        for e, f in combinations(sorted(nbrs), 2):
            pair_counts[(e, f)] = pair_counts.get((e, f), 0) + 1
    worst5 = (0.0, None)
    for (e, f), cnt in pair_counts.items():
        if set(h.edges[e]) & set(h.edges[f]):
            continue
        if cnt > worst5[0]:
            worst5 = (float(cnt), {"e": e, "f": f})
    conds.append(ConditionReport("C5", worst5[0] <= thr45, worst5[0], thr45, worst5[1]))

    if extended:
        conds.extend(_extended_conditions(h, c, p, deg_by_size))
    return BoundsReport(conds)


def _extended_conditions(h, c, p, deg_by_size) -> list[ConditionReport]:
    d, ell, eps = p.d, p.ell, p.eps
    out = []

    # C6: d^(j-1-eps/100) <= (1-d^-eps) * Delta(C^(j)) <= delta(C^(j)), per nonempty layer
    worst6 = None
    for j in sorted(deg_by_size):
        dd = deg_by_size[j]
        delta_max = max(dd.values())
        # min degree over *all* host edges, absent edges have degree 0
        delta_min = min(dd.get(e, 0) for e in range(c.n_edges)) if c.n_edges else 0
        lo = d ** (j - 1 - eps / 100)
        mid = (1 - d ** (-eps)) * delta_max
        ok = lo <= mid <= delta_min
        margin = max(lo - mid, mid - delta_min)
        cand = (margin, ok, {"j": j, "min_degree": delta_min, "max_degree": delta_max,
                             "lower": lo, "scaled_max": mid})
        if worst6 is None or cand[0] > worst6[0]:
            worst6 = cand
    if worst6 is None:
        out.append(ConditionReport("C6", True, 0.0, 0.0, None))
    else:
        margin, ok, wit = worst6
        out.append(ConditionReport("C6", ok, float(margin), 0.0, wit))

    # C7: |C_e^(j) cap C_f^(j)| <= d^(j-eps) for disjoint e,f with {e,f} not a 2-conflict
    n2pairs = set()
    for ci in range(c.n_conflicts):
        if c.size_of(ci) == 2:
            a, b = c.members(ci)
            n2pairs.add((min(a, b), max(a, b)))
    worst7 = None
    for j in range(1, max(c.max_size(), 2)):
        pairs = _shared_link_pairs(c, j)
        thr = d ** (j - eps)
        for (e, f), cnt in pairs.items():
            if (e, f) in n2pairs:
                continue
            if set(h.edges[e]) & set(h.edges[f]):
                continue
            cand = (cnt - thr, cnt, thr, {"j": j, "e": e, "f": f})
            if worst7 is None or cand[0] > worst7[0]:
                worst7 = cand
    if worst7 is None:
        out.append(ConditionReport("C7", True, 0.0, d ** (1 - eps), None))
    else:
        _, cnt, thr, wit = worst7
        out.append(ConditionReport("C7", cnt <= thr, float(cnt), thr, wit))

    # C8: every conflict is a matching in the host
    bad8 = next(
        (ci for ci in range(c.n_conflicts) if not h.is_matching(c.members(ci))), None
    )
    out.append(
        ConditionReport(
            "C8",
            bad8 is None,
            0.0 if bad8 is None else 1.0,
            0.0,
            None if bad8 is None else c.members(bad8),
        )
    )

    # C9: no conflict contains another
    sets = [(frozenset(c.members(ci)), ci) for ci in range(c.n_conflicts)]
    sets.sort(key=lambda t: len(t[0]))
    bad9 = None
    for i, (small, ci) in enumerate(sets):
        for big, cj in sets[i + 1 :]:
            if len(big) > len(small) and small < big:
                bad9 = (c.members(ci), c.members(cj))
                break
        if bad9:
            break
    out.append(
        ConditionReport("C9", bad9 is None, 0.0 if bad9 is None else 1.0, 0.0, bad9)
    )
    return out


# -- augmentation and regularization ----------------------------------------


def pair_augment(
    h: Hypergraph,
    c: ConflictSystem,
    p: BoundsParams,
    trackables: Sequence = (),
) -> ConflictSystem:
    """Add a size-2 conflict for every pair with an oversized shared link.

    A disjoint pair (e, f) that is not already a 2-conflict is bad when for
    some link order j in [ell-1]_2 it shares at least d^(j - eps/2) link
    j-sets. Adding {e, f} keeps every supplied trackable test system
    conflict-free; a violation means the input system was not trackable and
    is reported as an error.
    """
    if not c.normalized:
        raise InputError("pair_augment requires a normalized conflict system")
    d, eps = p.d, p.eps
    existing2 = set()
    for ci in range(c.n_conflicts):
        if c.size_of(ci) == 2:
            a, b = c.members(ci)
            existing2.add((min(a, b), max(a, b)))
    bad: set[tuple[int, int]] = set()
    for j in range(2, p.ell):
        thr = d ** (j - eps / 2)
        for (e, f), cnt in _shared_link_pairs(c, j).items():
            if cnt < thr or (e, f) in existing2 or (e, f) in bad:
                continue
            if set(h.edges[e]) & set(h.edges[f]):
                continue
            bad.add((e, f))
    if not bad:
        return c
    merged = [c.members(ci) for ci in range(c.n_conflicts)]
    merged.extend(sorted(bad))
    out = ConflictSystem.from_iterable(merged, c.n_edges, normalized=True)
    for z in trackables:
        for test in z.tests:
            if not out.is_cfree(test):
                raise InputError(
                    f"augmentation broke test {tuple(test)}; the supplied system "
                    "was not trackable for these parameters"
                )
    return out


def regularize(
    h: Hypergraph,
    c: ConflictSystem,
    p: BoundsParams,
    seed: int,
    max_candidates: int = 2_000_000,
) -> ConflictSystem:
    """Randomly pad each conflict size class toward a uniform target degree.

    Working up through sizes j = 2..ell, candidate matching j-sets that do
    not already contain a conflict are added independently with probability
    (j-1)! * prod(deficit(e)) / deficit_total^(j-1), clamped to [0, 1];
    existing larger conflicts that now contain an added j-set are dropped.
    The output keeps all conflicts matchings, is an antichain, and every
    input conflict contains an output conflict.

    Candidate enumeration is exhaustive over j-subsets of the host; if
    C(|H|, j) exceeds max_candidates the call refuses rather than
    subsampling.
    """
    if not c.normalized:
        raise InputError("regularize requires a normalized conflict system")
    rng = random.Random(seed)
    d, ell, eps = p.d, p.ell, p.eps
    ne = len(h.edges)
    current: set[frozenset[int]] = {frozenset(c.members(ci)) for ci in range(c.n_conflicts)}
    orig_delta = delta_map(c, ell)

    for j in range(2, ell + 1):
        layer = [fs for fs in current if len(fs) == j]
        if not layer:
            continue
        n_cand = math.comb(ne, j)
        if n_cand > max_candidates:
            raise BudgetError(
                f"candidate space C({ne},{j}) = {n_cand} exceeds budget "
                f"{max_candidates}",
                estimate=n_cand,
            )
        d_tar = (1 + d ** (-eps / ell)) * max(
            d ** (j - 1 - eps / 600), float(orig_delta[j])
        )
        deg = {e: 0 for e in range(ne)}
        for fs in layer:
            for e in fs:
                deg[e] += 1
        deficit = {}
        clamped = False
        for e in range(ne):
            val = d_tar - deg[e]
            if val < 0:
                clamped = True
                val = 0.0
            deficit[e] = val
        if clamped:
            warnings.warn(
                "negative degree deficit clamped to 0 (finite-scale regime)",
                RuntimeWarning,
                stacklevel=2,
            )
        total = sum(deficit.values())
        if total <= 0:
            continue
        coef = math.factorial(j - 1) / total ** (j - 1)
        added: list[frozenset[int]] = []
        for cand in combinations(range(ne), j):
            if not h.is_matching(cand):
                continue
            fc = frozenset(cand)
            if any(fs <= fc for fs in current if len(fs) <= j):
                continue
            w = coef
            for e in cand:
                w *= deficit[e]
            if w > 1.0:
                w = 1.0
            if w > 0 and rng.random() < w:
                added.append(fc)
        if not added:
            continue
        current.update(added)
        # drop strictly larger conflicts now dominated by an added j-set
        doomed = [
            fs
            for fs in current
            if len(fs) > j and any(a <= fs for a in added)
        ]
        current.difference_update(doomed)

    if not current:
        return ConflictSystem.empty(ne)
    return ConflictSystem.from_iterable(
        (tuple(sorted(fs)) for fs in sorted(current, key=lambda f: (len(f), sorted(f)))),
        ne,
        normalized=True,
    )


# -- JSON interface ----------------------------------------------------------


def conflicts_to_json(c: ConflictSystem) -> list[list[int]]:
    return [list(c.members(ci)) for ci in range(c.n_conflicts)]


def conflicts_from_json(obj, n_edges: int) -> ConflictSystem:
    if not isinstance(obj, list):
        raise InputError("conflicts JSON must be an array of arrays")
    if not obj:
        return ConflictSystem.empty(n_edges)
    return ConflictSystem.from_iterable(obj, n_edges)


def load_conflicts(path, n_edges: int) -> ConflictSystem:
    with open(path, "r", encoding="utf-8") as fh:
        return conflicts_from_json(json.load(fh), n_edges)


def dump_conflicts(c: ConflictSystem, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("[")
        for ci in range(c.n_conflicts):
            if ci:
                fh.write(",")
            fh.write(json.dumps(list(c.members(ci)), separators=(",", ":")))
        fh.write("]\n")
