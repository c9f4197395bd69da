"""The conflict-free random greedy matching process.

Starting from the full host, the process repeatedly picks an available edge
uniformly at random, adds it to the matching, then removes every edge that
the choice kills: first the edges that would complete a conflict (all but
one member already matched), then every edge meeting a newly covered
vertex. An edge removed by both causes in the same step is attributed to
the conflict removal, matching the removal order of the construction.

Randomness contract: each run draws from Python's Mersenne Twister seeded
with a 64-bit key derived as SHA-256("cfmatch-run" || master_seed ||
run_index), so every replica stream is reproducible from the master seed
alone. Uniform choice over available edges uses a swap-remove dense array
(O(1) choice and removal; exact because the process is removal-only).
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .conflicts import ConflictSystem
from .errors import InputError
from .hypergraph import Hypergraph

__all__ = [
    "derive_run_seed",
    "AliveSet",
    "TraceRecord",
    "RunResult",
    "ProcessState",
    "init",
    "recompute_available",
    "trace_to_csv",
]


def derive_run_seed(master_seed: int, run_index: int) -> int:
    """Stream key for one replica: SHA-256 over (master seed, run index)."""
    payload = b"cfmatch-run:%d:%d" % (master_seed, run_index)
    return int.from_bytes(hashlib.sha256(payload).digest()[:8], "big")


class AliveSet:
    """Dense id set with O(1) uniform sampling and removal (swap-remove)."""

    __slots__ = ("items", "pos")

    def __init__(self, ids: Iterable[int], universe: int):
        self.items = list(ids)
        self.pos = [-1] * universe
        for i, x in enumerate(self.items):
            self.pos[x] = i

    def __len__(self) -> int:
        return len(self.items)

    def __contains__(self, x: int) -> bool:
        return self.pos[x] >= 0

    def sample(self, rng: random.Random) -> int:
        return self.items[rng.randrange(len(self.items))]

    def remove(self, x: int) -> None:
        i = self.pos[x]
        last = self.items.pop()
        if last != x:
            self.items[i] = last
            self.pos[last] = i
        self.pos[x] = -1

    def as_sorted_tuple(self) -> tuple[int, ...]:
        return tuple(sorted(self.items))


@dataclass
class TraceRecord:
    """One step of the process.

    removed_conflict counts distinct edges evicted by completed conflicts;
    conflict_multiplicity additionally counts every (conflict, edge) firing,
    so an edge shared by several firing conflicts contributes once to the
    former and once per conflict to the latter. removed_intersect counts
    edges (other than the chosen one) evicted because they meet a newly
    covered vertex.
    """

    step: int
    available_before: int
    chosen_edge: int
    removed_conflict: int
    removed_intersect: int
    conflict_multiplicity: int = 0
    dv_mean: float | None = None
    semiconflict_mean: float | None = None


@dataclass
class RunResult:
    matching: tuple[int, ...]
    stop_reason: str
    trace: list[TraceRecord]
    seed: int
    final_available: int = 0

    def h_series(self) -> list[int]:
        """|H(i)| for i = 0..T, reconstructed from the trace."""
        series = [r.available_before for r in self.trace]
        series.append(self.final_available)
        return series


class ProcessState:
    """Live state of one run: matching, availability, conflict counters.

    The per-conflict matched counter is maintained incrementally; the
    companion available counter is derived on demand by scanning the
    conflict's members, which keeps bulk removals cheap. Both are checked
    against recomputation in the test suite.
    """

    def __init__(self, h: Hypergraph, c: ConflictSystem, seed: int,
                 sample_stats: int = 0):
        if not c.normalized:
            raise InputError(
                "process requires a normalized conflict system "
                "(non-matching conflicts corrupt counter semantics)"
            )
        if c.n_edges != len(h.edges):
            raise InputError("conflict system does not match the host edge count")
        self.h = h
        self.c = c
        self.seed = seed
        self.rng = random.Random(seed)
        self.sample_stats = sample_stats
        ne = len(h.edges)
        self.i = 0
        self.matching: list[int] = []
        self.in_matching = bytearray(ne)
        self.covered = bytearray(h.n)
        self.alive = AliveSet(range(ne), ne)
        self.is_alive = bytearray(b"\x01" * ne)
        self.matched_count = bytearray(c.n_conflicts)
        self.trace: list[TraceRecord] = []

    # -- queries -----------------------------------------------------------

    @property
    def alive_count(self) -> int:
        return len(self.alive)

    def uncovered_degree(self, v: int) -> int:
        """|D_v(i)|: available edges containing the uncovered vertex v."""
        if not (0 <= v < self.h.n):
            raise InputError(f"vertex id {v} out of range")
        if self.covered[v]:
            raise InputError(f"vertex {v} is covered; uncovered degree undefined")
        is_alive = self.is_alive
        return sum(1 for e in self.h.incident_edges(v) if is_alive[e])

    def semiconflict_count(self, e: int) -> int:
        """|C_e^[1](i)|: conflicts through e whose other members are all
        matched except exactly one that is still available."""
        if not (0 <= e < len(self.h.edges)):
            raise InputError(f"edge id {e} out of range")
        if not self.is_alive[e]:
            raise InputError(f"edge {e} is not available")
        c = self.c
        count = 0
        for ci in c.incidence_of(e):
            ci = int(ci)
            n_alive = 0
            n_matched = 0
            for f in c.members(ci):
                if f == e:
                    continue
                if self.in_matching[f]:
                    n_matched += 1
                elif self.is_alive[f]:
                    n_alive += 1
            if n_alive == 1 and n_matched == c.size_of(ci) - 2:
                count += 1
        return count

    def conflict_counts(self, ci: int) -> tuple[int, int]:
        """(matched_count, available_count) for conflict ci; the available
        side is derived by scanning the members."""
        avail = sum(1 for f in self.c.members(ci) if self.is_alive[f])
        return self.matched_count[ci], avail

    # -- dynamics ------------------------------------------------------------

    def step(self):
        """One iteration; returns a TraceRecord, or None when exhausted."""
        if not len(self.alive):
            return None
        self.i += 1
        rng = self.rng
        c = self.c
        is_alive = self.is_alive
        available_before = len(self.alive)
        e = self.alive.sample(rng)

        if self.sample_stats:
            dv_mean, sc_mean = self._sampled_stats()
        else:
            dv_mean = sc_mean = None

        self.matching.append(e)
        self.in_matching[e] = 1

        # conflict evictions: conflicts through e now one edge short,
        # with that edge still available
        removed_conflict = 0
        multiplicity = 0
        matched = self.matched_count
        fired_targets: list[int] = []
        for ci in c.incidence_of(e).tolist():
            m = matched[ci] + 1
            matched[ci] = m
            if m == c.size_of(ci) - 1:
                for f in c.members(ci):
                    if not self.in_matching[f]:
                        fired_targets.append(f)
                        break
        # several conflicts may target the same edge: it leaves once, but
        # the multiplicity counter records every demand that was live at
        # the start of the step
        removed_now: set[int] = set()
        for f in fired_targets:
            if is_alive[f]:
                is_alive[f] = 0
                self.alive.remove(f)
                removed_now.add(f)
                removed_conflict += 1
                multiplicity += 1
            elif f in removed_now:
                multiplicity += 1

        # vertex evictions: everything meeting a vertex of e, including e
        removed_intersect = 0
        for v in self.h.edges[e]:
            self.covered[v] = 1
            for f in self.h.incident_edges(v):
                if is_alive[f]:
                    is_alive[f] = 0
                    self.alive.remove(f)
                    if f != e:
                        removed_intersect += 1

        rec = TraceRecord(
            step=self.i,
            available_before=available_before,
            chosen_edge=e,
            removed_conflict=removed_conflict,
            removed_intersect=removed_intersect,
            conflict_multiplicity=multiplicity,
            dv_mean=dv_mean,
            semiconflict_mean=sc_mean,
        )
        self.trace.append(rec)
        return rec

    def _sampled_stats(self) -> tuple[float | None, float | None]:
        k = self.sample_stats
        uncovered = [v for v in range(self.h.n) if not self.covered[v]]
        dv = None
        if uncovered:
            picks = uncovered if len(uncovered) <= k else uncovered[:: max(1, len(uncovered) // k)][:k]
            dv = sum(self.uncovered_degree(v) for v in picks) / len(picks)
        sc = None
        alive = self.alive.items
        if alive:
            picks = alive if len(alive) <= k else alive[:: max(1, len(alive) // k)][:k]
            sc = sum(self.semiconflict_count(e) for e in picks) / len(picks)
        return dv, sc

    def run(self, target_size: int | None = None, max_steps: int | None = None) -> RunResult:
        """Iterate until the target size, exhaustion, or the step cap.

        The final matching is re-verified to be a conflict-free matching;
        the process guarantees this by construction, so a failure here is a
        defect, not an input condition.
        """
        if target_size is not None:
            cap = self.h.n // self.h.k if self.h.k else 0
            if target_size > cap:
                raise InputError(
                    f"target size {target_size} exceeds floor(n/k) = {cap}"
                )
        if max_steps is None:
            max_steps = self.h.n
        reason = None
        while True:
            if target_size is not None and len(self.matching) >= target_size:
                reason = "target"
                break
            if self.i >= max_steps:
                reason = "max_steps"
                break
            if self.step() is None:
                reason = "exhausted"
                break
        matching = tuple(self.matching)
        if not self.h.is_matching(matching) or not self.c.is_cfree(matching):
            raise RuntimeError(
                "process invariant violated: output not a conflict-free matching"
            )
        return RunResult(
            matching=matching,
            stop_reason=reason,
            trace=self.trace,
            seed=self.seed,
            final_available=len(self.alive),
        )


def init(h: Hypergraph, c: ConflictSystem, seed: int, sample_stats: int = 0) -> ProcessState:
    """Fresh step-0 state: all edges available, counters zeroed, empty trace."""
    return ProcessState(h, c, seed, sample_stats=sample_stats)


def recompute_available(
    h: Hypergraph, c: ConflictSystem, matching: Iterable[int]
) -> tuple[int, ...]:
    """Availability oracle: from scratch, the edges addable to the matching.

    An edge is available iff it is vertex-disjoint from the matching and no
    conflict through it has every other member matched. Independent of the
    incremental bookkeeping in ProcessState; used to audit it.
    """
    m = sorted(set(matching))
    if not h.is_matching(m):
        raise InputError("recompute_available requires a matching")
    if not c.is_cfree(m):
        raise InputError("recompute_available requires a conflict-free matching")
    covered = h.covered_vertices(m)
    in_m = set(m)
    # per-conflict matched multiplicity, via the incidence of matched edges
    threatened: set[int] = set()
    if c.n_conflicts and m:
        counts: dict[int, int] = {}
        for e in m:
            for ci in c.incidence_of(e).tolist():
                counts[ci] = counts.get(ci, 0) + 1
        for ci, cnt in counts.items():
            if cnt == c.size_of(ci) - 1:
                for f in c.members(ci):
                    if f not in in_m:
                        threatened.add(f)
                        break
    out = []
    for eid, e in enumerate(h.edges):
        if eid in in_m or eid in threatened:
            continue
        if any(v in covered for v in e):
            continue
        out.append(eid)
    return tuple(out)


def trace_to_csv(trace: Sequence[TraceRecord]) -> str:
    """Render a trace with the fixed column set, one row per step."""
    lines = ["step,available_before,chosen_edge,removed_conflict,removed_intersect"]
    for r in trace:
        lines.append(
            f"{r.step},{r.available_before},{r.chosen_edge},"
            f"{r.removed_conflict},{r.removed_intersect}"
        )
    return "\n".join(lines) + "\n"
