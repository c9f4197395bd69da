"""Test systems and test functions: trackability and containment statistics.

A j-uniform test system is a collection of j-sets of host edges, each a
matching; a test function assigns weights in [0, 1] to matching j-sets.
Both certify pseudorandomness of the output matching: a well-spread system
should end up with about (|M|/|H|)^j of its tests fully inside the
matching.

The trackability thresholds are asymptotic in the degree scale d; honest
desk-scale systems routinely fail the size condition. Reports therefore
carry a scale_regime flag instead of reinterpreting thresholds.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Mapping, Sequence

from .conflicts import ConditionReport, ConflictSystem
from .errors import InputError
from .hypergraph import Hypergraph
from .process import ProcessState

__all__ = [
    "TestSystem",
    "TestFunction",
    "trackable_check",
    "fn_trackable_check",
    "measure_partial",
    "final_containment",
    "systems_from_function",
]


class TestSystem:
    """Immutable j-uniform system of matching tests over host edge ids."""

    __slots__ = ("j", "tests", "_index")

    def __init__(self, j: int, tests: Iterable[Iterable[int]], h: Hypergraph | None = None):
        if j < 1:
            raise InputError("test uniformity must be >= 1")
        canon = []
        seen = set()
        for t in tests:
            tup = tuple(sorted(t))
            if len(tup) != j or len(set(tup)) != j:
                raise InputError(f"test {tup} is not a {j}-set of distinct edges")
            if tup in seen:
                raise InputError(f"duplicate test {tup}")
            if h is not None and not h.is_matching(tup):
                raise InputError(f"test {tup} is not a matching in the host")
            seen.add(tup)
            canon.append(tup)
        canon.sort()
        self.j = j
        self.tests: tuple[tuple[int, ...], ...] = tuple(canon)
        self._index = seen

    def __len__(self) -> int:
        return len(self.tests)

    def __contains__(self, t) -> bool:
        return tuple(sorted(t)) in self._index

    def to_json(self) -> dict:
        return {"j": self.j, "tests": [list(t) for t in self.tests]}

    @classmethod
    def from_json(cls, obj: dict, h: Hypergraph | None = None) -> "TestSystem":
        return cls(obj["j"], obj["tests"], h)


@dataclass
class TestFunction:
    """Sparse weight function on matching j-sets; absent sets weigh 0."""

    j: int
    weights: dict[tuple[int, ...], float] = field(default_factory=dict)

    def __post_init__(self):
        canon = {}
        for key, w in self.weights.items():
            tup = tuple(sorted(key))
            if len(tup) != self.j or len(set(tup)) != self.j:
                raise InputError(f"support set {tup} is not a {self.j}-set")
            if not (0 <= w <= 1):
                raise InputError(f"weight {w} outside [0, 1]")
            canon[tup] = float(w)
        self.weights = canon

    def check_matchings(self, h: Hypergraph) -> None:
        for tup, w in self.weights.items():
            if w > 0 and not h.is_matching(tup):
                raise InputError(f"nonzero weight on non-matching {tup}")

    def total(self) -> float:
        return sum(self.weights.values())

    def __call__(self, E: Iterable[int]) -> float:
        """Extension to arbitrary edge sets: sum over j-subsets."""
        ids = sorted(set(E))
        return sum(
            self.weights.get(sub, 0.0) for sub in combinations(ids, self.j)
        )


# -- trackability ---------------------------------------------------------------


def _link_overlap(c: ConflictSystem, e: int, f: int, jp: int) -> int:
    return len(c.link_of(e, jp) & c.link_of(f, jp))


def trackable_check(
    z: TestSystem,
    d: float,
    eps: float,
    c: ConflictSystem,
    ell: int | None = None,
) -> list[ConditionReport]:
    """Four verdicts: size, codegree spread, pairwise link overlap, and
    conflict-freeness of every test. Pair enumeration for the overlap
    condition is restricted to pairs co-occurring in some test."""
    if ell is None:
        ell = max(c.max_size(), 2)
    j = z.j
    reports = []

    size = len(z)
    thr1 = d ** (j + eps)
    reports.append(
        ConditionReport(
            "Z1", size >= thr1, float(size), thr1,
            {"scale_regime": size < thr1 and size > 0},
        )
    )

    worst2 = None
    for jp in range(1, j):
        counts: dict[tuple[int, ...], int] = {}
        for t in z.tests:
            for sub in combinations(t, jp):
                counts[sub] = counts.get(sub, 0) + 1
        if not counts:
            continue
        sub, measured = max(counts.items(), key=lambda kv: kv[1])
        thr = size / d ** (jp + eps)
        cand = (measured - thr, measured, thr, {"j_prime": jp, "subset": sub})
        if worst2 is None or cand[0] > worst2[0]:
            worst2 = cand
    if worst2 is None:
        reports.append(ConditionReport("Z2", True, 0.0, size / d ** (1 + eps), None))
    else:
        _, measured, thr, wit = worst2
        reports.append(ConditionReport("Z2", measured <= thr, float(measured), thr, wit))

    pairs = set()
    for t in z.tests:
        pairs.update(combinations(t, 2))
    worst3 = None
    for e, f in sorted(pairs):
        for jp in range(1, ell):
            ov = _link_overlap(c, e, f, jp)
            thr = d ** (jp - eps)
            cand = (ov - thr, ov, thr, {"e": e, "f": f, "j_prime": jp})
            if worst3 is None or cand[0] > worst3[0]:
                worst3 = cand
    if worst3 is None:
        reports.append(ConditionReport("Z3", True, 0.0, d ** (1 - eps), None))
    else:
        _, ov, thr, wit = worst3
        reports.append(ConditionReport("Z3", ov <= thr, float(ov), thr, wit))

    bad = next((t for t in z.tests if not c.is_cfree(t)), None)
    reports.append(
        ConditionReport("Z4", bad is None, 0.0 if bad is None else 1.0, 0.0, bad)
    )
    return reports


def fn_trackable_check(
    w: TestFunction,
    d: float,
    eps: float,
    c: ConflictSystem,
    ell: int | None = None,
) -> list[ConditionReport]:
    """Test-function analogue of trackable_check (weights replace counts)."""
    if ell is None:
        ell = max(c.max_size(), 2)
    j = w.j
    reports = []
    total = w.total()
    thr1 = d ** (j + eps)
    reports.append(
        ConditionReport(
            "W1", total >= thr1, total, thr1,
            {"scale_regime": 0 < total < thr1},
        )
    )

    worst2 = None
    for jp in range(1, j):
        acc: dict[tuple[int, ...], float] = {}
        for t, wt in w.weights.items():
            if wt == 0:
                continue
            for sub in combinations(t, jp):
                acc[sub] = acc.get(sub, 0.0) + wt
        if not acc:
            continue
        sub, measured = max(acc.items(), key=lambda kv: kv[1])
        thr = total / d ** (jp + eps)
        cand = (measured - thr, measured, thr, {"j_prime": jp, "subset": sub})
        if worst2 is None or cand[0] > worst2[0]:
            worst2 = cand
    if worst2 is None:
        reports.append(ConditionReport("W2", True, 0.0, total / d ** (1 + eps), None))
    else:
        _, measured, thr, wit = worst2
        reports.append(ConditionReport("W2", measured <= thr, measured, thr, wit))

    pairs = set()
    for t, wt in w.weights.items():
        if wt > 0:
            pairs.update(combinations(t, 2))
    worst3 = None
    for e, f in sorted(pairs):
        for jp in range(1, ell):
            ov = _link_overlap(c, e, f, jp)
            thr = d ** (jp - eps)
            cand = (ov - thr, ov, thr, {"e": e, "f": f, "j_prime": jp})
            if worst3 is None or cand[0] > worst3[0]:
                worst3 = cand
    if worst3 is None:
        reports.append(ConditionReport("W3", True, 0.0, d ** (1 - eps), None))
    else:
        _, ov, thr, wit = worst3
        reports.append(ConditionReport("W3", ov <= thr, float(ov), thr, wit))

    bad = next(
        (t for t, wt in w.weights.items() if wt > 0 and not c.is_cfree(t)), None
    )
    reports.append(
        ConditionReport("W4", bad is None, 0.0 if bad is None else 1.0, 0.0, bad)
    )
    return reports


# -- measurements -----------------------------------------------------------------


def measure_partial(z: TestSystem, state: ProcessState, s: int) -> int:
    """|Z^[s](i)|: tests with exactly s members available and the rest matched."""
    if not (0 <= s <= z.j):
        raise InputError(f"s = {s} outside [0, {z.j}]")
    alive = state.is_alive
    matched = state.in_matching
    count = 0
    for t in z.tests:
        n_alive = 0
        ok = True
        for e in t:
            if alive[e]:
                n_alive += 1
                if n_alive > s:
                    ok = False
                    break
            elif not matched[e]:
                ok = False
                break
        if ok and n_alive == s:
            count += 1
    return count


def final_containment(z: TestSystem, matching: Iterable[int], h: Hypergraph) -> dict:
    """Fully contained test count against the density heuristic.

    expected = (|M|/|H|)^j |Z|; ratio is None when expected is 0 rather
    than a fabricated number.
    """
    m = set(matching)
    if not h.is_matching(m):
        raise InputError("final_containment requires a matching")
    count = sum(1 for t in z.tests if all(e in m for e in t))
    n_edges = len(h.edges)
    expected = (len(m) / n_edges) ** z.j * len(z) if n_edges else 0.0
    ratio = count / expected if expected > 0 else None
    return {
        "j": z.j,
        "size": len(z),
        "count": count,
        "expected": expected,
        "ratio": ratio,
    }


def systems_from_function(
    w: TestFunction, z_count: int, seed: int
) -> tuple[list[TestSystem], "SystemWeightEvaluator"]:
    """Sample z_count independent systems, each keeping every support set
    with its own weight as probability; returns the systems and the
    averaged containment-count evaluator that estimates w on edge sets."""
    if z_count < 1:
        raise InputError("z_count must be >= 1")
    rng = random.Random(seed)
    support = sorted(w.weights.items())
    systems = []
    for _ in range(z_count):
        tests = [t for t, wt in support if wt > 0 and rng.random() < wt]
        systems.append(TestSystem(w.j, tests))
    return systems, SystemWeightEvaluator(systems, w.j)


class SystemWeightEvaluator:
    """Estimates a test function from sampled systems: w_Z(E) / z."""

    def __init__(self, systems: Sequence[TestSystem], j: int):
        self.systems = list(systems)
        self.j = j

    def total_weight(self, E: Iterable[int]) -> int:
        ids = sorted(set(E))
        total = 0
        for sub in combinations(ids, self.j):
            for z in self.systems:
                if sub in z:
                    total += 1
        return total

    def __call__(self, E: Iterable[int]) -> float:
        return self.total_weight(E) / len(self.systems)
