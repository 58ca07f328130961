"""Attractor computation and the +inf classification it induces.

Backward fixpoint with per-Max-vertex out-degree counters, O(V + E).
Ranks are the rounds of the attractor recurrence; they drive the
deterministic reach strategy for Min and avoid strategy for Max.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable

from .arena import Arena, Objective, Player


@dataclass(frozen=True)
class AttractorResult:
    attracted: FrozenSet[int]
    rank: Dict[int, int]
    min_reach: Dict[int, int]
    max_avoid: Dict[int, int]


def compute_attractor(arena: Arena, from_set: Iterable[int]) -> AttractorResult:
    """Least set from which Min forces reaching ``from_set``.

    ``min_reach`` maps attracted Min vertices (outside the seed) to a
    successor of strictly smaller rank, ties broken by smallest rank then
    smallest index.  ``max_avoid`` maps unattracted Max vertices to a
    successor outside the attractor, smallest index first.
    """
    seed = sorted(set(from_set))
    preds: list = [[] for _ in range(arena.n)]
    for s, d, _ in arena.edges:
        preds[d].append(s)
    counters = [len(arena.successors(v)) for v in range(arena.n)]
    rank = {v: 0 for v in seed}
    layer = list(seed)
    level = 0
    while layer:
        level += 1
        nxt = []
        for v in layer:
            for u in preds[v]:
                if u in rank:
                    continue
                if arena.owners[u] is Player.MIN:
                    rank[u] = level
                    nxt.append(u)
                else:
                    counters[u] -= 1
                    if counters[u] == 0:
                        rank[u] = level
                        nxt.append(u)
        layer = nxt
    attracted = frozenset(rank)
    min_reach: Dict[int, int] = {}
    for v in attracted:
        if arena.owners[v] is Player.MIN and rank[v] > 0:
            best = min(
                (rank[d], d)
                for d, _ in arena.successors(v)
                if d in rank and rank[d] < rank[v]
            )
            min_reach[v] = best[1]
    max_avoid: Dict[int, int] = {}
    for v in range(arena.n):
        if v not in attracted and arena.owners[v] is Player.MAX:
            max_avoid[v] = next(d for d, _ in arena.successors(v) if d not in attracted)
    return AttractorResult(attracted, rank, min_reach, max_avoid)


def classify_plus_infinity(arena: Arena) -> FrozenSet[int]:
    """Vertices whose min-cost reachability value is +inf."""
    if arena.objective is not Objective.MCR:
        raise ValueError("classification needs an MCR arena")
    result = compute_attractor(arena, arena.targets)
    return frozenset(range(arena.n)) - result.attracted
