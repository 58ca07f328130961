"""Brute-force reference solvers, independent of the value-iteration path.

Game values are recovered from first principles: enumerate memoryless
strategies (optimal ones exist for the payoffs handled here), resolve each
one-player rest either by Bellman-Ford shortest paths (reachability) or by
simulating the unique ultimately-periodic outcome (total/mean payoff).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from .arena import Arena, Objective, Player, ValueVector
from .extvalue import ExtValue, MINUS_INF, PLUS_INF, ext_add

STRATEGY_SPACE_CAP = 10**7


class TooManyStrategiesError(ValueError):
    pass


@dataclass(frozen=True)
class Lasso:
    """Ultimately periodic play: finite prefix then a repeated cycle."""

    prefix: Tuple[int, ...]
    cycle: Tuple[int, ...]

    def __post_init__(self) -> None:
        if not self.cycle:
            raise ValueError("lasso cycle must be nonempty")


def tp_of_prefix(arena: Arena, play: Sequence[int]) -> int:
    """Sum of edge weights along a finite play; the empty play sums to 0."""
    total = 0
    for a, b in zip(play, play[1:]):
        total = ext_add(total, arena.weight(a, b))
    return total


def check_lasso(arena: Arena, lasso: Lasso) -> None:
    seq = list(lasso.prefix) + list(lasso.cycle)
    for a, b in zip(seq, seq[1:]):
        if not arena.has_edge(a, b):
            raise ValueError(f"lasso uses missing edge {a}->{b}")
    if not arena.has_edge(lasso.cycle[-1], lasso.cycle[0]):
        raise ValueError("lasso cycle does not close")


def payoff_of_lasso(arena: Arena, lasso: Lasso, kind: Objective | str) -> ExtValue:
    """Payoff of the infinite play prefix . cycle^omega.

    TP: +inf/-inf by the sign of the cycle sum; for a zero cycle the liminf
    is the sum at cycle entry plus the least partial sum within one period.
    MP: exact cycle mean (a Fraction).
    MCR: prefix sum up to the first target visit, +inf if the play misses
    the targets.
    """
    check_lasso(arena, lasso)
    kind = kind.value if isinstance(kind, Objective) else kind
    if kind == "mcr":
        seq = list(lasso.prefix) + list(lasso.cycle)
        for i, v in enumerate(seq):
            if arena.is_target(v):
                return tp_of_prefix(arena, seq[: i + 1])
        return PLUS_INF
    if kind == "mp":
        return mp_of_lasso(arena, lasso)
    if kind != "tp":
        raise ValueError(f"unknown payoff kind {kind!r}")
    closing = list(lasso.cycle) + [lasso.cycle[0]]
    cycle_sum = tp_of_prefix(arena, closing)
    if cycle_sum > 0:
        return PLUS_INF
    if cycle_sum < 0:
        return MINUS_INF
    entry = tp_of_prefix(arena, list(lasso.prefix) + [lasso.cycle[0]])
    partial = 0
    least = 0
    for a, b in zip(closing, closing[1:]):
        partial += arena.weight(a, b)
        least = min(least, partial)
    return entry + least


def mp_of_lasso(arena: Arena, lasso: Lasso) -> Fraction:
    check_lasso(arena, lasso)
    closing = list(lasso.cycle) + [lasso.cycle[0]]
    return Fraction(tp_of_prefix(arena, closing), len(lasso.cycle))


def _owned(arena: Arena, player: Player) -> List[int]:
    return [v for v in range(arena.n) if arena.owners[v] is player]


def enumerate_memoryless(arena: Arena, player: Player) -> Iterator[Dict[int, int]]:
    """All memoryless choice maps for one player, lexicographic by successor."""
    owned = _owned(arena, player)
    space = 1
    for v in owned:
        space *= len(arena.successors(v))
        if space > STRATEGY_SPACE_CAP:
            raise TooManyStrategiesError(f"more than {STRATEGY_SPACE_CAP} strategies")
    options = [arena.successor_ids(v) for v in owned]
    for combo in itertools.product(*options):
        yield dict(zip(owned, combo))


def outcome_lasso(
    arena: Arena, sigma_max: Dict[int, int], sigma_min: Dict[int, int], start: int
) -> Lasso:
    """Unique outcome of a memoryless profile, as a lasso."""
    seen: Dict[int, int] = {}
    seq: List[int] = []
    v = start
    while v not in seen:
        seen[v] = len(seq)
        seq.append(v)
        v = sigma_max[v] if arena.owners[v] is Player.MAX else sigma_min[v]
    cut = seen[v]
    return Lasso(tuple(seq[:cut]), tuple(seq[cut:]))


def _restricted_succ(arena: Arena, sigma_max: Dict[int, int]) -> List[List[Tuple[int, int]]]:
    succ: List[List[Tuple[int, int]]] = []
    for v in range(arena.n):
        if arena.owners[v] is Player.MAX:
            d = sigma_max[v]
            succ.append([(d, arena.weight(v, d))])
        else:
            succ.append(list(arena.successors(v)))
    return succ


def min_cost_reach(
    n: int,
    succ: Sequence[Sequence[Tuple[int, int]]],
    targets: frozenset,
) -> List[ExtValue]:
    """One-player minimum cost to the target set.

    Bellman-Ford backward from the targets with |V| relaxation rounds; a
    vertex still improvable afterwards reaches a negative cycle that also
    reaches a target, hence -inf.  Unreachable vertices stay +inf.
    """
    dist: List[ExtValue] = [0 if v in targets else PLUS_INF for v in range(n)]
    for _ in range(n):
        new = list(dist)
        for v in range(n):
            if v in targets:
                continue
            for d, w in succ[v]:
                cand = ext_add(w, dist[d])
                if cand < new[v]:
                    new[v] = cand
        dist = new
    tainted = [False] * n
    for _ in range(n):
        changed = False
        for v in range(n):
            if v in targets or tainted[v]:
                continue
            for d, w in succ[v]:
                if tainted[d] or ext_add(w, dist[d]) < dist[v]:
                    tainted[v] = True
                    changed = True
                    break
        if not changed:
            break
    return [MINUS_INF if tainted[v] else dist[v] for v in range(n)]


def mcr_oracle(arena: Arena) -> ValueVector:
    """Reference solve: pointwise max over Max's memoryless strategies of
    Min's one-player best reply."""
    if arena.objective is not Objective.MCR:
        raise ValueError("mcr_oracle expects an MCR arena")
    best: Optional[List[ExtValue]] = None
    for sigma in enumerate_memoryless(arena, Player.MAX):
        succ = _restricted_succ(arena, sigma)
        vals = min_cost_reach(arena.n, succ, arena.targets)
        if best is None:
            best = vals
        else:
            best = [max(a, b) for a, b in zip(best, vals)]
    assert best is not None
    return ValueVector(arena, best)


def _max_min_over_profiles(arena: Arena, payoff) -> List:
    maxes = list(enumerate_memoryless(arena, Player.MAX))
    mins = list(enumerate_memoryless(arena, Player.MIN))
    if len(maxes) * len(mins) > STRATEGY_SPACE_CAP:
        raise TooManyStrategiesError("profile space too large")
    out = []
    for v in range(arena.n):
        best = None
        for sm in maxes:
            worst = None
            for sn in mins:
                p = payoff(outcome_lasso(arena, sm, sn, v))
                if worst is None or p < worst:
                    worst = p
            if best is None or worst > best:
                best = worst
        out.append(best)
    return out


def tp_oracle(arena: Arena) -> ValueVector:
    """Reference total-payoff values over all memoryless profiles."""
    vals = _max_min_over_profiles(arena, lambda l: payoff_of_lasso(arena, l, "tp"))
    return ValueVector(arena, vals)


def mp_oracle(arena: Arena) -> List[Fraction]:
    """Reference exact mean-payoff values over all memoryless profiles."""
    return _max_min_over_profiles(arena, lambda l: mp_of_lasso(arena, l))
