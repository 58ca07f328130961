"""Strategy extraction, representation, simulation, and verification.

Three strategy shapes: memoryless maps, finite Moore machines, and the
two-phase switching strategy for Min (play an almost-perfect memoryless
strategy, track the running sum, hand over to the attractor strategy once
the accumulated debt pays for the dash to the target).

Moore-machine convention used throughout this package: the machine absorbs
every vertex of the play including the first, i.e. memory after v0..vk is
up(...up(up(m0, v0), v1)..., vk), and the decision at vk reads that memory.
This lets machines track edge weights by carrying the previous vertex in
their state.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Callable, Dict, Hashable, List, Optional, Tuple, Union

from .arena import Arena, Objective, Player, ValueVector
from .attractor import compute_attractor
from .extvalue import ExtValue, MINUS_INF, PLUS_INF, ext_add, is_finite
from .mcr import McrResult
from .oracle import (
    Lasso,
    TooManyStrategiesError,
    enumerate_memoryless,
    min_cost_reach,
    payoff_of_lasso,
    tp_of_prefix,
)

PRODUCT_CAP = 10**6


@dataclass(frozen=True)
class MemorylessStrategy:
    player: Player
    choice: Dict[int, int]

    def decision(self, v: int) -> int:
        return self.choice[v]


@dataclass
class MooreStrategy:
    player: Player
    initial: Hashable
    update: Callable[[Hashable, int], Hashable]
    decide: Callable[[Hashable, int], int]
    size: Optional[int] = None

    @staticmethod
    def of_memoryless(strategy: MemorylessStrategy) -> "MooreStrategy":
        return MooreStrategy(
            player=strategy.player,
            initial=0,
            update=lambda m, v: 0,
            decide=lambda m, v: strategy.choice[v],
            size=1,
        )


AnyStrategy = Union[MemorylessStrategy, MooreStrategy, "SwitchingStrategy"]


def _as_moore(strategy: AnyStrategy) -> MooreStrategy:
    if isinstance(strategy, MooreStrategy):
        return strategy
    if isinstance(strategy, MemorylessStrategy):
        return MooreStrategy.of_memoryless(strategy)
    if isinstance(strategy, SwitchingStrategy):
        return strategy.as_moore()
    raise TypeError(f"not a strategy: {strategy!r}")


def _move(arena: Arena, machine: MooreStrategy, m: Hashable, v: int) -> int:
    """Machine's move at v; forced vertices fall back to their only edge."""
    try:
        return machine.decide(m, v)
    except KeyError:
        succs = arena.successor_ids(v)
        if len(succs) == 1:
            return succs[0]
        raise


def extract_max_memoryless(arena: Arena, values: ValueVector) -> MemorylessStrategy:
    """Max's memoryless optimum from solved values.

    Finite or -inf vertices take an argmax successor of weight + value;
    vertices valued +inf keep the play outside the target's attractor.
    Ties break to the smallest successor index.
    """
    avoid = compute_attractor(arena, arena.targets).max_avoid
    choice: Dict[int, int] = {}
    for v in range(arena.n):
        if arena.owners[v] is not Player.MAX or arena.is_target(v):
            continue
        if values[v] is PLUS_INF and v in avoid:
            choice[v] = avoid[v]
            continue
        best = None
        for d, w in arena.successors(v):
            cand = ext_add(w, values[d])
            if best is None or cand > best[0]:
                best = (cand, d)
        choice[v] = best[1]
    return MemorylessStrategy(Player.MAX, choice)


class TraceMissingError(ValueError):
    pass


def extract_min_mcr(
    arena: Arena, result: McrResult
) -> Tuple[MemorylessStrategy, MemorylessStrategy, MooreStrategy]:
    """Min's strategy trio from a traced reachability solve.

    sigma1 records, per vertex, the argmin against the iterate preceding
    its last strict decrease; sigma2 is the attractor reach strategy
    (completed by sigma1 off the attractor); the Moore strategy counts play
    length m and plays the argmin against iterate x_{sweeps - m - 1} (the
    rewind rule), reaching the target within `sweeps` steps at optimal cost.
    """
    if result.trace is None:
        raise TraceMissingError("solve_mcr must be run with with_trace=True")
    trace = result.trace.vectors
    sweeps = result.stats.sweeps
    att = compute_attractor(arena, arena.targets)

    def argmin_against(v: int, vec: ValueVector) -> int:
        best = None
        for d, w in arena.successors(v):
            cand = ext_add(w, vec[d])
            if best is None or cand < best[0]:
                best = (cand, d)
        return best[1]

    def argmin_progressing(v: int, vec: ValueVector) -> int:
        # Value ties break toward the successor closest to the target, so
        # the rewind machine never idles in a zero-weight cycle.
        best = None
        for d, w in arena.successors(v):
            key = (ext_add(w, vec[d]), att.rank.get(d, arena.n + 1), d)
            if best is None or key < best:
                best = key
        return best[2]

    choice1: Dict[int, int] = {}
    for v in range(arena.n):
        if arena.owners[v] is not Player.MIN or arena.is_target(v):
            continue
        last_change = 0
        for i in range(1, len(trace)):
            if trace[i][v] != trace[i - 1][v]:
                last_change = i
        against = trace[last_change - 1] if last_change > 0 else trace[-1]
        choice1[v] = argmin_against(v, against)
    sigma1 = MemorylessStrategy(Player.MIN, choice1)

    choice2 = dict(choice1)
    choice2.update(att.min_reach)
    sigma2 = MemorylessStrategy(Player.MIN, choice2)

    top = sweeps + 1  # memory saturates here; play length sweeps and beyond

    def decide(m: int, v: int) -> int:
        if arena.owners[v] is not Player.MIN or arena.is_target(v):
            return arena.successor_ids(v)[0]
        edges_so_far = m - 1  # memory has absorbed m vertices
        if 0 <= edges_so_far < sweeps:
            return argmin_progressing(v, trace[sweeps - edges_so_far - 1])
        return argmin_progressing(v, trace[0])

    min_vertices = [
        v
        for v in range(arena.n)
        if arena.owners[v] is Player.MIN and not arena.is_target(v)
    ]
    rows = {tuple(decide(m, v) for v in min_vertices) for m in range(1, top + 1)}
    if len(rows) <= 1:
        sigma_star = MooreStrategy(
            Player.MIN, 0, lambda m, v: 0, lambda m, v: decide(1, v), size=1
        )
    else:
        sigma_star = MooreStrategy(
            Player.MIN,
            0,
            lambda m, v: min(m + 1, top),
            decide,
            size=top + 1,
        )
    return sigma1, sigma2, sigma_star


@dataclass
class SwitchingStrategy:
    """Follow sigma1 and the running sum; once a prefix satisfies
    sum <= goal(start) - cost2(here), switch to sigma2 for good.

    ``goal`` is the solved value of the start vertex, or the explicit
    threshold for starts valued -inf.  ``cost2`` is what sigma2 guarantees
    against any adversary.  The condition is checked at every vertex;
    switching early never hurts and pure-Min arenas have no other chance
    to switch.
    """

    arena: Arena
    sigma1: MemorylessStrategy
    sigma2: MemorylessStrategy
    values: ValueVector
    cost2: List[ExtValue]
    threshold: Optional[int] = None
    _sum_floor: int = field(init=False, default=0)

    def __post_init__(self) -> None:
        finite_goals = [v for v in self.values if is_finite(v)]
        if self.threshold is not None:
            finite_goals.append(self.threshold)
        lo = min(finite_goals, default=0)
        hi = max(finite_goals, default=0)
        c2_lo = min((c for c in self.cost2 if is_finite(c)), default=0)
        c2_hi = max((c for c in self.cost2 if is_finite(c)), default=0)
        n = self.arena.n
        w = max((abs(e[2]) for e in self.arena.edges), default=0)
        # Outside this window the exact sum no longer influences any future
        # switch decision, so clamping keeps the memory finite.
        self._sum_floor = min(lo - c2_hi, 0) - (n + 1) * w - 1
        self._sum_ceiling = max(hi - c2_lo, 0) + (n + 1) * w + 1

    def goal(self, start: int) -> ExtValue:
        g = self.values[start]
        if g is MINUS_INF:
            if self.threshold is None:
                raise ValueError("starts valued -inf need an explicit threshold")
            return self.threshold
        return g

    def switchable(self, start: int, here: int, running_sum: int) -> bool:
        goal = self.goal(start)
        if goal is PLUS_INF:
            return True
        c2 = self.cost2[here]
        if not is_finite(c2):
            return False
        return running_sum <= goal - c2

    def as_moore(self) -> MooreStrategy:
        """Finite encoding: (previous vertex, start vertex, clamped running
        sum) before the switch, a single absorbing state afterwards."""
        arena = self.arena
        switched_state = "switched"

        def up(m: Hashable, v: int) -> Hashable:
            if m is switched_state:
                return m
            if m is None:
                start, s = v, 0
            else:
                prev, start, s = m
                s = s + arena.weight(prev, v)
                s = max(min(s, self._sum_ceiling), self._sum_floor)
            if self.switchable(start, v, s):
                return switched_state
            return (v, start, s)

        def decide(m: Hashable, v: int) -> int:
            if arena.owners[v] is not Player.MIN or arena.is_target(v):
                return arena.successor_ids(v)[0]
            if m is switched_state:
                return self.sigma2.choice[v]
            return self.sigma1.choice[v]

        return MooreStrategy(Player.MIN, None, up, decide)


def make_switching(
    sigma1: MemorylessStrategy,
    sigma2: MemorylessStrategy,
    values: ValueVector,
    arena: Arena,
    threshold: Optional[int] = None,
) -> SwitchingStrategy:
    cost2 = list(best_response(arena, sigma2).values)
    return SwitchingStrategy(arena, sigma1, sigma2, values, cost2, threshold)


def project_tp_min(arena: Arena, gy_sigma1: MemorylessStrategy) -> MemorylessStrategy:
    """Project a stop-request-game strategy back onto the original arena.

    Relies on the build_game_Y layout (interior of v sits at index n + v):
    a choice v -> interior(v') becomes v -> v'.
    """
    n = arena.n
    choice: Dict[int, int] = {}
    for v in range(n):
        if arena.owners[v] is Player.MIN and v in gy_sigma1.choice:
            choice[v] = gy_sigma1.choice[v] - n
    return MemorylessStrategy(Player.MIN, choice)


def play_out(
    arena: Arena,
    sigma_max: AnyStrategy,
    sigma_min: AnyStrategy,
    start: int,
    max_steps: Optional[int] = None,
    kind: Optional[Union[Objective, str]] = None,
) -> Tuple[Lasso, ExtValue]:
    """Simulate the unique outcome of a strategy profile.

    Stops at the first repeated (vertex, memories) triple, or at the first
    target visit when scoring reachability, and returns the resulting play
    with its payoff.
    """
    mm = _as_moore(sigma_max)
    mn = _as_moore(sigma_min)
    kind = kind if kind is not None else arena.objective
    kind = kind.value if isinstance(kind, Objective) else kind
    if max_steps is None:
        max_steps = 10**6
    seen: Dict[Tuple, int] = {}
    seq: List[int] = []
    v = start
    state_max, state_min = mm.initial, mn.initial
    for _ in range(max_steps + 1):
        state_max = mm.update(state_max, v)
        state_min = mn.update(state_min, v)
        key = (v, state_max, state_min)
        if key in seen:
            cut = seen[key]
            lasso = Lasso(tuple(seq[:cut]), tuple(seq[cut:]))
            return lasso, payoff_of_lasso(arena, lasso, kind)
        seen[key] = len(seq)
        seq.append(v)
        if kind == "mcr" and arena.is_target(v):
            lasso = Lasso(tuple(seq[:-1]), (v,))
            return lasso, tp_of_prefix(arena, seq)
        nxt = (
            _move(arena, mm, state_max, v)
            if arena.owners[v] is Player.MAX
            else _move(arena, mn, state_min, v)
        )
        if not arena.has_edge(v, nxt):
            raise ValueError(
                f"strategy chose a missing edge {arena.names[v]}->{arena.names[nxt]}"
            )
        v = nxt
    raise RuntimeError("step budget exceeded without a lasso or target")


def _product_reach(
    arena: Arena, fixed: MooreStrategy, starts: List[Tuple[int, Hashable]]
) -> Tuple[List[Tuple[int, Hashable]], Dict[Tuple[int, Hashable], List[Tuple[int, Hashable, int]]]]:
    """Reachable product of the arena with the fixed player's machine."""
    succ: Dict[Tuple[int, Hashable], List[Tuple[int, Hashable, int]]] = {}
    stack = list(starts)
    seen = set(stack)
    while stack:
        node = stack.pop()
        v, m = node
        if arena.owners[v] is fixed.player and not arena.is_target(v):
            moves = [_move(arena, fixed, m, v)]
        else:
            moves = list(arena.successor_ids(v))
        out = []
        for d in moves:
            child = (d, fixed.update(m, d))
            out.append((child[0], child[1], arena.weight(v, d)))
            if child not in seen:
                seen.add(child)
                stack.append(child)
        succ[node] = out
        if len(seen) > PRODUCT_CAP:
            raise ValueError("product of arena and strategy memory too large")
    return sorted(seen, key=lambda nd: (nd[0], repr(nd[1]))), succ


def best_response(arena: Arena, fixed: AnyStrategy) -> ValueVector:
    """Exact reachability value of a fixed strategy, per start vertex.

    Fixed Min: the free Max player maximizes; +inf where Max can dodge the
    target forever, otherwise backward induction over the (provably
    acyclic) attracted region of the product.  Fixed Max: the free Min
    player solves one-player shortest paths with -inf through profitable
    cycles.
    """
    machine = _as_moore(fixed)
    starts = [(v, machine.update(machine.initial, v)) for v in range(arena.n)]
    nodes, succ = _product_reach(arena, machine, starts)
    node_ix = {nd: i for i, nd in enumerate(nodes)}
    targets = frozenset(i for i, (v, _) in enumerate(nodes) if arena.is_target(v))
    succ_ix: List[List[Tuple[int, int]]] = [
        [(node_ix[(d, m2)], w) for d, m2, w in succ[nd]] for nd in nodes
    ]
    if machine.player is Player.MAX:
        vals = min_cost_reach(len(nodes), succ_ix, targets)
    else:
        vals = _max_reach_values(arena, nodes, succ_ix, targets)
    return ValueVector(arena, [vals[node_ix[s]] for s in starts])


def _max_reach_values(
    arena: Arena,
    nodes: List[Tuple[int, Hashable]],
    succ_ix: List[List[Tuple[int, int]]],
    targets: frozenset,
) -> List[ExtValue]:
    n = len(nodes)
    free_max = [arena.owners[nodes[i][0]] is Player.MAX for i in range(n)]
    preds: List[List[int]] = [[] for _ in range(n)]
    for i, out in enumerate(succ_ix):
        for j, _ in out:
            preds[j].append(i)
    counters = [len(out) for out in succ_ix]
    attracted = set(targets)
    layer = list(targets)
    while layer:
        nxt = []
        for j in layer:
            for i in preds[j]:
                if i in attracted:
                    continue
                if not free_max[i]:
                    attracted.add(i)
                    nxt.append(i)
                else:
                    counters[i] -= 1
                    if counters[i] == 0:
                        attracted.add(i)
                        nxt.append(i)
        layer = nxt
    # Inside the attracted region every play reaches a target, so the
    # region minus the targets is acyclic and longest paths are defined.
    vals: List[Optional[ExtValue]] = [None] * n
    for j in targets:
        vals[j] = 0
    order: List[int] = []
    marks = [0] * n  # 0 unvisited, 1 on path, 2 done
    for root in range(n):
        if root not in attracted or marks[root] != 0 or root in targets:
            continue
        stack = [(root, iter(succ_ix[root]))]
        marks[root] = 1
        while stack:
            i, it = stack[-1]
            advanced = False
            for j, _ in it:
                if j in targets or j not in attracted:
                    continue
                if marks[j] == 1:
                    raise AssertionError("cycle inside the attracted region")
                if marks[j] == 0:
                    marks[j] = 1
                    stack.append((j, iter(succ_ix[j])))
                    advanced = True
                    break
            if not advanced:
                marks[i] = 2
                order.append(i)
                stack.pop()
    for i in order:
        best = None
        for j, w in succ_ix[i]:
            if j not in attracted:
                continue
            cand = ext_add(w, vals[j])
            if best is None or cand > best:
                best = cand
        vals[i] = best
    return [PLUS_INF if vals[i] is None else vals[i] for i in range(n)]


def extract_max_tp(arena: Arena, values: ValueVector) -> MemorylessStrategy:
    """Max's memoryless optimum for a total-payoff game.

    One-step argmax against the values underdetermines the choice (distinct
    zero cycles can tie), so value-preserving choice combinations are
    searched and certified against Min's enumerated memoryless replies.
    """
    owned = [
        v
        for v in range(arena.n)
        if arena.owners[v] is Player.MAX and not arena.is_target(v)
    ]
    option_sets = []
    for v in owned:
        opts = []
        for d, w in arena.successors(v):
            if not is_finite(values[v]) or ext_add(w, values[d]) == values[v]:
                opts.append(d)
        option_sets.append(opts or list(arena.successor_ids(v)))
    space = 1
    for opts in option_sets:
        space *= len(opts)
        if space > 10**5:
            raise TooManyStrategiesError("too many candidate Max strategies")
    mins = [
        MemorylessStrategy(Player.MIN, tau)
        for tau in enumerate_memoryless(arena, Player.MIN)
    ]
    for combo in itertools.product(*option_sets):
        sigma = MemorylessStrategy(Player.MAX, dict(zip(owned, combo)))
        ok = True
        for v in range(arena.n):
            worst = None
            for tau in mins:
                _, p = play_out(arena, sigma, tau, v, kind="tp")
                if worst is None or p < worst:
                    worst = p
            if worst != values[v]:
                ok = False
                break
        if ok:
            return sigma
    raise RuntimeError("no value-preserving memoryless Max strategy found")


def strategy_json(strategy: AnyStrategy, arena: Arena) -> bytes:
    """Deterministic JSON rendering of a strategy."""
    if isinstance(strategy, MemorylessStrategy):
        doc = {
            "player": strategy.player.value,
            "kind": "memoryless",
            "choice": {
                arena.names[v]: arena.names[d]
                for v, d in sorted(strategy.choice.items())
            },
        }
    elif isinstance(strategy, SwitchingStrategy):
        doc = {
            "player": "min",
            "kind": "switching",
            "sigma1": {
                arena.names[v]: arena.names[d]
                for v, d in sorted(strategy.sigma1.choice.items())
            },
            "sigma2": {
                arena.names[v]: arena.names[d]
                for v, d in sorted(strategy.sigma2.choice.items())
            },
        }
    elif isinstance(strategy, MooreStrategy):
        doc = {
            "player": strategy.player.value,
            "kind": "moore",
            "memory_size": strategy.size,
        }
        if strategy.size is not None and strategy.size <= 4096:
            table = {}
            for m in range(strategy.size):
                row = {}
                for v in range(arena.n):
                    if arena.owners[v] is strategy.player and not arena.is_target(v):
                        row[arena.names[v]] = arena.names[strategy.decide(m, v)]
                table[str(m)] = row
            doc["decision"] = table
    else:
        raise TypeError(f"not a strategy: {strategy!r}")
    return (json.dumps(doc, indent=2) + "\n").encode("utf-8")
