"""Vectorized sweep kernels shared by the value-iteration solvers.

Vectors are int64 numpy arrays with saturated sentinels for the two
infinities.  Finite solver values are bounded by |V|*W + W, far below the
sentinel magnitude, so ``weight + sentinel`` cannot wrap and a mask pass
restores exact sentinels after each sweep.
"""

from __future__ import annotations

from typing import List, Optional, Sequence

import numpy as np

from .arena import Arena, Player, ValueVector, max_abs_weight
from .extvalue import ExtValue, MINUS_INF, PLUS_INF

POS = np.int64(2**62)
NEG = np.int64(-(2**62))


class CompiledArena:
    """Edge arrays grouped by source vertex, ready for reduceat sweeps."""

    def __init__(self, arena: Arena) -> None:
        self.arena = arena
        n = arena.n
        self.n = n
        self.W = max_abs_weight(arena)
        edges = arena.edges  # already sorted by (src, dst)
        self.src = np.fromiter((e[0] for e in edges), dtype=np.int64, count=len(edges))
        self.dst = np.fromiter((e[1] for e in edges), dtype=np.int64, count=len(edges))
        self.wt = np.fromiter((e[2] for e in edges), dtype=np.int64, count=len(edges))
        self.starts = np.searchsorted(self.src, np.arange(n, dtype=np.int64))
        self.is_max = np.fromiter(
            (o is Player.MAX for o in arena.owners), dtype=bool, count=n
        )
        self.cutoff = np.int64(-(n - 1) * self.W)


def candidates(ca: CompiledArena, cont: np.ndarray) -> np.ndarray:
    """Per-edge value of moving along the edge given continuation values."""
    cand = ca.wt + cont
    np.copyto(cand, POS, where=cont >= POS)
    np.copyto(cand, NEG, where=cont <= NEG)
    return cand


def sweep(ca: CompiledArena, xpre: np.ndarray, ytrans: Optional[np.ndarray] = None) -> np.ndarray:
    """One Jacobi update pass over all vertices.

    With ``ytrans`` the continuation of each successor is min(xpre, ytrans)
    (the stop-request form used by the total-payoff inner loop); without it
    the continuation is xpre itself.
    """
    cont = xpre[ca.dst]
    if ytrans is not None:
        cont = np.minimum(cont, ytrans[ca.dst])
    cand = candidates(ca, cont)
    red_max = np.maximum.reduceat(cand, ca.starts)
    red_min = np.minimum.reduceat(cand, ca.starts)
    return np.where(ca.is_max, red_max, red_min)


def apply_cutoff(ca: CompiledArena, x: np.ndarray) -> None:
    """Drop anything provably unboundedly improvable for Min to -inf."""
    np.copyto(x, NEG, where=x < ca.cutoff)


def to_array(values: Sequence[ExtValue]) -> np.ndarray:
    out = np.empty(len(values), dtype=np.int64)
    for i, v in enumerate(values):
        if v is PLUS_INF:
            out[i] = POS
        elif v is MINUS_INF:
            out[i] = NEG
        else:
            out[i] = v
    return out


def from_array(arena: Arena, x: np.ndarray) -> ValueVector:
    vals: List[ExtValue] = []
    for raw in x.tolist():
        if raw >= POS:
            vals.append(PLUS_INF)
        elif raw <= NEG:
            vals.append(MINUS_INF)
        else:
            vals.append(raw)
    return ValueVector(arena, vals)


def ext_of_raw(raw: int) -> ExtValue:
    if raw >= POS:
        return PLUS_INF
    if raw <= NEG:
        return MINUS_INF
    return int(raw)


def raw_of_ext(v: ExtValue) -> int:
    if v is PLUS_INF:
        return int(POS)
    if v is MINUS_INF:
        return int(NEG)
    return int(v)


class ComponentView:
    """Edge slices of one strongly connected component for restricted sweeps."""

    def __init__(self, ca: CompiledArena, members: Sequence[int]) -> None:
        self.members = np.asarray(sorted(members), dtype=np.int64)
        idx = []
        starts = []
        count = 0
        n = ca.n
        for v in self.members:
            lo = ca.starts[v]
            hi = ca.starts[v + 1] if v + 1 < n else len(ca.src)
            starts.append(count)
            idx.extend(range(lo, hi))
            count += hi - lo
        self.edge_idx = np.asarray(idx, dtype=np.int64)
        self.starts = np.asarray(starts, dtype=np.int64)
        self.dst = ca.dst[self.edge_idx]
        self.wt = ca.wt[self.edge_idx]
        self.is_max = ca.is_max[self.members]

    def sweep(
        self,
        ca: CompiledArena,
        x: np.ndarray,
        ytrans: Optional[np.ndarray] = None,
    ) -> np.ndarray:
        """Update pass for member vertices only; reads the global vector."""
        cont = x[self.dst]
        if ytrans is not None:
            cont = np.minimum(cont, ytrans[self.dst])
        cand = self.wt + cont
        np.copyto(cand, POS, where=cont >= POS)
        np.copyto(cand, NEG, where=cont <= NEG)
        red_max = np.maximum.reduceat(cand, self.starts)
        red_min = np.minimum.reduceat(cand, self.starts)
        return np.where(self.is_max, red_max, red_min)
