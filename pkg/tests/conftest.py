"""Shared fixtures and helpers for the test suite."""

from __future__ import annotations

import pytest

from quantgames.arena import Arena, Objective, Player, make_arena
from quantgames.attractor import compute_attractor
from quantgames.gamefile import FamilySpec, generate


@pytest.fixture
def fig1a() -> Arena:
    return generate(FamilySpec("fig1a"))


@pytest.fixture
def lsp() -> Arena:
    return generate(FamilySpec("lsp_fig5"))


def fig2a(W: int, objective: Objective = Objective.MCR) -> Arena:
    return generate(FamilySpec("fig2a", W=W, objective=objective))


def fig2b(W: int) -> Arena:
    return generate(FamilySpec("fig2b", W=W))


def layered(n: int, W: int, objective: Objective = Objective.TP) -> Arena:
    return generate(FamilySpec("layered", W=W, n=n, objective=objective))


def prune_to_attractor(arena: Arena) -> tuple:
    """Sub-arena on the attracted region (where the target is forceable);
    returns it with the old->new index map."""
    att = compute_attractor(arena, arena.targets).attracted
    keep = sorted(att)
    remap = {v: i for i, v in enumerate(keep)}
    sub = make_arena(
        [arena.names[v] for v in keep],
        [arena.owners[v] for v in keep],
        [(remap[s], remap[d], w) for s, d, w in arena.edges if s in att and d in att],
        [remap[t] for t in arena.targets if t in att],
        arena.objective,
    )
    return sub, remap


def single_vertex(owner: Player, weight: int, objective: Objective = Objective.TP) -> Arena:
    return make_arena(
        ["v0"], [owner], [(0, 0, weight)],
        [0] if objective is Objective.MCR else [],
        objective,
    )
