"""Text format for game files, DOT/JSON export, and example generators.

Format, one directive per line, ``#`` starts a comment::

    objective mcr|tp          # exactly once, first non-comment line
    vertex <name> min|max [target]
    edge <src> <dst> <integer>

Vertex indices follow declaration order.  ``parse`` returns a validated
arena; ``serialize`` emits a canonical byte form with ``parse(serialize(a))``
isomorphic to ``a``.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple, Union

from .arena import Arena, Objective, Player, make_arena, validate
from .extvalue import to_json


class GameSyntaxError(ValueError):
    def __init__(self, line: int, col: int, expected: str) -> None:
        super().__init__(f"line {line}, column {col}: expected {expected}")
        self.line = line
        self.col = col
        self.expected = expected


class UndeclaredVertexError(ValueError):
    def __init__(self, name: str, line: int) -> None:
        super().__init__(f"line {line}: vertex {name!r} used before declaration")
        self.name = name
        self.line = line


class DuplicateVertexError(ValueError):
    def __init__(self, name: str, line: int) -> None:
        super().__init__(f"line {line}: vertex {name!r} declared twice")
        self.name = name
        self.line = line


def _tokens(line: str) -> List[Tuple[str, int]]:
    out = []
    col = 0
    for chunk in line.split("#", 1)[0].split():
        col = line.index(chunk, col)
        out.append((chunk, col + 1))
        col += len(chunk)
    return out


def parse(text: Union[str, bytes]) -> Arena:
    """Parse the text format into a validated arena."""
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    objective: Optional[Objective] = None
    names: List[str] = []
    owners: List[Player] = []
    index: Dict[str, int] = {}
    targets: List[int] = []
    edges: Dict[Tuple[int, int], int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        toks = _tokens(raw)
        if not toks:
            continue
        head, col = toks[0]
        if objective is None:
            if head != "objective":
                raise GameSyntaxError(lineno, col, "'objective' as first directive")
            if len(toks) != 2 or toks[1][0] not in ("mcr", "tp"):
                raise GameSyntaxError(lineno, col, "objective mcr|tp")
            objective = Objective(toks[1][0])
            continue
        if head == "objective":
            raise GameSyntaxError(lineno, col, "a single objective line")
        if head == "vertex":
            if len(toks) < 3 or len(toks) > 4:
                raise GameSyntaxError(lineno, col, "vertex <name> min|max [target]")
            name = toks[1][0]
            owner_tok, owner_col = toks[2]
            if owner_tok not in ("min", "max"):
                raise GameSyntaxError(lineno, owner_col, "min|max")
            if len(toks) == 4 and toks[3][0] != "target":
                raise GameSyntaxError(lineno, toks[3][1], "'target'")
            if name in index:
                raise DuplicateVertexError(name, lineno)
            index[name] = len(names)
            names.append(name)
            owners.append(Player.MAX if owner_tok == "max" else Player.MIN)
            if len(toks) == 4:
                targets.append(index[name])
        elif head == "edge":
            if len(toks) != 4:
                raise GameSyntaxError(lineno, col, "edge <src> <dst> <integer>")
            for tok, tok_col in toks[1:3]:
                if tok not in index:
                    raise UndeclaredVertexError(tok, lineno)
            try:
                w = int(toks[3][0])
            except ValueError:
                raise GameSyntaxError(lineno, toks[3][1], "an integer weight") from None
            s, d = index[toks[1][0]], index[toks[2][0]]
            if (s, d) in edges:
                # Parallel edges are merged, keeping the best weight for the
                # owner of the source vertex.
                old = edges[(s, d)]
                merged = max(old, w) if owners[s] is Player.MAX else min(old, w)
                warnings.warn(
                    f"line {lineno}: merged parallel edge {toks[1][0]}->{toks[2][0]} "
                    f"(kept weight {merged})",
                    stacklevel=2,
                )
                edges[(s, d)] = merged
            else:
                edges[(s, d)] = w
        else:
            raise GameSyntaxError(lineno, col, "vertex|edge directive")
    if objective is None:
        raise GameSyntaxError(1, 1, "'objective' as first directive")
    arena = Arena(
        tuple(names),
        tuple(owners),
        tuple((s, d, w) for (s, d), w in edges.items()),
        frozenset(targets),
        objective,
    )
    validate(arena)
    return arena


def serialize(arena: Arena) -> bytes:
    """Canonical text form: objective, vertices in index order, sorted edges."""
    lines = [f"objective {arena.objective.value}"]
    for v, name in enumerate(arena.names):
        owner = "max" if arena.owners[v] is Player.MAX else "min"
        suffix = " target" if v in arena.targets else ""
        lines.append(f"vertex {name} {owner}{suffix}")
    for s, d, w in arena.edges:
        lines.append(f"edge {arena.names[s]} {arena.names[d]} {w}")
    return ("\n".join(lines) + "\n").encode("utf-8")


def export_dot(arena: Arena, annot=None) -> bytes:
    """DOT digraph: Max vertices circles, Min boxes, targets doubled."""
    lines = ["digraph arena {"]
    for v, name in enumerate(arena.names):
        shape = "circle" if arena.owners[v] is Player.MAX else "box"
        attrs = [f"shape={shape}"]
        if v in arena.targets:
            attrs.append("peripheries=2")
        if annot is not None:
            attrs.append(f'xlabel="{to_json(annot[v])}"')
        lines.append(f'  {name} [{", ".join(attrs)}];')
    for s, d, w in arena.edges:
        lines.append(f'  {arena.names[s]} -> {arena.names[d]} [label="{w}"];')
    lines.append("}")
    return ("\n".join(lines) + "\n").encode("utf-8")


FAMILIES = ("fig1a", "fig2a", "fig2b", "lsp_fig5", "layered")


@dataclass(frozen=True)
class FamilySpec:
    """Named example family with its parameters.

    ``objective`` overrides the family default (fig2a and layered support
    both objectives).
    """

    family: str
    W: int = 1
    n: int = 1
    objective: Optional[Objective] = None

    def __post_init__(self) -> None:
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        if self.W < 1:
            raise ValueError("W must be >= 1")
        if self.n < 1:
            raise ValueError("n must be >= 1")


def generate(spec: FamilySpec) -> Arena:
    """Build the requested example arena, exactly as documented per family."""
    W, n = spec.W, spec.n
    mk = make_arena
    if spec.family == "fig1a":
        arena = mk(
            ["v1", "v2", "v3", "v4", "v5"],
            [Player.MAX, Player.MIN, Player.MIN, Player.MAX, Player.MIN],
            [(0, 1, 2), (1, 0, -1), (1, 2, -1), (2, 3, 2), (3, 2, -2), (3, 4, -1), (4, 3, 1)],
            [],
            Objective.TP,
        )
    elif spec.family == "fig2a":
        objective = spec.objective or Objective.MCR
        arena = mk(
            ["v1", "v2", "v3"],
            [Player.MAX, Player.MIN, Player.MAX],
            [(0, 1, -1), (0, 2, -W), (1, 0, 0), (1, 2, 0), (2, 2, 0)],
            [2],
            objective,
        )
    elif spec.family == "fig2b":
        arena = mk(
            ["v1", "v2", "v3"],
            [Player.MAX, Player.MIN, Player.MAX],
            [(0, 1, -W), (1, 1, 1), (1, 2, W), (2, 2, 0)],
            [],
            Objective.TP,
        )
    elif spec.family == "lsp_fig5":
        arena = mk(
            ["v1", "v2", "v3", "v4", "t"],
            [Player.MAX, Player.MIN, Player.MIN, Player.MAX, Player.MAX],
            [
                (0, 1, -1),
                (0, 2, 0),
                (1, 0, 1),
                (1, 4, 3),
                (2, 0, 1),
                (2, 4, 1),
                (3, 3, -1),
                (3, 4, 0),
                (4, 4, 0),
            ],
            [4],
            Objective.MCR,
        )
    else:  # layered
        objective = spec.objective or Objective.TP
        names: List[str] = []
        owners: List[Player] = []
        edges: List[Tuple[int, int, int]] = []
        for k in range(n):
            a, b, c = 3 * k, 3 * k + 1, 3 * k + 2
            names += [f"a{k}", f"b{k}", f"c{k}"]
            owners += [Player.MAX, Player.MIN, Player.MIN]
            nxt = 3 * (k + 1) if k < n - 1 else 3 * n
            edges += [(a, b, -1), (a, c, -W), (b, a, 0), (b, c, 0), (c, c, 1), (c, nxt, W)]
        t = 3 * n
        names.append("t")
        owners.append(Player.MAX)
        edges.append((t, t, 0))
        arena = mk(names, owners, edges, [t], objective)
    if spec.objective is not None and arena.objective is not spec.objective:
        if spec.objective is Objective.MCR and not arena.targets:
            raise ValueError(f"{spec.family} has no target set; cannot use mcr objective")
        arena = make_arena(arena.names, arena.owners, arena.edges, arena.targets, spec.objective)
    return arena


def write_results_json(values, stats, strategies=None) -> bytes:
    """Results document: values keyed by name in index order, stats, strategies."""
    doc = {
        "values": {name: to_json(v) for name, v in values.items()},
        "stats": {
            "outer_iterations": stats.outer_iterations,
            "inner_iterations": stats.inner_iterations,
            "sweeps": stats.sweeps,
            "wall_ms": stats.wall_ms,
        },
    }
    if strategies is not None:
        doc["strategies"] = strategies
    return (json.dumps(doc, indent=2) + "\n").encode("utf-8")
