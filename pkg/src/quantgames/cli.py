"""Command-line interface.

Subcommands: solve, strategy, check, gen, bench, play, convert.  Output is
deterministic byte-for-byte across runs unless --stats adds wall-clock
fields.  Exit codes: 0 ok, 1 check mismatch, 2 parse/validation error.
"""

from __future__ import annotations

import argparse
import hashlib
import random
import sys
from functools import partial
from typing import Dict, List, Optional, Sequence

from . import accel as accel_mod
from . import gamefile
from .arena import (
    Arena,
    ArenaError,
    Objective,
    Player,
    ValueVector,
    make_arena,
    normalize_target,
)
from .extvalue import MINUS_INF, to_json
from .mcr import SolveStats, solve_mcr
from .oracle import mcr_oracle, tp_oracle
from .strategies import (
    _as_moore,
    _move,
    extract_max_memoryless,
    extract_max_tp,
    extract_min_mcr,
    make_switching,
    project_tp_min,
    strategy_json,
)
from .tp import build_game_Y, solve_tp


def _solve_dispatch(arena: Arena, accel: str, path_cap: int):
    """Solve per the arena's objective; returns (values on the input's
    vertices, stats, normalized arena or None)."""
    oracle = None
    if accel == "scc":
        oracle = accel_mod.no_clamp_oracle
    elif accel == "scc+paths":
        oracle = partial(accel_mod.simple_path_oracle, cap=path_cap)
    if arena.objective is Objective.MCR:
        norm = normalize_target(arena)
        if oracle is None:
            res = solve_mcr(norm)
        else:
            res = accel_mod.solve_mcr_accelerated(norm, oracle)
        values = ValueVector(arena, res.values.values[: arena.n])
        return values, res.stats, norm
    if oracle is None:
        res = solve_tp(arena)
    else:
        res = accel_mod.solve_tp_accelerated(arena, oracle)
    return res.values, res.stats, None


def _print_values(values: ValueVector) -> None:
    width = max(len(n) for n in values.arena.names)
    for name, v in values.items():
        print(f"{name:<{width}}  {to_json(v)}")


def _print_stats(stats: SolveStats) -> None:
    print(
        f"# stats counting={SolveStats.COUNTING_CONVENTION} "
        f"k_e={stats.outer_iterations} k_i={stats.inner_iterations} "
        f"sweeps={stats.sweeps} wall_ms={stats.wall_ms}"
    )


def cmd_solve(args) -> int:
    arena = _load(args.file)
    if args.trace and arena.objective is not Objective.MCR:
        sys.stderr.write("error: --trace is only available for mcr games\n")
        return 2
    if args.trace and arena.objective is Objective.MCR:
        norm = normalize_target(arena)
        res = solve_mcr(norm, with_trace=True)
        with open(args.trace, "w", encoding="utf-8") as fh:
            for vec in res.trace.vectors:
                fh.write("\t".join(str(to_json(v)) for v in vec) + "\n")
        values = ValueVector(arena, res.values.values[: arena.n])
        stats = res.stats
    else:
        values, stats, _ = _solve_dispatch(arena, args.accel, args.path_cap)
    if args.json:
        sys.stdout.buffer.write(gamefile.write_results_json(values, stats))
    else:
        _print_values(values)
        if args.stats:
            _print_stats(stats)
    return 0


def cmd_strategy(args) -> int:
    arena = _load(args.file)
    docs: Dict[str, bytes] = {}
    if arena.objective is Objective.MCR:
        norm = normalize_target(arena)
        res = solve_mcr(norm, with_trace=True)
        if args.player in ("max", "both"):
            docs["max"] = strategy_json(extract_max_memoryless(norm, res.values), norm)
        if args.player in ("min", "both"):
            sigma1, sigma2, sigma_star = extract_min_mcr(norm, res)
            if all(v is not MINUS_INF for v in res.values):
                sw = make_switching(sigma1, sigma2, res.values, norm)
                docs["min"] = strategy_json(sw, norm)
            else:
                docs["min_sigma1"] = strategy_json(sigma1, norm)
                docs["min_sigma2"] = strategy_json(sigma2, norm)
            docs["min_moore"] = strategy_json(sigma_star, norm)
    else:
        res = solve_tp(arena)
        if args.player in ("max", "both"):
            docs["max"] = strategy_json(extract_max_tp(arena, res.values), arena)
        if args.player in ("min", "both"):
            gy = build_game_Y(arena, res.values)
            gy_res = solve_mcr(gy, with_trace=True)
            gy_sigma1, _, _ = extract_min_mcr(gy, gy_res)
            docs["min"] = strategy_json(project_tp_min(arena, gy_sigma1), arena)
    for label, blob in docs.items():
        sys.stdout.write(f"--- {label} ---\n")
        sys.stdout.buffer.write(blob)
    return 0


def random_arena(rng: random.Random, vmax: int, wmax: int, objective: Objective) -> Arena:
    """Seeded random arena with out-degree <= 3 (<= 2 for TP so that the
    reference enumeration stays small)."""
    n = rng.randint(1, vmax)
    names = [f"v{i}" for i in range(n)]
    owners = [rng.choice([Player.MAX, Player.MIN]) for _ in range(n)]
    max_deg = 2 if objective is Objective.TP else 3
    edges = []
    for v in range(n):
        deg = rng.randint(1, min(max_deg, n))
        dests = rng.sample(range(n), deg)
        for d in dests:
            edges.append((v, d, rng.randint(-wmax, wmax)))
    if objective is Objective.MCR:
        targets = rng.sample(range(n), rng.randint(1, n))
    else:
        targets = []
    return make_arena(names, owners, edges, targets, objective)


def _check_one(arena: Arena) -> bool:
    """Solver agrees with the brute-force reference on this arena."""
    if arena.objective is Objective.MCR:
        norm = normalize_target(arena)
        got = solve_mcr(norm).values
        want = mcr_oracle(norm)
    else:
        got = solve_tp(arena).values
        want = tp_oracle(arena)
    return list(got) == list(want)


def _minimize(arena: Arena, still_fails=None) -> Arena:
    """Greedy vertex deletion preserving validity and the failure."""
    if still_fails is None:
        still_fails = lambda sub: not _check_one(sub)
    current = arena
    improved = True
    while improved and current.n > 1:
        improved = False
        for drop in range(current.n):
            keep = [v for v in range(current.n) if v != drop]
            sub = _induced(current, keep)
            if sub is None:
                continue
            try:
                if still_fails(sub):
                    current = sub
                    improved = True
                    break
            except Exception:
                continue
    return current


def _induced(arena: Arena, keep: List[int]) -> Optional[Arena]:
    alive = set(keep)
    # Iteratively drop vertices that lose all successors.
    while True:
        dead = [
            v
            for v in alive
            if not any(d in alive for d, _ in arena.successors(v))
        ]
        if not dead:
            break
        alive -= set(dead)
    if not alive:
        return None
    order = sorted(alive)
    remap = {v: i for i, v in enumerate(order)}
    targets = [remap[v] for v in arena.targets if v in alive]
    if arena.objective is Objective.MCR and not targets:
        return None
    try:
        return make_arena(
            [arena.names[v] for v in order],
            [arena.owners[v] for v in order],
            [
                (remap[s], remap[d], w)
                for s, d, w in arena.edges
                if s in alive and d in alive
            ],
            targets,
            arena.objective,
        )
    except ArenaError:
        return None


def cmd_check(args) -> int:
    arenas: List[Arena] = []
    if args.random:
        params = dict(kv.split("=", 1) for kv in args.random)
        seed = int(params.get("seed", 0))
        count = int(params.get("count", 100))
        vmax = int(params.get("vmax", 5))
        wmax = int(params.get("wmax", 3))
        rng = random.Random(seed)
        for i in range(count):
            objective = Objective.MCR if i % 2 == 0 else Objective.TP
            arenas.append(random_arena(rng, vmax, wmax, objective))
    else:
        arenas.append(_load(args.file))
    for i, arena in enumerate(arenas):
        if not _check_one(arena):
            small = _minimize(arena)
            sys.stderr.write(f"mismatch on instance {i}; minimized counterexample:\n")
            sys.stderr.write(gamefile.serialize(small).decode())
            return 1
    print(f"ok: {len(arenas)} instance(s) cross-validated")
    return 0


def cmd_gen(args) -> int:
    spec = gamefile.FamilySpec(
        args.family,
        W=args.W,
        n=args.n,
        objective=Objective(args.objective) if args.objective else None,
    )
    blob = gamefile.serialize(gamefile.generate(spec))
    if args.output:
        with open(args.output, "wb") as fh:
            fh.write(blob)
    else:
        sys.stdout.buffer.write(blob)
    return 0


def _values_hash(values: ValueVector) -> str:
    text = ";".join(f"{n}={to_json(v)}" for n, v in values.items())
    return hashlib.sha256(text.encode()).hexdigest()[:12]


def cmd_bench(args) -> int:
    rows = ["family,W,n,accel,k_e,k_i,wall_ms,values_hash"]
    for W in [int(x) for x in args.W_list.split(",")]:
        for n in [int(x) for x in args.n_list.split(",")]:
            spec = gamefile.FamilySpec(args.family, W=W, n=n)
            arena = gamefile.generate(spec)
            values, stats, _ = _solve_dispatch(arena, args.accel, args.path_cap)
            rows.append(
                f"{args.family},{W},{n},{args.accel},{stats.outer_iterations},"
                f"{stats.inner_iterations},{stats.wall_ms},{_values_hash(values)}"
            )
    csv = "\n".join(rows) + "\n"
    if args.csv:
        with open(args.csv, "w", encoding="utf-8") as fh:
            fh.write(csv)
    else:
        sys.stdout.write(csv)
    return 0


def cmd_play(args) -> int:
    arena = _load(args.file)
    human = Player.MAX if args.side == "max" else Player.MIN
    if arena.objective is Objective.MCR:
        norm = normalize_target(arena)
        res = solve_mcr(norm, with_trace=True)
        if human is Player.MAX:
            sigma1, sigma2, _ = extract_min_mcr(norm, res)
            if all(v is not MINUS_INF for v in res.values):
                tool = make_switching(sigma1, sigma2, res.values, norm)
            else:
                tool = sigma1
        else:
            tool = extract_max_memoryless(norm, res.values)
        game = norm
        values = res.values
    else:
        res = solve_tp(arena)
        if human is Player.MAX:
            gy = build_game_Y(arena, res.values)
            gy_res = solve_mcr(gy, with_trace=True)
            gy_sigma1, _, _ = extract_min_mcr(gy, gy_res)
            tool = project_tp_min(arena, gy_sigma1)
        else:
            tool = extract_max_tp(arena, res.values)
        game = arena
        values = res.values
    machine = _as_moore(tool)
    v = game.index(args.start) if args.start else 0
    state = machine.update(machine.initial, v)
    running = 0
    print(f"playing as {human.value}; tool answers optimally. values: ")
    _print_values(values)
    for _ in range(args.max_rounds):
        print(
            f"at {game.names[v]} (owner {game.owners[v].value}), "
            f"running sum {running}, value to go {to_json(values[v])}"
        )
        if game.objective is Objective.MCR and game.is_target(v):
            print(f"target reached; payoff {running}")
            return 0
        succs = [game.names[d] for d, _ in game.successors(v)]
        if game.owners[v] is human:
            choice = input(f"your move {succs}: ").strip()
            if choice not in succs:
                print("illegal move")
                continue
            nxt = game.index(choice)
        else:
            nxt = _move(game, machine, state, v)
            print(f"tool plays {game.names[nxt]}")
        running += game.weight(v, nxt)
        v = nxt
        state = machine.update(state, v)
    print("round budget exhausted")
    return 0


def cmd_convert(args) -> int:
    arena = _load(args.file)
    annot = None
    if args.annotate:
        values, _, _ = _solve_dispatch(arena, "none", accel_mod.DEFAULT_PATH_CAP)
        annot = values
    blob = gamefile.export_dot(arena, annot)
    if args.output:
        with open(args.output, "wb") as fh:
            fh.write(blob)
    else:
        sys.stdout.buffer.write(blob)
    return 0


def _load(path: str) -> Arena:
    with open(path, "rb") as fh:
        return gamefile.parse(fh.read())


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qg", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve a game file")
    p.add_argument("file")
    p.add_argument("--accel", choices=["none", "scc", "scc+paths"], default="none")
    p.add_argument("--path-cap", type=int, default=accel_mod.DEFAULT_PATH_CAP)
    p.add_argument("--stats", action="store_true")
    p.add_argument("--trace", metavar="FILE")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("strategy", help="solve and emit optimal strategies")
    p.add_argument("file")
    p.add_argument("--player", choices=["max", "min", "both"], default="both")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_strategy)

    p = sub.add_parser("check", help="cross-validate against the reference solver")
    p.add_argument("file", nargs="?")
    p.add_argument("--random", nargs="+", metavar="key=value")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("gen", help="emit a generated example arena")
    p.add_argument("family", choices=list(gamefile.FAMILIES))
    p.add_argument("--W", type=int, default=1)
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--objective", choices=["mcr", "tp"])
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("bench", help="iteration-count benchmark, CSV output")
    p.add_argument("--family", default="layered")
    p.add_argument("--W-list", default="50")
    p.add_argument("--n-list", default="100")
    p.add_argument("--accel", choices=["none", "scc", "scc+paths"], default="none")
    p.add_argument("--path-cap", type=int, default=accel_mod.DEFAULT_PATH_CAP)
    p.add_argument("--csv", metavar="FILE")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("play", help="step a game interactively against the solver")
    p.add_argument("file")
    p.add_argument("--as", dest="side", choices=["max", "min"], default="min")
    p.add_argument("--start")
    p.add_argument("--max-rounds", type=int, default=1000)
    p.set_defaults(func=cmd_play)

    p = sub.add_parser("convert", help="export to DOT")
    p.add_argument("file")
    p.add_argument("--dot", action="store_true")
    p.add_argument("--annotate", action="store_true")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_convert)
    return parser


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ArenaError, gamefile.GameSyntaxError, ValueError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
