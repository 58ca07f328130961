import json
import subprocess
import sys

from quantgames.cli import run

QG = [sys.executable, "-m", "quantgames.cli"]


def _run(args, input_text=None):
    return subprocess.run(
        QG + args, capture_output=True, text=True, input=input_text, timeout=300
    )


def _gen(tmp_path, family, **flags):
    path = tmp_path / f"{family}.qg"
    args = ["gen", family, "-o", str(path)]
    for key, val in flags.items():
        args += [f"--{key}", str(val)]
    assert run(args) == 0
    return str(path)


def test_solve_fig2a_table(tmp_path):
    path = _gen(tmp_path, "fig2a", W=50)
    out = _run(["solve", path])
    assert out.returncode == 0
    assert "v1  -50" in out.stdout
    assert "v2  -50" in out.stdout
    assert "v3  0" in out.stdout


def test_solve_json_and_determinism(tmp_path):
    path = _gen(tmp_path, "lsp_fig5")
    a = _run(["solve", path, "--json"])
    b = _run(["solve", path, "--json"])
    doc = json.loads(a.stdout)
    assert doc["values"] == {"v1": 2, "v2": 3, "v3": 1, "v4": "+inf", "t": 0}
    # byte-identical output needs wall-clock scrubbed
    da, db = json.loads(a.stdout), json.loads(b.stdout)
    da["stats"].pop("wall_ms"), db["stats"].pop("wall_ms")
    assert da == db


def test_solve_accel_modes_agree(tmp_path):
    path = _gen(tmp_path, "layered", W=9, n=6)
    plain = _run(["solve", path]).stdout
    scc = _run(["solve", path, "--accel", "scc"]).stdout
    paths = _run(["solve", path, "--accel", "scc+paths", "--path-cap", "64"]).stdout
    assert plain == scc == paths


def test_parse_error_exit_2(tmp_path):
    bad = tmp_path / "bad.qg"
    bad.write_text("objective tp\nedge a a 0\n")
    out = _run(["solve", str(bad)])
    assert out.returncode == 2
    assert "error:" in out.stderr


def test_check_random_ok():
    out = _run(["check", "--random", "seed=7", "count=40", "vmax=4", "wmax=3"])
    assert out.returncode == 0
    assert "ok: 40" in out.stdout


def test_check_file(tmp_path):
    path = _gen(tmp_path, "fig1a")
    out = _run(["check", path])
    assert out.returncode == 0


def test_gen_deterministic(tmp_path):
    a = _run(["gen", "layered", "--W", "5", "--n", "3"]).stdout
    b = _run(["gen", "layered", "--W", "5", "--n", "3"]).stdout
    assert a == b
    assert "objective tp" in a


def test_bench_csv(tmp_path):
    out = _run(
        ["bench", "--family", "layered", "--W-list", "5", "--n-list", "4,6", "--accel", "scc+paths"]
    )
    lines = out.stdout.strip().splitlines()
    assert lines[0] == "family,W,n,accel,k_e,k_i,wall_ms,values_hash"
    assert len(lines) == 3
    row = lines[1].split(",")
    assert row[:4] == ["layered", "5", "4", "scc+paths"]
    assert int(row[4]) == 4 * 4 + 2


def test_trace_dump(tmp_path):
    path = _gen(tmp_path, "fig2a", W=3)
    trace = tmp_path / "trace.tsv"
    out = _run(["solve", path, "--trace", str(trace)])
    assert out.returncode == 0
    lines = trace.read_text().strip().splitlines()
    assert lines[0].split("\t") == ["+inf", "+inf", "0"]
    assert len(lines) == 2 * 3 + 2 + 1  # sweeps plus the initial vector


def test_convert_dot(tmp_path):
    path = _gen(tmp_path, "fig2a", W=50)
    out = _run(["convert", path, "--dot"])
    assert out.returncode == 0
    assert out.stdout.startswith("digraph")
    assert "shape=box" in out.stdout


def test_strategy_mcr(tmp_path):
    path = _gen(tmp_path, "fig2a", W=4)
    out = _run(["strategy", path])
    assert out.returncode == 0
    assert '"kind": "switching"' in out.stdout
    assert '"v1": "v3"' in out.stdout


def test_strategy_tp(tmp_path):
    path = _gen(tmp_path, "fig1a")
    out = _run(["strategy", path])
    assert out.returncode == 0
    assert '"v4": "v5"' in out.stdout  # Max sticks to the friendlier cycle
    assert '"v2": "v3"' in out.stdout


def test_play_scripted(tmp_path):
    path = _gen(tmp_path, "fig2a", W=3)
    out = _run(["play", path, "--as", "max", "--start", "v1"], input_text="v3\n")
    assert out.returncode == 0
    assert "target reached; payoff -3" in out.stdout


def test_vertex_cap_env(tmp_path, monkeypatch):
    path = _gen(tmp_path, "layered", W=2, n=5)
    out = subprocess.run(
        QG + ["solve", str(path)],
        capture_output=True,
        text=True,
        env={"QG_MAX_VERTICES": "4", "PATH": "/usr/bin:/bin"},
    )
    assert out.returncode == 2


def test_trace_rejected_for_tp(tmp_path):
    path = _gen(tmp_path, "fig1a")
    out = _run(["solve", path, "--trace", str(tmp_path / "t.tsv")])
    assert out.returncode == 2


def test_bench_published_cell(tmp_path):
    out = _run(["bench", "--family", "layered", "--W-list", "50", "--n-list", "100"])
    row = out.stdout.strip().splitlines()[1].split(",")
    assert int(row[4]) == 151
    assert int(row[5]) == 12603


def test_minimizer_shrinks_under_predicate():
    import random

    from quantgames.arena import Objective
    from quantgames.cli import _minimize, random_arena

    rng = random.Random(5)
    arena = random_arena(rng, 6, 3, Objective.MCR)

    def has_negative_edge(sub):
        return any(w < 0 for _, _, w in sub.edges)

    if not has_negative_edge(arena):
        arena = random_arena(rng, 6, 3, Objective.MCR)
    small = _minimize(arena, still_fails=has_negative_edge)
    assert small.n <= arena.n
    assert has_negative_edge(small)
    # no single further deletion keeps the failure alive
    from quantgames.cli import _induced

    for drop in range(small.n):
        sub = _induced(small, [v for v in range(small.n) if v != drop])
        assert sub is None or not has_negative_edge(sub)
