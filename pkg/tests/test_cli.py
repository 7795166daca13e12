import json
import subprocess
import sys

import pytest

from helpers import TWO_STARS_TEXT
from oscm.cli import EXIT_INTERNAL, EXIT_INVALID, EXIT_OK, EXIT_PARSE, RunStats, build_parser, main
from oscm.model import format_instance
from oscm.oracle import GenSpec, generate


@pytest.fixture
def two_stars(tmp_path):
    path = tmp_path / "two_stars.gr"
    path.write_text(TWO_STARS_TEXT)
    return path


def run_main(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_solve_two_stars_with_stats(capsys, two_stars, tmp_path):
    stats = tmp_path / "stats.json"
    code, out, _ = run_main(capsys, "solve", str(two_stars), "--stats", str(stats))
    assert code == EXIT_OK
    assert out == "5\n6\n"
    data = json.loads(stats.read_text())
    assert data["final_cost"] == 3 and data["proven_optimal"] is True
    assert data["lower_bound"] <= data["final_cost"] <= data["heuristic_cost"]
    assert set(RunStats.__dataclass_fields__) == set(data)
    assert all(not isinstance(v, (dict, list)) for v in data.values())


def test_solve_heuristic_is_deterministic(capsys, tmp_path):
    path = tmp_path / "g.gr"
    path.write_text(format_instance(generate(GenSpec(20, 30, 0.3, seed=4))))
    outs = [run_main(capsys, "solve", "--mode", "heuristic", "--seed", "7", str(path))[1] for _ in range(2)]
    assert outs[0] == outs[1]
    assert len(outs[0].splitlines()) == 30


def test_solve_garbage_exits_2(capsys, tmp_path):
    path = tmp_path / "bad.gr"
    path.write_text("this is not an instance\n")
    code, out, err = run_main(capsys, "solve", str(path))
    assert code == EXIT_PARSE and out == "" and "error" in err
    code, _, _ = run_main(capsys, "solve", str(tmp_path / "missing.gr"))
    assert code == EXIT_PARSE


def test_solve_internal_error_exits_3(capsys, two_stars, monkeypatch):
    from oscm import cli
    from oscm.bnb import SearchError

    def boom(*args, **kwargs):
        raise SearchError("broken")

    monkeypatch.setattr(cli, "solve_exact", boom)
    code, _, err = run_main(capsys, "solve", str(two_stars))
    assert code == EXIT_INTERNAL and "broken" in err


def test_solve_reads_stdin():
    proc = subprocess.run(
        [sys.executable, "-m", "oscm", "solve", "--quiet"],
        input=TWO_STARS_TEXT,
        capture_output=True,
        text=True,
        check=False,
    )
    assert proc.returncode == 0
    assert proc.stdout == "5\n6\n"
    assert proc.stderr == ""


def test_verify_examples(capsys, two_stars, tmp_path):
    order = tmp_path / "o.sol"
    order.write_text("5\n6\n")
    assert run_main(capsys, "verify", str(two_stars), str(order))[:2] == (EXIT_OK, "3\n")
    order.write_text("6\n5\n")
    assert run_main(capsys, "verify", str(two_stars), str(order))[:2] == (EXIT_OK, "4\n")
    order.write_text("5\n5\n")
    assert run_main(capsys, "verify", str(two_stars), str(order))[0] == EXIT_INVALID


def test_verify_reproduces_solver_cost(capsys, tmp_path):
    for seed in range(5):
        inst = generate(GenSpec(9, 8, 0.4, seed=seed))
        path = tmp_path / f"{seed}.gr"
        path.write_text(format_instance(inst))
        stats = tmp_path / f"{seed}.json"
        _, out, _ = run_main(capsys, "solve", str(path), "--stats", str(stats))
        sol = tmp_path / f"{seed}.sol"
        sol.write_text(out)
        code, printed, _ = run_main(capsys, "verify", str(path), str(sol))
        assert code == EXIT_OK
        assert int(printed) == json.loads(stats.read_text())["final_cost"]


def test_bench_empty_directory(capsys, tmp_path):
    code, out, _ = run_main(capsys, "bench", str(tmp_path))
    assert code == EXIT_OK
    rows = [json.loads(line) for line in out.splitlines()]
    assert len(rows) == 1 and rows[0]["summary"] and rows[0]["instances"] == 0


def test_bench_mixed_directory(capsys, tmp_path):
    (tmp_path / "a.gr").write_text(TWO_STARS_TEXT)
    (tmp_path / "b.gr").write_text("p ocr 1 1 5\n")
    (tmp_path / "c.gr").write_text(format_instance(generate(GenSpec(6, 6, 0.5, seed=1))))
    code, out, _ = run_main(capsys, "bench", str(tmp_path))
    assert code == EXIT_OK
    rows = [json.loads(line) for line in out.splitlines()]
    assert [r.get("instance") for r in rows[:3]] == ["a.gr", "b.gr", "c.gr"]
    assert rows[0]["final_cost"] == 3 and rows[0]["proven_optimal"]
    assert "error" in rows[1]
    assert rows[2]["lower_bound"] <= rows[2]["final_cost"]
    summary = rows[-1]
    assert summary["summary"] and summary["instances"] == 3 and summary["errors"] == 1


def test_bench_parallel_matches_serial(capsys, tmp_path):
    for seed in range(3):
        (tmp_path / f"{seed}.gr").write_text(format_instance(generate(GenSpec(7, 7, 0.5, seed=seed))))
    _, serial, _ = run_main(capsys, "bench", str(tmp_path))
    _, parallel, _ = run_main(capsys, "bench", "--jobs", "2", str(tmp_path))

    def costs(text):
        return [json.loads(line).get("final_cost") for line in text.splitlines()[:-1]]

    assert costs(serial) == costs(parallel)


def test_bench_unreadable_directory(capsys, tmp_path):
    assert run_main(capsys, "bench", str(tmp_path / "nope"))[0] == EXIT_PARSE


def test_heuristic_never_below_exact(capsys, tmp_path):
    for seed in range(6):
        path = tmp_path / f"{seed}.gr"
        path.write_text(format_instance(generate(GenSpec(8, 7, 0.5, seed=seed))))
        costs = {}
        for mode in ("exact", "heuristic"):
            stats = tmp_path / f"{seed}{mode}.json"
            run_main(capsys, "solve", "--mode", mode, str(path), "--stats", str(stats))
            costs[mode] = json.loads(stats.read_text())["final_cost"]
        assert costs["heuristic"] >= costs["exact"]


def test_parser_defaults():
    args = build_parser().parse_args(["solve"])
    assert (args.mode, args.seed, args.time_limit, args.window, args.restarts) == ("exact", 0, None, 20, 64)
    assert args.input is None and args.stats is None and args.quiet is False
    assert build_parser().parse_args(["solve", "--quiet"]).quiet is True
    assert build_parser().parse_args(["--quiet", "solve"]).quiet is True
