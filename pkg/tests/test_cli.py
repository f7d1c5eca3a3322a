import subprocess
import sys

import pytest

from clientwaiter.cli import main


def run(capsys, *args):
    code = main(list(args))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_solve_k6(capsys):
    code, out, _ = run(capsys, "solve", "--board", "K6", "--goal", "K3", "--q", "2", "--variant", "cw")
    assert code == 0 and out.strip() == "Waiter"


def test_solve_k5e_and_critical(capsys):
    assert run(capsys, "solve", "--board", "K5-e", "--goal", "K3", "--q", "1")[1].strip() == "Client"
    code, out, _ = run(capsys, "solve", "--board", "K2", "--goal", "K2", "--critical", "3")
    assert code == 0 and "q_c = 3" in out


def test_verify_exit_codes(capsys):
    code, out, _ = run(capsys, "verify", "--board", "K5", "--goal", "degree:3", "--q", "3", "--strategy", "star")
    assert code == 0 and out.startswith("Verified")
    code, out, _ = run(capsys, "verify", "--board", "K5", "--goal", "degree:2", "--q", "3", "--strategy", "star")
    assert code == 1 and "OFFER" in out


def test_play_trace(capsys):
    code, out, _ = run(capsys, "play", "--board", "K5", "--goal", "K3", "--q", "1", "--trace", "--seed", "4")
    assert code == 0 and out.splitlines()[0].startswith("OFFER")


def test_graph_reports(tmp_path, capsys):
    f = tmp_path / "g.txt"
    f.write_text("4 4\n0 1\n1 2\n2 3\n3 0\n")
    code, out, _ = run(capsys, "graph", "--in", str(f), "--report", "density")
    assert code == 0 and "ar = 4/3" in out and "m2 = 3/2" in out
    for report in ("core", "decompose", "edges"):
        assert run(capsys, "graph", "--board", "K4", "--report", report)[0] == 0


def test_usage_errors(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["solve", "--bogus"])
    assert exc.value.code == 2
    assert run(capsys, "solve", "--board", "Q9", "--goal", "K3")[0] == 2
    assert run(capsys, "verify", "--board", "K4", "--goal", "K3", "--strategy", "nope")[0] == 2
    assert run(capsys, "solve", "--board", "K8", "--goal", "K3", "--max-edges", "5")[0] == 2


def test_experiment_commands_write_outputs(tmp_path, capsys):
    out = tmp_path / "res"
    code, _, _ = run(capsys, "bias-curve", "--n", "10", "--q", "1,5", "--reps", "2", "--out-dir", str(out), "--format", "both")
    assert code == 0
    assert (out / "bias_curve_star.csv").exists() and (out / "bias_curve_star.svg").read_text().startswith("<?xml")
    code, _, _ = run(capsys, "threshold", "--n", "12", "--q", "2", "--c", "0.5,3", "--reps", "2", "--out-dir", str(out), "--format", "both")
    assert code == 0 and (out / "threshold_K3.svg").exists()
    code, _, _ = run(capsys, "tree-game", "--q", "1", "--k", "1", "--m", "3", "--reps", "2", "--out-dir", str(out))
    assert code == 0 and (out / "tree_game.csv").exists()
    cfg = tmp_path / "h.cfg"
    cfg.write_text("n = 8\nreps = 2\nformat = both\n")
    run(capsys, "hitting-time", "--config", str(cfg), "--out-dir", str(out))
    assert (out / "hitting_time.csv").exists() and (out / "hitting_time.svg").exists()


def test_console_entry_point():
    res = subprocess.run([sys.executable, "-m", "clientwaiter.cli", "solve", "--board", "K6", "--goal", "K3", "--q", "2"],
                         capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.strip() == "Waiter"
