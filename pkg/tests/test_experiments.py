import csv

import numpy as np
import pytest

from clientwaiter.experiments import (
    ROW_FIELDS,
    ConfigError,
    ExperimentConfig,
    contains_tree,
    hitting_run,
    parse_bias,
    parse_config_text,
    read_csv,
    run_bias_curve,
    run_hitting_time,
    run_threshold_scan,
    run_tree_game,
    task_int,
    task_rng,
    wilson,
    write_csv,
)
from clientwaiter.decide import CopyGameDecider, k5_minus_edge
from clientwaiter.graph import make_complete, make_mary_tree


def test_wilson_reference_values():
    lo, hi = wilson(5, 10)
    assert lo == pytest.approx(0.236593, abs=1e-6) and hi == pytest.approx(0.763407, abs=1e-6)
    lo, hi = wilson(0, 10)
    assert lo == 0 and hi == pytest.approx(0.277533, abs=1e-6)
    assert wilson(0, 0) == (0.0, 1.0)


def test_task_seeding_is_order_free():
    a = task_rng(7, 2, 3).integers(10**9, size=4)
    _ = task_rng(7, 0, 0).integers(10**9, size=4)
    b = task_rng(7, 2, 3).integers(10**9, size=4)
    assert np.array_equal(a, b)
    assert task_int(7, 2, 3) != task_int(7, 3, 2)


def test_config_parsing(tmp_path):
    text = "# grid\nn = 10, 20\nq = 6n^4/3, 5\nreps = 3  # small\nout-dir = x\n"
    raw = parse_config_text(text)
    assert raw["out_dir"] == "x" and raw["n"] == "10, 20"
    path = tmp_path / "c.cfg"
    path.write_text(text)
    cfg = ExperimentConfig.from_file(path, seed=4)
    assert cfg.n == [10, 20] and cfg.reps == 3 and cfg.seed == 4
    assert parse_bias("6n^4/3", 100) == 2785
    assert parse_bias("n", 30) == 30 and parse_bias("12", 30) == 12
    with pytest.raises(ConfigError):
        ExperimentConfig.from_mapping({"bogus": "1"})
    with pytest.raises(ConfigError):
        ExperimentConfig.from_mapping({"reps": "0"})


def test_bias_curve_rows_and_csv_regeneration(tmp_path):
    cfg = ExperimentConfig.from_mapping({"n": "12", "q": "1,11", "reps": "3", "waiter": "star", "clients": "random,greedy", "seed": "9"})
    rows = run_bias_curve(cfg)
    assert len(rows) == 4
    assert all(r["flagged"] == 0 for r in rows)
    path = write_csv(rows, tmp_path / "b.csv")
    with open(path) as fh:
        assert next(csv.reader(fh)) == list(ROW_FIELDS)
    again = run_bias_curve(cfg)
    assert read_csv(path) == read_csv(write_csv(again, tmp_path / "c.csv"))


def test_bias_curve_huge_bias_single_edge():
    cfg = ExperimentConfig.from_mapping({"n": "6", "q": "15", "reps": "4", "waiter": "S_C", "clients": "random"})
    (row,) = run_bias_curve(cfg)
    assert row["value"] == 2


def test_threshold_empty_board():
    cfg = ExperimentConfig.from_mapping({"n": "20", "q": "2", "p": "0", "reps": "5"})
    (row,) = run_threshold_scan(cfg)
    assert row["value"] == 0 and row["trials"] == 5


def test_threshold_complete_board_unbiased():
    cfg = ExperimentConfig.from_mapping({"n": "7", "q": "1", "p": "1", "reps": "2"})
    (row,) = run_threshold_scan(cfg)
    assert row["value"] == 1


def test_hitting_time_small():
    decider = CopyGameDecider(make_complete(3), 1, gadgets=(k5_minus_edge(),))
    run = hitting_run(8, np.random.default_rng(1), decider)
    assert run.tau_client is not None and run.tau_k5e is not None
    cfg = ExperimentConfig.from_mapping({"n": "8", "reps": "3", "seed": "2"})
    rows, runs = run_hitting_time(cfg)
    assert [r["statistic"] for r in rows] == ["agreement", "client_not_before_k5e", "tau_difference_histogram"]
    assert len(runs) == 3


def test_tree_game_small():
    tree = make_mary_tree(2, 2)
    assert contains_tree(tree, set(range(tree.graph.e)), 2)
    assert not contains_tree(tree, {0, 1}, 2)
    cfg = ExperimentConfig.from_mapping({"q": "1", "k": "1", "m": "3", "reps": "3", "waiter": "random"})
    (row,) = run_tree_game(cfg)
    assert row["value"] == 1
