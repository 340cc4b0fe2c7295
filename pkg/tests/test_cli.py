import io
import json

import pytest

from stlab.cli import build_parser, cmd_play, main


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr()


def test_simulate_trivial(tmp_path, capsys):
    out = tmp_path / "t.json"
    code, io_ = run(capsys, "simulate", "--primes", "2,3,5,7", "--student", "trivial",
                    "--rounds", "2", "--out", str(out))
    assert code == 1 and "no prime found" in io_.out
    data = json.loads(out.read_text())
    assert [r["y"] for r in data["rounds"]] == ["210", "210"] and data["rounds"][0]["z"] == "6"


def test_simulate_immediate_wins(tmp_path, capsys):
    code, io_ = run(capsys, "simulate", "--primes", "2,3,5,7", "--student", "omniscient:immediate",
                    "--rounds", "1", "--out", str(tmp_path / "t.json"))
    assert code == 0 and "wins at round 1" in io_.out


@pytest.mark.parametrize("primes", ["2,3,4", "3,3", "x,y"])
def test_simulate_rejects_bad_primes(tmp_path, capsys, primes):
    code, io_ = run(capsys, "simulate", "--primes", primes, "--out", str(tmp_path / "t.json"))
    assert code == 2 and "error" in io_.err


def test_simulate_parallel(tmp_path, capsys):
    code, io_ = run(capsys, "simulate", "--primes", "3,5,7,11", "--student", "parallel-obvious",
                    "--parallel", "2", "--rounds", "2", "--out", str(tmp_path / "t.json"))
    assert code == 1


def test_simulate_sampled_base_uses_seed(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("STLAB_SEED", "5")
    a = tmp_path / "a.json"
    b = tmp_path / "b.json"
    run(capsys, "simulate", "--bits", "10", "--d", "3", "--out", str(a))
    run(capsys, "simulate", "--bits", "10", "--d", "3", "--seed", "5", "--out", str(b))
    assert a.read_text() == b.read_text()


@pytest.mark.parametrize("supplied,code,expected", [("2,3", 0, {"5", "7"}), ("5,3", 0, {"5"}),
                                                    ("3,3", 1, {"FAIL"})])
def test_blind_factor(capsys, supplied, code, expected):
    got, io_ = run(capsys, "blind-factor", "--pq", "35", "--supplied", supplied, "--rounds", "2",
                   "--student", "omniscient")
    assert got == code and io_.out.strip() in expected


def test_verify_lemmas(tmp_path, capsys):
    code, _ = run(capsys, "verify", "--suite", "lemmas", "--max-universe", "4",
                  "--out", str(tmp_path / "r.json"))
    assert code == 0


def test_verify_distinctness_single(tmp_path, capsys):
    code, io_ = run(capsys, "verify", "--suite", "distinctness", "--size", "24", "--d", "4",
                    "--out", str(tmp_path / "r.json"))
    assert code == 0 and "0.768" in io_.out


def test_verify_pair_sampling(tmp_path, capsys):
    code, io_ = run(capsys, "verify", "--suite", "pair-sampling", "--omega", "5", "--d", "3",
                    "--out", str(tmp_path / "r.json"))
    assert code == 0 and "1/3" in io_.out


@pytest.mark.parametrize("argv", [
    ["--suite", "pair-sampling", "--omega", "50", "--d", "6"],
    ["--suite", "lemmas", "--max-universe", "12"],
])
def test_verify_infeasible_sizes_exit_2(tmp_path, capsys, argv):
    code, _ = run(capsys, "verify", *argv, "--out", str(tmp_path / "r.json"))
    assert code == 2


def test_experiment_reduction_writes_report_and_csv(tmp_path, capsys):
    out, table = tmp_path / "r.json", tmp_path / "r.csv"
    code, io_ = run(capsys, "experiment", "--suite", "reduction", "--bits", "8", "--d", "4",
                    "--rounds", "2", "--trials", "400", "--seed", "7", "--out", str(out),
                    "--csv", str(table))
    assert code == 0 and "threshold" in io_.out
    assert json.loads(out.read_text())["passed"] is True and table.exists()


def test_experiment_conversion(tmp_path, capsys):
    code, _ = run(capsys, "experiment", "--suite", "conversion", "--samples", "5",
                  "--out", str(tmp_path / "r.json"))
    assert code == 0


def play(tmp_path, inputs, *extra):
    args = build_parser().parse_args(["play", "--rounds", "3", "--out", str(tmp_path / "p.json"), *extra])
    if args.seed is None:
        args.seed = 0
    it = iter(inputs)

    def read(prompt):
        try:
            return next(it)
        except StopIteration:
            raise EOFError

    out = io.StringIO()
    return cmd_play(args, read, out), out.getvalue()


def test_play_visible_teacher_replies(tmp_path):
    code, text = play(tmp_path, ["210", "4", "7"], "--primes", "2,3,5,7")
    assert "z = 6" in text and "z = 1" in text
    assert "you win: 7 is a prime factor" in text and code == 0
    data = json.loads((tmp_path / "p.json").read_text())
    assert [r["y"] for r in data["rounds"]] == ["210", "4", "7"]


def test_play_reprompts_then_aborts(tmp_path):
    code, text = play(tmp_path, ["a", "b", "c"], "--primes", "2,3,5,7")
    assert code == 2 and text.count("not an integer") == 3


def test_play_recovers_after_bad_input(tmp_path):
    code, text = play(tmp_path, ["a", "5"], "--primes", "2,3,5,7")
    assert code == 0 and "you win: 5" in text


def test_play_hidden_mode_loses(tmp_path):
    code, text = play(tmp_path, ["1", "1", "1"], "--bits", "8", "--d", "3")
    assert code == 1 and "you lose" in text and " * " not in text.splitlines()[0]


def test_play_requires_a_base(tmp_path, capsys):
    code, _ = run(capsys, "play", "--out", str(tmp_path / "p.json"))
    assert code == 2
