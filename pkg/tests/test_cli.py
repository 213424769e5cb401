"""Tests for the command-line interface."""

from __future__ import annotations

import pytest

from wbgpbo.cli import build_parser, main


def test_run_subcommand_writes_outputs(tmp_path, capsys):
    code = main(
        [
            "run",
            "--problems", "02",
            "--algorithms", "gpbo,wbgp16",
            "--runs", "2",
            "--iters", "3",
            "--seed", "9",
            "--out", str(tmp_path),
            "--no-figures",
        ]
    )
    assert code == 0
    assert (tmp_path / "summary.csv").exists()
    assert (tmp_path / "traces.csv").exists()
    assert (tmp_path / "convergence" / "problem02.csv").exists()
    assert not (tmp_path / "figures").exists()
    out = capsys.readouterr().out
    assert "problem02" in out
    assert "campaign finished" in out


def test_run_renders_figures_by_default(tmp_path):
    code = main(
        [
            "run",
            "--problems", "02",
            "--algorithms", "gpbo",
            "--runs", "1",
            "--iters", "2",
            "--out", str(tmp_path),
        ]
    )
    assert code == 0
    assert (tmp_path / "figures" / "problem02.png").exists()


def test_unknown_algorithm_is_rejected():
    with pytest.raises(SystemExit) as excinfo:
        main(["run", "--algorithms", "annealing"])
    assert excinfo.value.code == 2


def test_parser_defaults_match_protocol():
    args = build_parser().parse_args(["run"])
    assert args.runs == 30
    assert args.iters == 30
    assert args.init == 5
    assert args.xi == 2.0
    assert args.seed == 42
    assert args.jobs == 1


def test_selfcheck_subcommand_is_wired():
    parser = build_parser()
    args = parser.parse_args(["selfcheck"])
    assert args.command == "selfcheck"
