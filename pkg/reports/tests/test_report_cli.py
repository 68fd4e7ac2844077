"""Command-line surface: argument mapping, exit codes, error reporting."""

import os

import pytest

from report_helpers import make_run_dir, vortex_run_dir
from sbpflow_reports.cli import ReportSpec, build_parser, main, spec_from_args


def test_default_mode_writes_each_run_report(tmp_path, capsys):
    runs = [make_run_dir(tmp_path, f"run{k}") for k in range(2)]
    assert main(runs) == 0
    out = capsys.readouterr().out.splitlines()
    assert len(out) == 8
    for run in runs:
        assert os.path.isfile(os.path.join(run, "report", "energy.png"))
        assert os.path.isfile(os.path.join(run, "report", "summary.md"))


def test_convergence_mode_writes_first_run_report(tmp_path):
    runs = [vortex_run_dir(tmp_path, f"run{k}", h, eu, ep)
            for k, (h, eu, ep) in enumerate([(1 / 16, 4e-2, 8e-2),
                                             (1 / 32, 1e-2, 2e-2),
                                             (1 / 64, 2.5e-3, 5e-3)])]
    assert main(runs + ["--convergence"]) == 0
    assert os.path.isfile(os.path.join(runs[0], "report", "convergence.md"))
    assert not os.path.exists(os.path.join(runs[1], "report"))


def test_missing_run_dir_fails_with_message(tmp_path, capsys):
    assert main([str(tmp_path / "nowhere")]) == 1
    err = capsys.readouterr().err
    assert "report:" in err and "nowhere" in err


def test_garbled_csv_fails_with_message(tmp_path, capsys):
    run = make_run_dir(tmp_path, "bad")
    with open(os.path.join(run, "timeseries.csv"), "a", encoding="utf-8") as fh:
        fh.write("not,a,valid,row\n")
    assert main([run]) == 1
    assert "timeseries" in capsys.readouterr().err


def test_selection_flags_map_to_spec():
    args = build_parser().parse_args(
        ["a", "b", "--convergence", "--no-energy", "--no-constraint"])
    spec = spec_from_args(args)
    assert spec == ReportSpec(run_dirs=["a", "b"], convergence=True,
                              energy=False, budget=True, constraint=False)


def test_no_run_dirs_is_a_usage_error():
    with pytest.raises(SystemExit) as exc:
        build_parser().parse_args([])
    assert exc.value.code == 2
