import csv
import json
import subprocess
import sys

import pytest

from hqea.cli import (
    UsageError,
    emit_plot_data,
    main,
    parse_and_validate,
    render,
)
from hqea.experiments import SummaryStats


def test_full_onemax_sweep_plan():
    cfg = parse_and_validate(["sweep", "--problem", "onemax", "--n", "10000", "--algorithm", "hqea",
                              "--pmin", "inv-n", "--lambda-exponents", "0..12"])
    plan = cfg.plan()
    assert len(plan.cells()) == 13 and plan.runs == 100
    assert plan.lambdas[-1] == 4096
    assert cfg.alpha == 0.8 and cfg.gamma == 0.2


@pytest.mark.parametrize("argv,flag", [
    (["sweep", "--problem", "onemax", "--lambda-list", "1"], "--n"),
    (["sweep", "--problem", "onemax", "--n", "10", "--pmin", "0", "--lambda-list", "1"], "--pmin"),
    (["sweep", "--problem", "onemax", "--n", "10", "--algorithm", "cmaes", "--lambda-list", "1"], "--algorithm"),
    (["sweep", "--problem", "sphere", "--n", "10", "--lambda-list", "1"], "--problem"),
    (["sweep", "--problem", "onemax", "--n", "10", "--lambda-exponents", "3..x"], "--lambda-exponents"),
    (["sweep", "--problem", "onemax", "--n", "10", "--lambda-exponents", "4..2"], "--lambda-exponents"),
    (["sweep", "--problem", "onemax", "--n", "10", "--lambda-list", "0"], "--lambda-list"),
])
def test_usage_errors_name_flag(argv, flag):
    with pytest.raises(UsageError, match=flag):
        parse_and_validate(argv)


def test_usage_error_exit_code(capsys):
    assert main(["sweep", "--problem", "onemax", "--lambda-list", "1"]) == 1
    assert "--n" in capsys.readouterr().err
    assert main(["compare", "--table", "/nonexistent/table.csv"]) == 2


@pytest.mark.parametrize("argv", [
    ["sweep", "--problem", "plateau", "--k", "3", "--n", "60", "--algorithm", "static,qea",
     "--pmin", "inv-n,inv-n2,0.001", "--rule", "strict,nonstrict", "--lambda-list", "1,3",
     "--alpha", "0.5", "--runs", "7", "--workers", "2", "--summary", "s.csv"],
    ["run", "--problem", "leadingones", "--n", "30", "--lo-random", "--problem-seed", "4",
     "--algorithm", "hqea", "--lambda", "8", "--trace", "t.csv", "--budget", "99"],
    ["compare", "--table", "t.csv", "--baseline", "eaab", "--significance", "0.05"],
    ["plot-data", "--summary", "s.csv", "--style", "median-iqr"],
])
def test_render_roundtrip(argv):
    cfg = parse_and_validate(argv)
    assert parse_and_validate(render(cfg)) == cfg


def _stats(mean, std, med, q1, q3, count=5):
    return SummaryStats(mean, std, med, q1, q3, count, 0)


def test_emit_plot_data_styles():
    cell = ("onemax", 50, 4, "hqea", "inv-n", "strict")
    summary = [(cell, _stats(10.0, 2.0, 9.0, 8.0, 12.0))]
    assert emit_plot_data(summary, "mean-std") == [("hqea|pmin=inv-n|strict", 4, 10.0, 8.0, 12.0)]
    assert emit_plot_data(summary, "median-iqr") == [("hqea|pmin=inv-n|strict", 4, 9.0, 8.0, 12.0)]
    empty = [(cell, SummaryStats(*([float("nan")] * 5), 0, 3))]
    assert emit_plot_data(empty) == []


def test_end_to_end(tmp_path):
    table, summary = tmp_path / "runs.csv", tmp_path / "summary.csv"
    sweep = ["sweep", "--problem", "onemax", "--n", "30", "--lambda-exponents", "0..2",
             "--runs", "4", "--workers", "1", "--seed", "5", "--out", str(table),
             "--summary", str(summary)]
    assert main(sweep) == 0
    with open(table) as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 3 * 5 * 4
    first = table.read_bytes()
    assert main(sweep) == 0
    assert table.read_bytes() == first

    report = tmp_path / "cmp.json"
    assert main(["compare", "--table", str(table), "--out", str(report)]) == 0
    comps = json.loads(report.read_text())["comparisons"]
    assert len(comps) == 3 * 4

    plot = tmp_path / "plot.csv"
    assert main(["plot-data", "--summary", str(summary), "--out", str(plot)]) == 0
    with open(plot) as fh:
        series = {r["series"] for r in csv.DictReader(fh)}
    assert len(series) == 5

    trace = tmp_path / "trace.csv"
    out = tmp_path / "run.json"
    assert main(["run", "--problem", "onemax", "--n", "20", "--algorithm", "hqea",
                 "--lambda", "2", "--trace", str(trace), "--out", str(out)]) == 0
    result = json.loads(out.read_text())["runs"][0]
    assert result["hit_optimum"] is True
    assert len(trace.read_text().splitlines()) == result["generations"] + 1


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "hqea", "run", "--problem", "onemax", "--n", "8",
                           "--algorithm", "static", "--format", "csv"],
                          capture_output=True, text=True, check=True)
    assert proc.stdout.splitlines()[0].startswith("seed,generations")
