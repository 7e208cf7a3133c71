"""Command-line interface.

Subcommands:

  run        one configuration, one or more seeded runs
  sweep      full experiment plan over a lambda grid; writes the run table
  compare    rank-sum comparison of a baseline against the other algorithms
  plot-data  figure-ready series (mean/std or median/IQR bands) from a run table

Exit codes: 0 success, 1 usage error, 2 runtime failure.
"""
from __future__ import annotations

import argparse
import contextlib
import csv
from dataclasses import dataclass
import json
import logging
import math
from pathlib import Path
import re
import sys
from typing import Sequence

from .core import derive_seed
from .engine import ALGORITHMS, RunConfig, run_to_optimum, write_trace_csv
from .experiments import (
    RULES,
    ExperimentPlan,
    RunTable,
    compare_algorithms,
    comparisons_to_json,
    default_workers,
    p_min_label,
    read_summary_csv,
    run_experiment,
    summary_table,
    write_summary_csv,
)
from .mutation import resolve_p_min
from .problems import parse_problem

log = logging.getLogger("hqea")

SUBCOMMANDS = ("run", "sweep", "compare", "plot-data")
STYLES = ("mean-std", "median-iqr")
PLOT_COLUMNS = ("series", "lambda", "center", "lo", "hi")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


@dataclass(frozen=True)
class CliConfig:
    subcommand: str
    problem: str | None = None
    n: int | None = None
    k: int | None = None
    lo_random: bool = False
    problem_seed: int = 0
    algorithms: tuple[str, ...] = ALGORITHMS
    p_mins: tuple[str | float, ...] = ("inv-n",)
    rules: tuple[str, ...] = ("strict",)
    alpha: float = 0.8
    gamma: float = 0.2
    A: float = 2.0
    b: float = 0.5
    lambdas: tuple[int, ...] = (1,)
    lambda_exponents: tuple[int, int] | None = None
    runs: int = 100
    seed: int = 0
    workers: int | None = None
    budget: int | None = None
    out: str | None = None
    format: str = "csv"
    trace: str | None = None
    table: str | None = None
    summary: str | None = None
    baseline: str = "hqea"
    significance: float = 0.01
    style: str = "mean-std"

    def resolved_p_mins(self) -> tuple[float, ...]:
        return tuple(resolve_p_min(p, self.n) for p in self.p_mins)

    def build_problem(self):
        return parse_problem(self.problem, self.n, self.k, randomized=self.lo_random,
                             seed=self.problem_seed)

    def plan(self) -> ExperimentPlan:
        return ExperimentPlan(self.build_problem(), self.lambdas, self.algorithms, self.p_mins,
                              self.rules, self.runs, self.seed, self.budget,
                              self.A, self.b, self.alpha, self.gamma)


def _csv_list(text: str) -> list[str]:
    return [t.strip() for t in text.split(",") if t.strip()]


def _p_min_value(text: str) -> str | float:
    text = text.strip().lower()
    if text in ("inv-n", "inv-n2"):
        return text
    try:
        value = float(text)
    except ValueError:
        raise UsageError(f"--pmin: expected inv-n, inv-n2 or a number, got {text!r}") from None
    if not 0.0 < value <= 0.5 or math.isnan(value):
        raise UsageError(f"--pmin: must lie in (0, 1/2], got {text}")
    return value


def _exponent_range(text: str) -> tuple[int, int]:
    m = re.fullmatch(r"\s*(\d+)\s*\.\.\s*(\d+)\s*", text)
    if not m:
        raise UsageError(f"--lambda-exponents: expected 't_min..t_max' with integers >= 0, got {text!r}")
    lo, hi = int(m.group(1)), int(m.group(2))
    if lo > hi:
        raise UsageError(f"--lambda-exponents: empty range {text!r}")
    return lo, hi


def _add_problem_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("problem")
    g.add_argument("--problem", required=True,
                   help="onemax, leadingones, neutrality[k], plateau<k>, ruggedness")
    g.add_argument("--n", type=int, help="problem dimension (required)")
    g.add_argument("--k", type=int, help="block size (neutrality) or plateau size")
    g.add_argument("--lo-random", action="store_true",
                   help="LeadingOnes with a random target and permutation")
    g.add_argument("--problem-seed", type=int, default=0, help="seed for --lo-random")


def _add_algorithm_flags(p: argparse.ArgumentParser, multi: bool) -> None:
    g = p.add_argument_group("algorithm")
    many = " (comma-separated list)" if multi else ""
    g.add_argument("--algorithm", default=",".join(ALGORITHMS) if multi else None,
                   required=not multi, help=f"one of {', '.join(ALGORITHMS)}{many}")
    g.add_argument("--pmin", default="inv-n", help=f"inv-n, inv-n2 or a number{many}")
    g.add_argument("--rule", default="strict", help=f"strict or nonstrict{many}")
    g.add_argument("--alpha", type=float, default=0.8)
    g.add_argument("--gamma", type=float, default=0.2)
    g.add_argument("--A", type=float, default=2.0, dest="A")
    g.add_argument("--b", type=float, default=0.5, dest="b")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hqea", description="(1+lambda) EA mutation-rate control experiments")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)

    run = sub.add_parser("run", help="run one configuration")
    _add_problem_flags(run)
    _add_algorithm_flags(run, multi=False)
    run.add_argument("--lambda", dest="lam", type=int, default=1)
    run.add_argument("--runs", type=int, default=1)
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--budget", type=int)
    run.add_argument("--trace", help="write the per-generation trace CSV here (first run)")
    run.add_argument("--out", help="output file (default stdout)")
    run.add_argument("--format", choices=("csv", "json"), default="json")

    sweep = sub.add_parser("sweep", help="run an experiment plan over a lambda grid")
    _add_problem_flags(sweep)
    _add_algorithm_flags(sweep, multi=True)
    lam = sweep.add_mutually_exclusive_group(required=True)
    lam.add_argument("--lambda-exponents", help="t_min..t_max for lambda = 2^t")
    lam.add_argument("--lambda-list", help="explicit comma-separated lambda values")
    sweep.add_argument("--runs", type=int, default=100)
    sweep.add_argument("--seed", type=int, default=0, help="master seed")
    sweep.add_argument("--workers", type=int, help="worker processes (default $HQEA_WORKERS or CPU count)")
    sweep.add_argument("--budget", type=int, help="generation cap per run")
    sweep.add_argument("--out", help="run table output (default stdout)")
    sweep.add_argument("--format", choices=("csv", "json"), default="csv")
    sweep.add_argument("--summary", help="also write the summary table CSV here")

    cmp_ = sub.add_parser("compare", help="rank-sum comparisons against a baseline")
    cmp_.add_argument("--table", required=True, help="run table (.csv or .json)")
    cmp_.add_argument("--baseline", default="hqea")
    cmp_.add_argument("--significance", type=float, default=0.01)
    cmp_.add_argument("--out", help="JSON report (default stdout)")

    plot = sub.add_parser("plot-data", help="series for runtime-vs-lambda plots")
    src = plot.add_mutually_exclusive_group(required=True)
    src.add_argument("--table", help="run table (.csv or .json)")
    src.add_argument("--summary", help="summary table CSV")
    plot.add_argument("--style", choices=STYLES, default="mean-std")
    plot.add_argument("--out", help="CSV output (default stdout)")
    return parser


def parse_and_validate(argv: Sequence[str]) -> CliConfig:
    args = build_parser().parse_args(list(argv))
    sc = args.subcommand
    if sc in ("compare", "plot-data"):
        if sc == "compare":
            if args.baseline not in ALGORITHMS:
                raise UsageError(f"--baseline: unknown algorithm {args.baseline!r}")
            if not 0.0 < args.significance < 1.0:
                raise UsageError("--significance must lie in (0, 1)")
            return CliConfig(sc, table=args.table, baseline=args.baseline,
                             significance=args.significance, out=args.out)
        return CliConfig(sc, table=args.table, summary=args.summary, style=args.style, out=args.out)

    if args.n is None:
        raise UsageError("--n is required")
    if args.n < 1:
        raise UsageError(f"--n must be >= 1, got {args.n}")
    try:
        problem = parse_problem(args.problem, args.n, args.k, randomized=args.lo_random,
                                seed=args.problem_seed)
    except ValueError as exc:
        raise UsageError(f"--problem: {exc}") from None

    algorithms = tuple(a.lower() for a in _csv_list(args.algorithm))
    for a in algorithms:
        if a not in ALGORITHMS:
            raise UsageError(f"--algorithm: unknown algorithm {a!r}; choose from {', '.join(ALGORITHMS)}")
    rules = tuple(r.lower() for r in _csv_list(args.rule))
    for r in rules:
        if r not in RULES:
            raise UsageError(f"--rule: expected strict or nonstrict, got {r!r}")
    p_mins = tuple(_p_min_value(p) for p in _csv_list(args.pmin))
    if not algorithms or not rules or not p_mins:
        raise UsageError("--algorithm, --rule and --pmin need at least one value")
    if args.runs < 1:
        raise UsageError("--runs must be >= 1")
    if args.budget is not None and args.budget < 0:
        raise UsageError("--budget must be >= 0")
    if args.A <= 1 or not 0 < args.b < 1:
        raise UsageError("--A must exceed 1 and --b must lie in (0, 1)")
    if not 0 <= args.alpha <= 1 or not 0 <= args.gamma <= 1:
        raise UsageError("--alpha and --gamma must lie in [0, 1]")
    common = dict(problem=args.problem, n=args.n, k=problem.k, lo_random=args.lo_random,
                  problem_seed=args.problem_seed, algorithms=algorithms, p_mins=p_mins,
                  rules=rules, alpha=args.alpha, gamma=args.gamma, A=args.A, b=args.b,
                  runs=args.runs, seed=args.seed, budget=args.budget, out=args.out,
                  format=args.format)

    if sc == "run":
        if len(algorithms) != 1 or len(rules) != 1 or len(p_mins) != 1:
            raise UsageError("run takes a single --algorithm, --rule and --pmin")
        if args.lam < 1:
            raise UsageError("--lambda must be >= 1")
        return CliConfig(sc, lambdas=(args.lam,), trace=args.trace, **common)

    if args.lambda_exponents is not None:
        lo, hi = _exponent_range(args.lambda_exponents)
        lambdas = tuple(2 ** t for t in range(lo, hi + 1))
        exps = (lo, hi)
    else:
        try:
            lambdas = tuple(int(v) for v in _csv_list(args.lambda_list))
        except ValueError:
            raise UsageError(f"--lambda-list: expected integers, got {args.lambda_list!r}") from None
        if not lambdas or min(lambdas) < 1:
            raise UsageError("--lambda-list: values must be positive integers")
        exps = None
    if args.workers is not None and args.workers < 1:
        raise UsageError("--workers must be >= 1")
    return CliConfig(sc, lambdas=lambdas, lambda_exponents=exps, workers=args.workers,
                     summary=args.summary, **common)


def render(cfg: CliConfig) -> list[str]:
    """argv that parses back to ``cfg``."""
    argv = [cfg.subcommand]

    def opt(flag, value):
        if value is not None:
            argv.extend([flag, str(value)])

    if cfg.subcommand == "compare":
        opt("--table", cfg.table)
        opt("--baseline", cfg.baseline)
        opt("--significance", repr(cfg.significance))
        opt("--out", cfg.out)
        return argv
    if cfg.subcommand == "plot-data":
        opt("--table", cfg.table)
        opt("--summary", cfg.summary)
        opt("--style", cfg.style)
        opt("--out", cfg.out)
        return argv
    opt("--problem", cfg.problem)
    opt("--n", cfg.n)
    opt("--k", cfg.k)
    if cfg.lo_random:
        argv.append("--lo-random")
    opt("--problem-seed", cfg.problem_seed)
    opt("--algorithm", ",".join(cfg.algorithms))
    opt("--pmin", ",".join(p_min_label(p) for p in cfg.p_mins))
    opt("--rule", ",".join(cfg.rules))
    for flag, value in (("--alpha", cfg.alpha), ("--gamma", cfg.gamma), ("--A", cfg.A), ("--b", cfg.b)):
        opt(flag, repr(value))
    opt("--runs", cfg.runs)
    opt("--seed", cfg.seed)
    opt("--budget", cfg.budget)
    opt("--out", cfg.out)
    opt("--format", cfg.format)
    if cfg.subcommand == "run":
        opt("--lambda", cfg.lambdas[0])
        opt("--trace", cfg.trace)
    else:
        if cfg.lambda_exponents is not None:
            opt("--lambda-exponents", f"{cfg.lambda_exponents[0]}..{cfg.lambda_exponents[1]}")
        else:
            opt("--lambda-list", ",".join(str(v) for v in cfg.lambdas))
        opt("--workers", cfg.workers)
        opt("--summary", cfg.summary)
    return argv


def emit_plot_data(summary, style: str = "mean-std") -> list[tuple]:
    """Rows ``(series, lambda, center, lo, hi)``, one series per
    (algorithm, p_min, rule), sorted by series then lambda.  Empty cells
    (every run capped) are skipped."""
    if style not in STYLES:
        raise ValueError(f"unknown style {style!r}")
    rows = []
    for (_, _, lam, algo, pm, rule), st in summary:
        if st.empty:
            continue
        if style == "mean-std":
            center, lo, hi = st.mean, st.mean - st.std, st.mean + st.std
        else:
            center, lo, hi = st.median, st.q1, st.q3
        rows.append((f"{algo}|pmin={pm}|{rule}", lam, center, lo, hi))
    return sorted(rows, key=lambda r: (r[0], r[1]))


def write_plot_data(rows, out) -> None:
    w = csv.writer(out, lineterminator="\n")
    w.writerow(PLOT_COLUMNS)
    for series, lam, center, lo, hi in rows:
        w.writerow((series, lam, repr(center), repr(lo), repr(hi)))


@contextlib.contextmanager
def _open_out(path: str | None):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def load_table(path: str) -> RunTable:
    with open(path, newline="") as fh:
        if Path(path).suffix.lower() == ".json":
            return RunTable.from_json(json.load(fh))
        return RunTable.read_csv(fh)


def _cmd_run(cfg: CliConfig) -> None:
    problem = cfg.build_problem()
    results = []
    for i in range(cfg.runs):
        seed = cfg.seed if cfg.runs == 1 else derive_seed(cfg.seed, "run", i)
        rc = RunConfig(problem, cfg.lambdas[0], cfg.algorithms[0], p_min=cfg.p_mins[0],
                       strict_rule=cfg.rules[0] == "strict", A=cfg.A, b=cfg.b, alpha=cfg.alpha,
                       gamma=cfg.gamma, seed=seed, generation_budget=cfg.budget)
        res = run_to_optimum(rc, trace=cfg.trace is not None and i == 0)
        if res.trace is not None:
            with open(cfg.trace, "w", newline="") as fh:
                write_trace_csv(res.trace, fh)
        results.append(res)
    fields_ = ("seed", "generations", "evaluations", "hit_optimum", "final_fitness")
    with _open_out(cfg.out) as out:
        if cfg.format == "json":
            json.dump({"problem": problem.to_dict(), "lambda": cfg.lambdas[0],
                       "algorithm": cfg.algorithms[0], "p_min": p_min_label(cfg.p_mins[0]),
                       "rule": cfg.rules[0],
                       "runs": [{f: getattr(r, f) for f in fields_} for r in results]}, out, indent=1)
            out.write("\n")
        else:
            out.write(",".join(fields_) + "\n")
            for r in results:
                out.write(",".join(str(int(v) if isinstance(v, bool) else v)
                                   for v in (getattr(r, f) for f in fields_)) + "\n")


def _cmd_sweep(cfg: CliConfig) -> None:
    table = run_experiment(cfg.plan(), workers=cfg.workers or default_workers())
    with _open_out(cfg.out) as out:
        if cfg.format == "json":
            table.write_json(out)
        else:
            table.write_csv(out)
    if cfg.summary:
        with open(cfg.summary, "w", newline="") as fh:
            write_summary_csv(summary_table(table), fh)


def _cmd_compare(cfg: CliConfig) -> None:
    comps = compare_algorithms(load_table(cfg.table), cfg.baseline, cfg.significance)
    with _open_out(cfg.out) as out:
        json.dump(comparisons_to_json(comps, cfg.significance), out, indent=1)
        out.write("\n")


def _cmd_plot_data(cfg: CliConfig) -> None:
    if cfg.summary:
        with open(cfg.summary, newline="") as fh:
            summary = read_summary_csv(fh)
    else:
        summary = summary_table(load_table(cfg.table))
    if not summary:
        raise ValueError("summary table is empty")
    with _open_out(cfg.out) as out:
        write_plot_data(emit_plot_data(summary, cfg.style), out)


COMMANDS = {"run": _cmd_run, "sweep": _cmd_sweep, "compare": _cmd_compare, "plot-data": _cmd_plot_data}


def main(argv: Sequence[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    logging.basicConfig(level=logging.INFO if ("-v" in argv or "--verbose" in argv) else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = parse_and_validate([a for a in argv if a not in ("-v", "--verbose")])
    except UsageError as exc:
        print(f"hqea: usage error: {exc}", file=sys.stderr)
        return 1
    try:
        COMMANDS[cfg.subcommand](cfg)
    except (OSError, ValueError, RuntimeError) as exc:
        print(f"hqea: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
