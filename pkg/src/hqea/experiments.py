"""Experiment sweeps: lambda grids x algorithms x rate bounds x update rules,
repeated independent runs, summary statistics and pairwise comparisons."""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
import csv
from dataclasses import asdict, dataclass, field, fields
import itertools
import json
import logging
import math
import os
from typing import Iterable, Sequence, TextIO

import numpy as np

from .core import derive_seed
from .engine import ALGORITHMS, RunConfig, RunResult, run_to_optimum
from .problems import Problem, parse_problem
from .stats import u_statistic, wilcoxon_rank_sum

log = logging.getLogger(__name__)

RULES = ("strict", "nonstrict")
RUN_COLUMNS = ("problem", "n", "lambda", "algorithm", "p_min", "rule", "run_index", "seed",
               "generations", "evaluations", "hit_optimum")
WORKERS_ENV = "HQEA_WORKERS"


def default_workers() -> int:
    env = os.environ.get(WORKERS_ENV)
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def p_min_label(p_min: str | float) -> str:
    return p_min if isinstance(p_min, str) else repr(float(p_min))


def parse_p_min(label: str) -> str | float:
    return label if label in ("inv-n", "inv-n2") else float(label)


@dataclass(frozen=True)
class Cell:
    lam: int
    algorithm: str
    p_min: str | float
    rule: str

    def key(self, problem: Problem) -> str:
        return (f"{problem.label}|n={problem.n}|lambda={self.lam}|{self.algorithm}"
                f"|pmin={p_min_label(self.p_min)}|{self.rule}")


@dataclass(frozen=True)
class ExperimentPlan:
    problem: Problem
    lambdas: tuple[int, ...]
    algorithms: tuple[str, ...] = ALGORITHMS
    p_mins: tuple[str | float, ...] = ("inv-n",)
    rules: tuple[str, ...] = ("strict",)
    runs: int = 100
    master_seed: int = 0
    budget: int | None = None
    A: float = 2.0
    b: float = 0.5
    alpha: float = 0.8
    gamma: float = 0.2

    @classmethod
    def from_exponents(cls, problem: Problem, t_min: int, t_max: int, **kw) -> ExperimentPlan:
        return cls(problem, tuple(2 ** t for t in range(t_min, t_max + 1)), **kw)

    def cells(self) -> list[Cell]:
        return [Cell(lam, algo, pm, rule) for lam, algo, pm, rule in
                itertools.product(self.lambdas, self.algorithms, self.p_mins, self.rules)]

    def config(self, cell: Cell, run_index: int) -> RunConfig:
        return RunConfig(
            problem=self.problem, lam=cell.lam, algorithm=cell.algorithm, p_min=cell.p_min,
            strict_rule=cell.rule == "strict", A=self.A, b=self.b, alpha=self.alpha,
            gamma=self.gamma, seed=derive_seed(self.master_seed, cell.key(self.problem), run_index),
            generation_budget=self.budget,
        )

    def validate(self) -> None:
        if self.runs < 1:
            raise ValueError("runs per cell must be >= 1")
        if not self.lambdas or not self.algorithms or not self.p_mins or not self.rules:
            raise ValueError("every plan axis needs at least one value")
        for rule in self.rules:
            if rule not in RULES:
                raise ValueError(f"unknown rule {rule!r}; choose from {RULES}")
        for cell in self.cells():
            self.config(cell, 0)


@dataclass(frozen=True)
class RunRow:
    problem: str
    n: int
    lam: int
    algorithm: str
    p_min: str
    rule: str
    run_index: int
    seed: int
    generations: int
    evaluations: int
    hit_optimum: bool

    def cell(self) -> tuple:
        return (self.problem, self.n, self.lam, self.algorithm, self.p_min, self.rule)

    def as_csv(self) -> list:
        return [self.problem, self.n, self.lam, self.algorithm, self.p_min, self.rule,
                self.run_index, self.seed, self.generations, self.evaluations,
                int(self.hit_optimum)]


@dataclass
class RunTable:
    problem: Problem
    rows: list[RunRow] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.rows)

    def cells(self) -> dict[tuple, list[RunRow]]:
        out: dict[tuple, list[RunRow]] = {}
        for row in self.rows:
            out.setdefault(row.cell(), []).append(row)
        return out

    def write_csv(self, out: TextIO) -> None:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(RUN_COLUMNS)
        for row in self.rows:
            w.writerow(row.as_csv())

    @classmethod
    def read_csv(cls, src: TextIO, problem: Problem | None = None) -> RunTable:
        reader = csv.DictReader(src)
        rows = [RunRow(r["problem"], int(r["n"]), int(r["lambda"]), r["algorithm"], r["p_min"],
                       r["rule"], int(r["run_index"]), int(r["seed"]), int(r["generations"]),
                       int(r["evaluations"]), r["hit_optimum"] in ("1", "True", "true"))
                for r in reader]
        if problem is None:
            if not rows:
                raise ValueError("empty run table and no problem given")
            problem = parse_problem(rows[0].problem, rows[0].n)
        return cls(problem, rows)

    def to_json(self) -> dict:
        return {"problem": self.problem.to_dict(),
                "runs": [dict(zip(RUN_COLUMNS, row.as_csv())) for row in self.rows]}

    @classmethod
    def from_json(cls, data: dict) -> RunTable:
        rows = [RunRow(r["problem"], r["n"], r["lambda"], r["algorithm"], r["p_min"], r["rule"],
                       r["run_index"], r["seed"], r["generations"], r["evaluations"],
                       bool(r["hit_optimum"]))
                for r in data["runs"]]
        return cls(Problem.from_dict(data["problem"]), rows)

    def write_json(self, out: TextIO) -> None:
        json.dump(self.to_json(), out, indent=1)
        out.write("\n")


def _execute(cfg: RunConfig) -> RunResult:
    return run_to_optimum(cfg)


def run_experiment(plan: ExperimentPlan, workers: int | None = None) -> RunTable:
    """Execute every (cell, run) of ``plan``.

    The table is ordered by cell then run index regardless of ``workers``,
    and every run's seed depends only on the master seed, the cell and the
    run index.
    """
    plan.validate()
    workers = default_workers() if workers is None else max(1, workers)
    jobs = [(cell, i, plan.config(cell, i)) for cell in plan.cells() for i in range(plan.runs)]
    log.info("running %d cells x %d runs with %d worker(s)", len(plan.cells()), plan.runs, workers)
    configs = [cfg for _, _, cfg in jobs]
    if workers == 1:
        results = [_execute(cfg) for cfg in configs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_execute, configs, chunksize=max(1, len(configs) // (8 * workers))))
    prob = plan.problem
    rows = [RunRow(prob.label, prob.n, cell.lam, cell.algorithm, p_min_label(cell.p_min), cell.rule,
                   i, cfg.seed, res.generations, res.evaluations, res.hit_optimum)
            for (cell, i, cfg), res in zip(jobs, results)]
    return RunTable(prob, rows)


@dataclass(frozen=True)
class SummaryStats:
    mean: float
    std: float
    median: float
    q1: float
    q3: float
    count: int
    capped_count: int

    @property
    def empty(self) -> bool:
        return self.count == 0

    @property
    def iqr(self) -> float:
        return self.q3 - self.q1


def summarize(runs: Iterable[RunRow | RunResult]) -> SummaryStats:
    """Generations statistics over the runs that reached the optimum.

    ``std`` uses the n-1 denominator (0 for a single run); quartiles use
    linear interpolation between order statistics.  If every run hit the
    budget the result is an empty marker with NaN fields.
    """
    runs = list(runs)
    gens = np.array([r.generations for r in runs if r.hit_optimum], dtype=np.float64)
    capped = len(runs) - gens.size
    if gens.size == 0:
        nan = math.nan
        return SummaryStats(nan, nan, nan, nan, nan, 0, capped)
    std = float(gens.std(ddof=1)) if gens.size > 1 else 0.0
    q1, median, q3 = np.percentile(gens, [25, 50, 75], method="linear")
    return SummaryStats(float(gens.mean()), std, float(median), float(q1), float(q3),
                        int(gens.size), capped)


SUMMARY_COLUMNS = ("problem", "n", "lambda", "algorithm", "p_min", "rule") + tuple(
    f.name for f in fields(SummaryStats))


def summary_table(table: RunTable) -> list[tuple[tuple, SummaryStats]]:
    return [(cell, summarize(rows)) for cell, rows in table.cells().items()]


def write_summary_csv(summary: Sequence[tuple[tuple, SummaryStats]], out: TextIO) -> None:
    w = csv.writer(out, lineterminator="\n")
    w.writerow(SUMMARY_COLUMNS)
    for cell, st in summary:
        w.writerow(list(cell) + [repr(v) if isinstance(v, float) else v for v in asdict(st).values()])


def read_summary_csv(src: TextIO) -> list[tuple[tuple, SummaryStats]]:
    out = []
    for r in csv.DictReader(src):
        cell = (r["problem"], int(r["n"]), int(r["lambda"]), r["algorithm"], r["p_min"], r["rule"])
        st = SummaryStats(float(r["mean"]), float(r["std"]), float(r["median"]), float(r["q1"]),
                          float(r["q3"]), int(r["count"]), int(r["capped_count"]))
        out.append((cell, st))
    return out


@dataclass(frozen=True)
class Comparison:
    problem: str
    n: int
    lam: int
    p_min: str
    rule: str
    baseline: str
    other: str
    verdict: str
    p_value: float | None = None
    baseline_median: float | None = None
    other_median: float | None = None


def _verdict(a: Sequence[float], b: Sequence[float], significance: float) -> tuple[str, float]:
    p = wilcoxon_rank_sum(a, b)
    if p >= significance:
        return "indistinguishable", p
    ma, mb = float(np.median(a)), float(np.median(b))
    if ma == mb:
        # fall back to the rank-sum direction: U below n1*n2/2 means ``a`` runs shorter
        lower = u_statistic(a, b) < len(a) * len(b) / 2
    else:
        lower = ma < mb
    return ("better" if lower else "worse"), p


def compare_algorithms(table: RunTable, baseline: str = "hqea",
                       significance: float = 0.01) -> list[Comparison]:
    """Rank-sum comparison of ``baseline`` with every other algorithm, per
    (lambda, p_min, rule) cell.

    Verdicts read from the baseline's side: ``better`` means it needs
    significantly fewer generations.  Cells lacking the baseline or the
    other algorithm are reported as ``absent``.
    """
    groups: dict[tuple, dict[str, list[RunRow]]] = {}
    for row in table.rows:
        key = (row.problem, row.n, row.lam, row.p_min, row.rule)
        groups.setdefault(key, {}).setdefault(row.algorithm, []).append(row)
    algos = sorted({row.algorithm for row in table.rows} - {baseline},
                   key=lambda a: ALGORITHMS.index(a) if a in ALGORITHMS else len(ALGORITHMS))
    out = []
    for (prob, n, lam, pm, rule), by_algo in groups.items():
        base = by_algo.get(baseline)
        for other in algos:
            rows = by_algo.get(other)
            if base is None or rows is None:
                out.append(Comparison(prob, n, lam, pm, rule, baseline, other, "absent"))
                continue
            a = [r.generations for r in base]
            b = [r.generations for r in rows]
            verdict, p = _verdict(a, b, significance)
            out.append(Comparison(prob, n, lam, pm, rule, baseline, other, verdict, p,
                                  float(np.median(a)), float(np.median(b))))
    return out


def comparisons_to_json(comparisons: Sequence[Comparison], significance: float) -> dict:
    return {"significance": significance, "comparisons": [asdict(c) for c in comparisons]}
