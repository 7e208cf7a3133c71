"""The (1+lambda) generation loop and run driver.

Two interchangeable backends execute full runs: the compiled ``_kernel``
extension and a pure-Python loop built from the public operations in this
package.  They draw from the random source in the same order and return
identical results.  The compiled one is used when importable; set
``HQEA_BACKEND=python`` to force the fallback.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
import io
import math
import os
from typing import Sequence

import numpy as np

from .controllers import (
    GenerationFeedback,
    OneFifthController,
    RateController,
    StaticController,
    TwoRateController,
    TwoRateState,
    two_rate_sample_rates,
)
from .core import BitString, MASK64, RandomSource, random_bitstring
from .mutation import RateBounds, resolve_p_min, sample_flips
from .problems import KIND_CODES, DeltaEvaluator, Problem, delta_evaluator
from .qlearning import QLearningController, compute_reward, compute_state

try:
    from . import _kernel
except ImportError:  # extension not built
    _kernel = None

ALGORITHMS = ("static", "eaab", "tworate", "qea", "hqea")
ALGORITHM_CODES = {name: i for i, name in enumerate(ALGORITHMS)}
_ACTION_NAMES = {-1: "", 0: "mult", 1: "divide", 2: "low", 3: "high"}


def available_backends() -> tuple[str, ...]:
    return ("compiled", "python") if _kernel is not None else ("python",)


def default_backend() -> str:
    wanted = os.environ.get("HQEA_BACKEND", "").strip().lower()
    if wanted in ("python", "py"):
        return "python"
    if wanted == "compiled" and _kernel is None:
        raise RuntimeError("HQEA_BACKEND=compiled but the extension is not built")
    return "compiled" if _kernel is not None else "python"


BACKEND = default_backend()


@dataclass(frozen=True)
class RunConfig:
    problem: Problem
    lam: int
    algorithm: str
    p_min: float | str = "inv-n"
    p_max: float = 0.5
    strict_rule: bool = True
    A: float = 2.0
    b: float = 0.5
    alpha: float = 0.8
    gamma: float = 0.2
    a_mult: float = 2.0
    a_divide: float = 0.5
    seed: int = 0
    generation_budget: int | None = None

    def __post_init__(self):
        if self.lam < 1:
            raise ValueError(f"lambda must be >= 1, got {self.lam}")
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algorithm!r}; choose from {ALGORITHMS}")
        self.bounds  # validates the rate bounds
        if self.generation_budget is not None and self.generation_budget < 0:
            raise ValueError("generation budget must be non-negative")

    @property
    def bounds(self) -> RateBounds:
        return RateBounds(resolve_p_min(self.p_min, self.problem.n), self.p_max)

    def budget(self) -> int:
        """Generation cap; defaults to ceil(10^6 * n / lambda)."""
        if self.generation_budget is not None:
            return self.generation_budget
        return math.ceil(1_000_000 * self.problem.n / self.lam)


@dataclass(frozen=True)
class TraceRecord:
    """One generation: ``p`` is the rate used to sample it, ``action`` the
    controller decision taken afterwards (empty when none applies)."""

    generation: int
    parent_fitness: int
    best_fitness: int
    p: float
    state: int
    action: str
    reward: float


TRACE_COLUMNS = ("generation", "parent_fitness", "best_fitness", "p", "state", "action", "reward")


@dataclass(frozen=True)
class RunResult:
    generations: int
    evaluations: int
    hit_optimum: bool
    final_fitness: int
    seed: int
    trace: tuple[TraceRecord, ...] | None = field(default=None, repr=False)


def make_controller(cfg: RunConfig) -> RateController:
    n, bounds, strict = cfg.problem.n, cfg.bounds, cfg.strict_rule
    if cfg.algorithm == "static":
        return StaticController(n, bounds, strict)
    if cfg.algorithm == "eaab":
        return OneFifthController(n, bounds, strict, cfg.A, cfg.b)
    if cfg.algorithm == "tworate":
        return TwoRateController(n, bounds, strict)
    return QLearningController(n, bounds, strict, lam=cfg.lam, hybrid=cfg.algorithm == "hqea",
                               alpha=cfg.alpha, gamma=cfg.gamma,
                               a_mult=cfg.a_mult, a_divide=cfg.a_divide)


def _breed(ev: DeltaEvaluator, rates: Sequence[float], tags: Sequence[str] | None,
           rng: RandomSource):
    """Sample and evaluate one generation of offspring against ``ev``'s parent.

    The best offspring is kept by reservoir sampling over ties, which picks
    uniformly among all offspring of maximal fitness.
    """
    n = ev.n
    best, ties = -1, 0
    best_flips, best_tag = None, None
    fits = []
    for i, p in enumerate(rates):
        flips = sample_flips(n, p, rng)
        f = ev.offspring_value(flips)
        fits.append(f)
        if f > best:
            best, ties = f, 1
            best_flips, best_tag = flips, tags[i] if tags else None
        elif f == best:
            ties += 1
            if rng.integers(ties) == 0:
                best_flips, best_tag = flips, tags[i] if tags else None
    return best, best_flips, best_tag, fits


def run_generation(parent: BitString, p: float, cfg: RunConfig,
                   rng: RandomSource) -> tuple[BitString, GenerationFeedback]:
    """Sample ``cfg.lam`` offspring of ``parent`` and apply elitist selection.

    For the 2-rate algorithm ``p`` is its base rate r/n, and the offspring
    use the capped sub-rates p/2 and 2p.
    """
    ev = delta_evaluator(cfg.problem, parent)
    if cfg.algorithm == "tworate":
        st = TwoRateState(p, cfg.problem.n, cfg.bounds)
        tags = two_rate_sample_rates(st, cfg.lam, rng)
        low, high = st.low_rate(), st.high_rate()
        rates = [low if t == "low" else high for t in tags]
    else:
        tags, rates = None, [p] * cfg.lam
    f_old = ev.value
    best, flips, tag, fits = _breed(ev, rates, tags, rng)
    fb = GenerationFeedback(f_old, best, tuple(fits), tag)
    if best >= f_old:
        return parent.flip(flips), fb
    return parent, fb


def _run_python(cfg: RunConfig, trace: bool) -> tuple[int, bool, int, list | None]:
    rng = RandomSource(cfg.seed)
    ev = delta_evaluator(cfg.problem, random_bitstring(cfg.problem.n, rng))
    optimum = cfg.problem.optimum_value()
    ctrl = make_controller(cfg)
    budget = cfg.budget()
    rows = [] if trace else None
    gens = 0
    hit = ev.value >= optimum
    while not hit and gens < budget:
        f_old, p_used = ev.value, ctrl.p
        rates, tags = ctrl.offspring_rates(cfg.lam, rng)
        best, flips, tag, fits = _breed(ev, rates, tags, rng)
        gens += 1
        if best >= f_old:
            ev.accept(flips, best)
        action = ""
        if best >= optimum:
            hit = True
        else:
            action = ctrl.update(GenerationFeedback(f_old, best, tuple(fits), tag), rng)
        if rows is not None:
            rows.append((gens, f_old, best, p_used, compute_state(fits, f_old, cfg.strict_rule),
                         action, compute_reward(f_old, best)))
    return gens, hit, ev.value, rows


def _run_compiled(cfg: RunConfig, trace: bool) -> tuple[int, bool, int, list | None]:
    prob = cfg.problem
    bounds = cfg.bounds
    target = np.asarray(prob.target if prob.target is not None else (), dtype=np.uint8)
    sigma = np.asarray(prob.permutation if prob.permutation is not None else (), dtype=np.int64)
    gens, hit, final, rows = _kernel.run(
        prob.n, cfg.lam, ALGORITHM_CODES[cfg.algorithm], KIND_CODES[prob.kind], prob.k or 0,
        target, sigma, int(cfg.seed) & MASK64, bounds.p_min, bounds.p_max,
        cfg.A, cfg.b, cfg.strict_rule, cfg.alpha, cfg.gamma, cfg.a_mult, cfg.a_divide,
        cfg.budget(), trace,
    )
    if rows is not None:
        rows = [(g, f, fb, p, s, _ACTION_NAMES[a], r) for g, f, fb, p, s, a, r in rows]
    return gens, bool(hit), final, rows


def run_to_optimum(cfg: RunConfig, trace: bool = False, backend: str | None = None) -> RunResult:
    """Run from a uniformly random start with p = 1/n until an optimal point
    is evaluated or the generation budget runs out."""
    backend = backend or BACKEND
    if backend == "compiled":
        if _kernel is None:
            raise RuntimeError("compiled backend requested but the extension is not built")
        gens, hit, final, rows = _run_compiled(cfg, trace)
    elif backend == "python":
        gens, hit, final, rows = _run_python(cfg, trace)
    else:
        raise ValueError(f"unknown backend {backend!r}")
    records = None if rows is None else tuple(TraceRecord(*row) for row in rows)
    return RunResult(gens, 1 + gens * cfg.lam, hit, final, cfg.seed, records)


def write_trace_csv(records: Sequence[TraceRecord], out: io.TextIOBase) -> None:
    w = csv.writer(out, lineterminator="\n")
    w.writerow(TRACE_COLUMNS)
    for rec in records:
        w.writerow((rec.generation, rec.parent_fitness, rec.best_fitness, repr(rec.p),
                    rec.state, rec.action, repr(rec.reward)))


def feedback_from_trace(records: Sequence[TraceRecord], lam: int,
                        strict_rule: bool) -> list[GenerationFeedback]:
    """Rebuild controller feedback from trace rows.

    Offspring fitnesses are synthesized so that the maximum and the number of
    offspring counted as improving match the record, which is all the
    success-rule and HQEA controllers look at.
    """
    out = []
    for rec in records:
        f_old, best, s = rec.parent_fitness, rec.best_fitness, rec.state
        filler = f_old if strict_rule else f_old - 1
        fits = (best,) * s + (filler,) * (lam - s) if s else (best,) * lam
        out.append(GenerationFeedback(f_old, best, fits))
    return out
