"""(1+lambda) evolutionary algorithms with dynamic mutation-rate control.

Five controllers are available: a static rate, the success-based EA(A,b)
rule, the 2-rate scheme, tabular Q-learning (QEA) and the hybrid of
Q-learning with the success rule (HQEA).  Benchmarks are OneMax,
LeadingOnes and the Neutrality, Plateau and Ruggedness transforms.
"""
from .controllers import ControllerConfig, GenerationFeedback, TwoRateState
from .core import BitString, RandomSource, derive_seed, random_bitstring
from .engine import ALGORITHMS, BACKEND, RunConfig, RunResult, run_generation, run_to_optimum
from .experiments import (
    ExperimentPlan,
    RunTable,
    SummaryStats,
    compare_algorithms,
    run_experiment,
    summarize,
)
from .mutation import RateBounds, clamp_rate, shift_mutate
from .problems import Problem, optimum_value, parse_problem
from .stats import wilcoxon_rank_sum

__version__ = "0.1.0"
