"""Time the compiled kernel against the pure-Python loop on identical runs.

    python benchmarks/bench_backends.py --n 1000 --lambdas 1,16,256 --runs 3

Both backends must return identical results; the script checks that before
reporting the speedup.
"""
import argparse
import time

from hqea.engine import ALGORITHMS, RunConfig, available_backends, run_to_optimum
from hqea.problems import parse_problem


def time_runs(configs, backend):
    start = time.perf_counter()
    results = [run_to_optimum(cfg, backend=backend) for cfg in configs]
    return time.perf_counter() - start, results


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--problem", default="onemax")
    ap.add_argument("--n", type=int, default=1000)
    ap.add_argument("--lambdas", default="1,16,256")
    ap.add_argument("--algorithms", default=",".join(ALGORITHMS))
    ap.add_argument("--pmin", default="inv-n2")
    ap.add_argument("--runs", type=int, default=3)
    args = ap.parse_args(argv)

    if "compiled" not in available_backends():
        raise SystemExit("compiled extension not built; reinstall with a C compiler available")
    problem = parse_problem(args.problem, args.n)
    print(f"{'algorithm':<9} {'lambda':>6} {'gens':>8} {'python s':>9} {'compiled s':>10} {'speedup':>8}")
    for algo in args.algorithms.split(","):
        for lam in (int(v) for v in args.lambdas.split(",")):
            configs = [RunConfig(problem, lam, algo, p_min=args.pmin, seed=s) for s in range(args.runs)]
            t_py, r_py = time_runs(configs, "python")
            t_c, r_c = time_runs(configs, "compiled")
            if r_py != r_c:
                raise SystemExit(f"backends disagree for {algo} lambda={lam}")
            gens = sum(r.generations for r in r_c) / len(r_c)
            print(f"{algo:<9} {lam:>6} {gens:>8.0f} {t_py:>9.3f} {t_c:>10.4f} {t_py / t_c:>7.0f}x")


if __name__ == "__main__":
    main()
