#!/usr/bin/env python3
"""Time-to-target sweep over qubit number for random noisy states.

Each row of the output CSV is one (n, state, algorithm) run; timeouts are
recorded at the budget. A per-n table of mean seconds is printed at the end.

    python scripts/time_to_target.py --qubits 1-5 --states 10 --algorithms apg,cg-apg,cg
"""

import argparse
from collections import defaultdict

import numpy as np

from qmle.benchmark import BenchmarkSpec, read_benchmark_csv, run_benchmark
from qmle.cli import _qubit_range
from qmle.sampling import SamplingPlan
from qmle.solvers import ALGORITHMS


def summarize(rows):
    table = defaultdict(list)
    for r in rows:
        table[int(r["n"]), r["algorithm"]].append(float(r["seconds"]))
    algs = sorted({a for _, a in table}, key=ALGORITHMS.index)
    print("n  " + "".join(f"{a:>12}" for a in algs))
    for n in sorted({n for n, _ in table}):
        print(f"{n:<3}" + "".join(f"{np.mean(table[n, a]):12.4f}" if (n, a) in table else " " * 12 for a in algs))


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--qubits", default="1-4")
    p.add_argument("--states", type=int, default=50)
    p.add_argument("--noise", type=float, default=0.1)
    p.add_argument("--algorithms", default=",".join(ALGORITHMS))
    p.add_argument("--time-budget-s", type=float, default=600.0)
    p.add_argument("--target-l-ratio", type=float, default=0.999)
    p.add_argument("--no-product-kernel", action="store_true")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="results/time_to_target.csv")
    p.add_argument("--summary-only", action="store_true", help="summarize an existing CSV")
    args = p.parse_args(argv)

    if not args.summary_only:
        spec = BenchmarkSpec(qubits=_qubit_range(args.qubits), states_per_n=args.states, noise=args.noise,
                             algorithms=tuple(args.algorithms.split(",")), target_ratio=args.target_l_ratio,
                             time_budget=args.time_budget_s, plan=SamplingPlan("exact"), seed=args.seed,
                             product_kernel=not args.no_product_kernel)
        run_benchmark(spec, args.out, lambda r: print(
            f"n={r['n']} seed={r['state_seed']} {r['algorithm']:>6}: {r['status']} {r['seconds']}s", flush=True))
    summarize(read_benchmark_csv(args.out))


if __name__ == "__main__":
    main()
