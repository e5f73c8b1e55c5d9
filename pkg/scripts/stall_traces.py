#!/usr/bin/env python3
"""F-versus-time traces for all four algorithms on a noisy W state.

Writes one trace CSV per algorithm plus a summary of F - F_min, where F_min
is the smallest F reached by any of the runs.

    python scripts/stall_traces.py --qubits 5 --out results/
"""

import argparse
from pathlib import Path

from qmle.io import write_trace_csv
from qmle.measurements import pauli6_register, product_pom
from qmle.operators import add_white_noise, pure_to_density, w_state
from qmle.sampling import SamplingPlan, simulate
from qmle.solvers import ALGORITHMS, SolverConfig, solve


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--qubits", type=int, default=5)
    p.add_argument("--noise", type=float, default=0.1)
    p.add_argument("--shots", type=int, default=100, help="copies per measurement setting")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--max-iter", type=int, default=2000)
    p.add_argument("--time-budget-s", type=float, default=None)
    p.add_argument("--algorithms", default=",".join(ALGORITHMS))
    p.add_argument("--out", default="results")
    args = p.parse_args(argv)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    n = args.qubits
    pom = product_pom(pauli6_register(), n)
    rho = add_white_noise(pure_to_density(w_state(n)), args.noise)
    freq = simulate(rho, pom, SamplingPlan("per_setting", args.shots, None, args.seed))
    print(f"n={n}: N={freq.total}, {freq.indices.size} of {pom.num_outcomes} outcomes observed")

    results = {}
    for alg in args.algorithms.split(","):
        cfg = SolverConfig(algorithm=alg, max_iter=args.max_iter, stall_tol=0.0, time_budget=args.time_budget_s)
        res = solve(freq, pom, cfg)
        write_trace_csv(out / f"stall_n{n}_{alg}.csv", res.trace)
        results[alg] = res
        print(f"{alg:>7}: {len(res.trace):5d} iterations, {res.trace.elapsed[-1]:8.2f}s, {res.status}")

    f_min = min(r.F for r in results.values())
    print(f"F_min = {f_min!r}")
    for alg, res in results.items():
        print(f"{alg:>7}: F - F_min = {res.F - f_min:.3e}")


if __name__ == "__main__":
    main()
