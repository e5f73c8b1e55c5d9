#!/usr/bin/env python3
"""Operation counts and wall time of the product and dense probability kernels."""

import argparse
import time

import numpy as np

from qmle.benchmark import noisy_haar
from qmle.likelihood import OpCounter, born_probs_dense, born_probs_product
from qmle.measurements import pauli6_register, product_pom


def best_time(fn, repeats):
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--max-qubits", type=int, default=8)
    p.add_argument("--max-dense-qubits", type=int, default=6, help="dense POM memory grows as 24^n")
    p.add_argument("--repeats", type=int, default=5)
    args = p.parse_args(argv)

    print(f"{'n':>2} {'ops':>14} {'ratio':>6} {'product s':>10} {'dense s':>10} {'speedup':>8}")
    prev = None
    for n in range(1, args.max_qubits + 1):
        pom = product_pom(pauli6_register(), n)
        rho = noisy_haar(pom.dim, n, 0.1)
        counter = OpCounter()
        born_probs_product(rho, pom, counter)
        t_prod = best_time(lambda: born_probs_product(rho, pom), args.repeats)
        ratio = f"{counter.ops / prev:6.2f}" if prev else " " * 6
        line = f"{n:2d} {counter.ops:14d} {ratio} {t_prod:10.5f}"
        if n <= args.max_dense_qubits:
            dense = pom.materialize()
            t_dense = best_time(lambda: born_probs_dense(rho, dense), args.repeats)
            line += f" {t_dense:10.5f} {t_dense / t_prod:8.1f}"
            del dense
        print(line, flush=True)
        prev = counter.ops


if __name__ == "__main__":
    main()
