"""Time-to-target sweeps over qubit number, states and algorithms."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Iterable

import numpy as np

from .io import parse_pom_spec
from .likelihood import Frequencies
from .measurements import POM, ProductPOM, product_pom
from .operators import add_white_noise, haar_random_pure, pure_to_density
from .sampling import SamplingPlan, born_probs, settings_layout, simulate
from .solvers import ALGORITHMS, CONVERGED, TIME_OUT, SolverConfig, SolverResult, solve

BENCH_HEADER = ["n", "state_seed", "algorithm", "product_kernel", "iterations", "seconds", "final_F", "status"]


@dataclass
class BenchmarkSpec:
    qubits: tuple[int, ...] = (1, 2, 3, 4)
    states_per_n: int = 50
    noise: float = 0.1
    pom: str = "pauli6"
    algorithms: tuple[str, ...] = ALGORITHMS
    target_ratio: float = 0.999
    time_budget: float = 600.0
    plan: SamplingPlan = field(default_factory=SamplingPlan)
    n_copies: int | None = None   # N for exact mode; defaults to shots * settings
    seed: int = 0
    product_kernel: bool = True
    solver: SolverConfig = field(default_factory=SolverConfig)

    def __post_init__(self):
        if self.states_per_n < 1 or self.time_budget <= 0 or not self.qubits:
            raise ValueError("benchmark needs positive state count, time budget and qubit range")
        if not 0 < self.target_ratio <= 1:
            raise ValueError("target ratio must lie in (0, 1]")
        bad = set(self.algorithms) - set(ALGORITHMS)
        if bad:
            raise ValueError(f"unknown algorithms {sorted(bad)}")


def state_seed(base: int, n: int, index: int) -> int:
    return base + 1000 * n + index


def noisy_haar(dim: int, seed: int, noise: float) -> np.ndarray:
    return add_white_noise(pure_to_density(haar_random_pure(dim, seed)), noise)


def copies_for(pom: POM | ProductPOM, plan: SamplingPlan, freq: Frequencies, n_copies: int | None) -> int:
    """N used in the ``L/L_max`` target."""
    if freq.total is not None:
        return freq.total
    if n_copies is not None:
        return n_copies
    if isinstance(pom, ProductPOM):
        m, _ = settings_layout(pom)
        return plan.shots_per_setting * m**pom.n
    raise ValueError("exact-frequency runs on this POM need an explicit number of copies")


def f_target(freq: Frequencies, rho_true: np.ndarray, pom, n_copies: int, ratio: float) -> float:
    """``F(rho_true) - ln(ratio)/N``; for exact data F(rho_true) is the entropy of f."""
    if freq.is_exact:
        f_ref = freq.entropy()
    else:
        p = born_probs(rho_true, pom)[freq.indices]
        f_ref = float(-np.dot(freq.values, np.log(p)))
    return f_ref - math.log(ratio) / n_copies


def time_to_target(res: SolverResult, target: float, budget: float) -> float:
    if res.status == TIME_OUT:
        return budget
    hit = res.trace.first_reaching(target)
    if hit is not None:
        return hit.elapsed
    return res.trace.records[-1].elapsed if res.trace.records else 0.0


def benchmark_problem(spec: BenchmarkSpec, n: int, index: int):
    """``(seed, pom, rho_true, freq, F_target)`` for one benchmark instance."""
    reg = parse_pom_spec(spec.pom)
    if isinstance(reg, ProductPOM):
        raise ValueError("benchmark POM must be a register spec; it is repeated over n registers")
    pom = product_pom(reg, n)
    seed = state_seed(spec.seed, n, index)
    rho = noisy_haar(pom.dim, seed, spec.noise)
    freq = simulate(rho, pom, replace(spec.plan, seed=seed))
    target = f_target(freq, rho, pom, copies_for(pom, spec.plan, freq, spec.n_copies), spec.target_ratio)
    return seed, pom, rho, freq, target


def run_benchmark(spec: BenchmarkSpec, out_path=None,
                  progress: Callable[[dict], None] | None = None) -> list[dict]:
    """Run every (n, state, algorithm) combination; rows are appended to ``out_path`` as they finish."""
    rows = []
    fh = None
    if out_path is not None:
        fh = open(out_path, "w", newline="", encoding="utf-8")
        writer = csv.DictWriter(fh, BENCH_HEADER)
        writer.writeheader()
        fh.flush()
    try:
        for n in spec.qubits:
            for index in range(spec.states_per_n):
                seed, pom, _, freq, target = benchmark_problem(spec, n, index)
                for alg in spec.algorithms:
                    cfg = replace(spec.solver, algorithm=alg, f_target=target, time_budget=spec.time_budget,
                                  product_kernel=spec.product_kernel)
                    res = solve(freq, pom, cfg)
                    row = {
                        "n": n, "state_seed": seed, "algorithm": alg,
                        "product_kernel": int(spec.product_kernel),
                        "iterations": len(res.trace),
                        "seconds": f"{time_to_target(res, target, spec.time_budget):.6f}",
                        "final_F": f"{res.F:.15g}", "status": res.status,
                    }
                    rows.append(row)
                    if fh is not None:
                        writer.writerow(row)
                        fh.flush()
                    if progress is not None:
                        progress(row)
    finally:
        if fh is not None:
            fh.close()
    return rows


def read_benchmark_csv(path) -> list[dict]:
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def mean_seconds(rows: Iterable[dict], algorithm: str, n: int | None = None) -> float:
    vals = [float(r["seconds"]) for r in rows
            if r["algorithm"] == algorithm and (n is None or int(r["n"]) == n)]
    return float(np.mean(vals)) if vals else math.nan


def all_converged(rows: Iterable[dict]) -> bool:
    return all(r["status"] == CONVERGED for r in rows)
