"""Solver configuration, iteration traces and termination."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from ..likelihood import Frequencies, Likelihood
from ..measurements import POM, ProductPOM

ALGORITHMS = ("apg", "cg", "dg", "cg-apg")

CONVERGED = "converged_target"
STALLED = "stalled"
MAX_ITER = "max_iter"
TIME_OUT = "time_out"


@dataclass
class SolverConfig:
    algorithm: str = "cg-apg"
    beta: float = 0.5            # backtracking shrink factor
    alpha: float = 1.1           # step growth when BB is unavailable
    gamma: float = 0.01          # restart threshold on the normalized overlap
    phi: float = 0.01            # CG -> APG switchover angle (radians)
    t1: float = 1.0              # initial APG step size
    eps_dg: float = 0.05         # DG dilution ceiling
    max_iter: int = 10_000
    stall_window: int = 10
    stall_tol: float = 1e-12
    f_target: float | None = None
    time_budget: float | None = None
    use_bb: bool = True
    product_kernel: bool = True
    max_backtracks: int = 100
    ls_step0: float = 0.1        # first CG trial step
    ls_max_evals: int = 30
    ls_refine: int = 2           # parabolic refinements after bracketing
    ls_max_rel_step: float = 1.0  # cap on |step * direction| relative to |A| = 1
    rho0: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algorithm!r}; choose from {ALGORITHMS}")
        if not 0 < self.beta < 1:
            raise ValueError("beta must lie in (0, 1)")
        if not self.alpha > 1:
            raise ValueError("alpha must exceed 1")
        if not self.t1 > 0:
            raise ValueError("t1 must be positive")
        if not 0 < self.eps_dg <= 1:
            raise ValueError("eps_dg must lie in (0, 1]")
        if self.max_iter < 1 or self.stall_window < 1:
            raise ValueError("max_iter and stall_window must be positive")
        if self.time_budget is not None and self.time_budget <= 0:
            raise ValueError("time budget must be positive")
        if not self.ls_max_rel_step > 0:
            raise ValueError("ls_max_rel_step must be positive")
        if self.ls_max_evals < 2:
            raise ValueError("line search needs at least two evaluations")


class TraceRecord(NamedTuple):
    iteration: int
    elapsed: float
    F: float
    step: float
    restarted: bool
    phase: str


@dataclass
class SolverTrace:
    records: list[TraceRecord] = field(default_factory=list)
    status: str | None = None

    def __len__(self) -> int:
        return len(self.records)

    @property
    def F(self) -> np.ndarray:
        return np.array([r.F for r in self.records])

    @property
    def elapsed(self) -> np.ndarray:
        return np.array([r.elapsed for r in self.records])

    @property
    def phases(self) -> list[str]:
        return [r.phase for r in self.records]

    def first_reaching(self, f_target: float) -> TraceRecord | None:
        for r in self.records:
            if r.F <= f_target:
                return r
        return None


@dataclass
class SolverResult:
    rho: np.ndarray
    F: float
    trace: SolverTrace
    n_probs: int = 0
    n_grads: int = 0

    @property
    def status(self) -> str | None:
        return self.trace.status


def check_termination(trace: SolverTrace, cfg: SolverConfig, since: int = 0) -> str | None:
    """Status after the latest record, or None to keep iterating.

    Priority: target reached, stalled, iteration budget, time budget. The
    stall test runs on the best-so-far F of the records from index
    ``since`` on, so momentum overshoots do not count as stalls and a new
    phase gets a fresh window.
    """
    if not trace.records:
        return None
    last = trace.records[-1]
    if cfg.f_target is not None and last.F <= cfg.f_target:
        return CONVERGED
    w = cfg.stall_window
    if len(trace) - since > w:
        best = np.minimum.accumulate(trace.F[since:])
        if best[-1 - w] - best[-1] <= cfg.stall_tol * max(1.0, abs(best[-1])):
            return STALLED
    if len(trace) >= cfg.max_iter:
        return MAX_ITER
    if cfg.time_budget is not None and last.elapsed >= cfg.time_budget:
        return TIME_OUT
    return None


class Run:
    """Shared bookkeeping for one solver run: clock, trace and best iterate."""

    def __init__(self, cfg: SolverConfig, lik: Likelihood):
        self.cfg = cfg
        self.lik = lik
        self.trace = SolverTrace()
        self.start = time.perf_counter()
        self.best_rho: np.ndarray | None = None
        self.best_F = np.inf
        self.phase_start = 0

    def offer(self, rho: np.ndarray, F: float) -> None:
        if F < self.best_F:
            self.best_F = F
            self.best_rho = rho

    def record(self, rho: np.ndarray, F: float, step: float, restarted: bool, phase: str) -> str | None:
        self.offer(rho, F)
        self.trace.records.append(TraceRecord(len(self.trace) + 1, time.perf_counter() - self.start,
                                              float(F), float(step), bool(restarted), phase))
        self.trace.status = check_termination(self.trace, self.cfg, self.phase_start)
        return self.trace.status

    def new_phase(self) -> None:
        self.phase_start = len(self.trace)
        self.trace.status = None

    def stop(self, status: str) -> str:
        self.trace.status = status
        return status

    def result(self) -> SolverResult:
        if self.trace.status is None:
            self.trace.status = check_termination(self.trace, self.cfg, self.phase_start) or MAX_ITER
        return SolverResult(self.best_rho, float(self.best_F), self.trace, self.lik.n_probs, self.lik.n_grads)


def make_likelihood(freq: Frequencies, pom: POM | ProductPOM, cfg: SolverConfig) -> Likelihood:
    return Likelihood(freq, pom, use_product=cfg.product_kernel)


def initial_state(cfg: SolverConfig, d: int) -> np.ndarray:
    if cfg.rho0 is None:
        return np.eye(d, dtype=complex) / d
    rho0 = np.asarray(cfg.rho0, dtype=complex)
    if rho0.shape != (d, d):
        raise ValueError(f"rho0 has shape {rho0.shape}, expected {(d, d)}")
    return rho0


def inner(a: np.ndarray, b: np.ndarray) -> float:
    """Real trace pairing ``Re tr(a^dagger b)``; equals ``tr(ab)`` for Hermitian a."""
    return float(np.vdot(a, b).real)
