from .apg import APGStep, apg_solve
from .base import (ALGORITHMS, CONVERGED, MAX_ITER, STALLED, TIME_OUT, SolverConfig, SolverResult,
                   SolverTrace, TraceRecord, check_termination)
from .cg import cg_solve, line_search
from .dg import dg_solve
from .hybrid import cg_apg_solve

SOLVERS = {"apg": apg_solve, "cg": cg_solve, "dg": dg_solve, "cg-apg": cg_apg_solve}


def solve(freq, pom, cfg: SolverConfig) -> SolverResult:
    """Dispatch on ``cfg.algorithm``."""
    return SOLVERS[cfg.algorithm](freq, pom, cfg)


__all__ = [
    "ALGORITHMS", "APGStep", "CONVERGED", "MAX_ITER", "SOLVERS", "STALLED", "TIME_OUT",
    "SolverConfig", "SolverResult", "SolverTrace", "TraceRecord", "apg_solve", "cg_apg_solve",
    "cg_solve", "check_termination", "dg_solve", "line_search", "solve",
]
