"""CG in the factored space, handing over to APG once the Hessian proxy settles."""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

from ..likelihood import Frequencies
from ..measurements import POM, ProductPOM
from .apg import APGStep, run_apg
from .base import Run, SolverConfig, SolverResult, make_likelihood
from .cg import run_cg


def cg_apg_solve(freq: Frequencies, pom: POM | ProductPOM, cfg: SolverConfig | None = None,
                 monitor: Callable[[APGStep], None] | None = None) -> SolverResult:
    """Start CG at the maximally mixed state; switch to APG at the first CG
    iteration where the cosine between consecutive ``f_k/p_k^2`` vectors
    exceeds ``cos(phi)`` (or when CG stalls)."""
    cfg = cfg or SolverConfig(algorithm="cg-apg")
    lik = make_likelihood(freq, pom, cfg)
    run = Run(cfg, lik)
    a0 = np.eye(lik.dim, dtype=complex) / math.sqrt(lik.dim)
    outcome, rho, p = run_cg(run, a0, phase="CG", switch_cos=math.cos(cfg.phi))
    if outcome == "switch":
        run.new_phase()
        run_apg(run, rho, p, phase="APG", monitor=monitor)
    return run.result()
