"""Diluted direct-gradient iteration in the factored space."""

from __future__ import annotations

import numpy as np

from ..likelihood import Frequencies
from ..measurements import POM, ProductPOM
from ..operators import hermitize
from .base import STALLED, Run, SolverConfig, SolverResult, initial_state, make_likelihood

EPS_FLOOR = 1e-30


def dg_solve(freq: Frequencies, pom: POM | ProductPOM, cfg: SolverConfig | None = None) -> SolverResult:
    """``rho <- M rho M / tr(...)`` with ``M = 1 + eps (R - 1)``.

    ``eps`` is halved until F does not increase, then regrown by ``alpha``
    up to ``eps_dg`` after every accepted step.
    """
    cfg = cfg or SolverConfig(algorithm="dg")
    lik = make_likelihood(freq, pom, cfg)
    run = Run(cfg, lik)
    rho = initial_state(cfg, lik.dim)
    p = lik.probs(rho)
    F = lik.value(p)
    if not np.isfinite(F):
        raise ValueError("objective is not finite at the starting state")
    run.offer(rho, F)
    eye = np.eye(lik.dim)
    eps = cfg.eps_dg

    for _ in range(cfg.max_iter):
        r_minus = lik.r_operator(p) - eye
        while True:
            m = eye + eps * r_minus
            new = m @ rho @ m
            new = hermitize(new / np.trace(new).real)
            p_new = lik.probs(new)
            F_new = lik.value(p_new)
            if F_new <= F:
                break
            eps *= 0.5
            if eps < EPS_FLOOR:
                run.stop(STALLED)
                return run.result()
        rho, p, F = new, p_new, F_new
        if run.record(rho, F, eps, False, "DG"):
            break
        eps = min(eps * cfg.alpha, cfg.eps_dg)
    return run.result()
