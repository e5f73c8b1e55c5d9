"""Accelerated projected gradient with adaptive restart, in rho-space."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from ..likelihood import Frequencies
from ..measurements import POM, ProductPOM
from ..projection import project_to_states
from .base import STALLED, Run, SolverConfig, SolverResult, initial_state, inner, make_likelihood


@dataclass
class APGStep:
    """Everything a monitor needs to audit one APG iteration."""

    iteration: int
    t: float
    t_prev: float
    rho_prev: np.ndarray
    candidate: np.ndarray
    rho: np.ndarray
    varrho_prev: np.ndarray
    varrho: np.ndarray
    theta_prev: float
    theta_hat: float
    theta: float
    F_candidate: float
    F_varrho_prev: float
    grad_inner: float
    delta_norm2: float
    overlap: float
    restarted: bool
    guarded: bool


def apg_solve(freq: Frequencies, pom: POM | ProductPOM, cfg: SolverConfig | None = None,
              monitor: Callable[[APGStep], None] | None = None) -> SolverResult:
    """Minimize F over the state space with APG; returns the best iterate and its trace."""
    cfg = cfg or SolverConfig(algorithm="apg")
    lik = make_likelihood(freq, pom, cfg)
    run = Run(cfg, lik)
    rho0 = initial_state(cfg, lik.dim)
    p0 = lik.probs(rho0)
    run_apg(run, rho0, p0, phase="APG", monitor=monitor)
    return run.result()


def run_apg(run: Run, rho: np.ndarray, p_rho: np.ndarray, phase: str = "APG",
            monitor: Callable[[APGStep], None] | None = None) -> None:
    cfg, lik = run.cfg, run.lik
    F_rho = lik.value(p_rho)
    if not np.isfinite(F_rho):
        raise ValueError("objective is not finite at the starting state")
    run.offer(rho, F_rho)

    varrho, p_var, F_var = rho, p_rho, F_rho
    grad = -lik.r_operator(p_var)
    theta = 1.0
    t = cfg.t1
    prev_var = prev_grad = None
    restarted = True  # suppresses BB on the first iteration

    for i in range(1, cfg.max_iter + 1):
        t_prev = t
        if i > 1:
            bb = None
            if cfg.use_bb and not restarted and prev_grad is not None:
                dg = grad - prev_grad
                den = inner(dg, dg)
                if den > 0:
                    bb = inner(varrho - prev_var, dg) / den
            t = bb if bb is not None and bb > 0 and math.isfinite(bb) else cfg.alpha * t

        for _ in range(cfg.max_backtracks + 1):
            cand = project_to_states(varrho - t * grad)
            delta = cand - varrho
            p_c = lik.probs(cand)
            F_c = lik.value(p_c)
            lin = inner(grad, delta)
            dn2 = inner(delta, delta)
            if F_c <= F_var + lin + dn2 / (2 * t):
                break
            t *= cfg.beta
            if t < 1e-300:
                break
        else:
            run.stop(STALLED)
            return
        if not F_c <= F_var + lin + dn2 / (2 * t):
            run.stop(STALLED)
            return
        run.offer(cand, F_c)

        delta_hat = cand - rho
        den = math.sqrt(dn2 * inner(delta_hat, delta_hat))
        overlap = inner(delta, delta_hat) / den if den > 0 else 1.0

        rho_prev, varrho_prev, theta_prev, F_var_prev = rho, varrho, theta, F_var
        guarded = False
        if overlap < cfg.gamma:
            # restart: drop the candidate, fall back to the previous iterate
            restarted = True
            theta_hat = theta
            theta = 1.0
            new_var, p_new = rho, p_rho
        else:
            restarted = False
            theta_hat = theta * math.sqrt(t_prev / t)
            theta = 0.5 * (1 + math.sqrt(1 + 4 * theta_hat**2))
            rho, p_rho, F_rho = cand, p_c, F_c
            coef = (theta_hat - 1) / theta
            if coef == 0:
                new_var, p_new = rho, p_rho
            else:
                new_var = cand + coef * delta_hat
                p_new = lik.probs(new_var)
                if not lik.supported_positive(p_new):
                    guarded = True
                    new_var, p_new = rho, p_rho

        prev_var, prev_grad = varrho, grad
        varrho, p_var = new_var, p_new
        F_var = F_rho if varrho is rho else lik.value(p_var)
        grad = -lik.r_operator(p_var)

        if monitor is not None:
            monitor(APGStep(i, t, t_prev, rho_prev, cand, rho, varrho_prev, varrho, theta_prev,
                            theta_hat, theta, F_c, F_var_prev, lin, dn2, overlap, restarted, guarded))
        if run.record(rho, F_rho, t, restarted, phase):
            return
