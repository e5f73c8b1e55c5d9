"""Polak-Ribiere conjugate gradient in the factored space ``rho = A^dagger A / tr(A^dagger A)``."""

from __future__ import annotations

import math

import numpy as np

from ..likelihood import Frequencies, proxy_angle_cos
from ..measurements import POM, ProductPOM
from .base import STALLED, Run, SolverConfig, SolverResult, inner, make_likelihood


def factored_state(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Normalize ``x`` to unit Frobenius norm and return it with ``x^dagger x``."""
    x = x / np.linalg.norm(x)
    rho = x.conj().T @ x
    return x, 0.5 * (rho + rho.conj().T)


def _parabola_min(a, fa, b, fb, c, fc) -> float:
    num = (b - a) ** 2 * (fb - fc) - (b - c) ** 2 * (fb - fa)
    den = (b - a) * (fb - fc) - (b - c) * (fb - fa)
    if den == 0 or not math.isfinite(num) or not math.isfinite(den):
        return math.nan
    return b - 0.5 * num / den


def line_search(phi, f0: float, s0: float, max_evals: int = 30, refine: int = 2,
                s_max: float = math.inf):
    """Approximate minimizer of ``phi`` along ``0 < s <= s_max`` that lowers it below ``f0``.

    ``phi(s)`` returns ``(value, payload)``. The step is bracketed by
    doubling (or halving) from ``s0`` and refined by parabolic
    interpolation. Returns ``(s, value, payload)`` of the best evaluated
    point, or None when no evaluated step decreases ``phi``.
    """
    evals = []

    def ev(s):
        f, payload = phi(s)
        evals.append((f, s, payload))
        return f

    def best():
        ok = [e for e in evals if e[0] < f0]
        if not ok:
            return None
        f, s, payload = min(ok, key=lambda e: e[0])
        return s, f, payload

    b = min(s0, s_max)
    fb = ev(b)
    if fb < f0:
        a, fa = 0.0, f0
        while True:
            if len(evals) >= max_evals or b >= s_max:
                return best()
            c = min(2 * b, s_max)
            fc = ev(c)
            if not fc < fb:
                break
            a, fa, b, fb = b, fb, c, fc
    else:
        c, fc = b, fb
        while True:
            if len(evals) >= max_evals:
                return best()
            b = 0.5 * c
            fb = ev(b)
            if fb < f0:
                break
            c, fc = b, fb
        a, fa = 0.0, f0

    for _ in range(refine):
        if len(evals) >= max_evals:
            break
        x = _parabola_min(a, fa, b, fb, c, fc)
        if not (a < x < c) or x == b:
            break
        fx = ev(x)
        if x < b:
            if fx < fb:
                c, fc, b, fb = b, fb, x, fx
            else:
                a, fa = x, fx
        else:
            if fx < fb:
                a, fa, b, fb = b, fb, x, fx
            else:
                c, fc = x, fx
    return best()


def cg_solve(freq: Frequencies, pom: POM | ProductPOM, cfg: SolverConfig | None = None) -> SolverResult:
    """Factored-space CG started from ``A = 1/sqrt(d)``."""
    cfg = cfg or SolverConfig(algorithm="cg")
    lik = make_likelihood(freq, pom, cfg)
    run = Run(cfg, lik)
    run_cg(run, np.eye(lik.dim, dtype=complex) / math.sqrt(lik.dim))
    return run.result()


def run_cg(run: Run, a: np.ndarray, phase: str = "CG", switch_cos: float | None = None):
    """Iterate CG from the factor ``a``.

    With ``switch_cos`` set, returns ``("switch", rho, probs)`` at the first
    iteration whose Hessian-proxy cosine with the previous iterate exceeds
    it, or when CG stalls. Otherwise returns ``(status, rho, probs)`` once
    the run terminates.
    """
    cfg, lik = run.cfg, run.lik
    eye = np.eye(lik.dim)
    a, rho = factored_state(a)
    p = lik.probs(rho)
    F = lik.value(p)
    if not np.isfinite(F):
        raise ValueError("objective is not finite at the starting state")
    run.offer(rho, F)
    g = -a @ (lik.r_operator(p) - eye)
    direction = -g
    s_prev = cfg.ls_step0
    q_prev = lik.hessian_proxy(p) if switch_cos is not None else None

    def search(d):
        # F is invariant under rescaling A, so steps are capped relative to |A| = 1
        s_max = cfg.ls_max_rel_step / max(np.linalg.norm(d), 1e-300)
        return line_search(phi_along(d), F, s_prev, cfg.ls_max_evals, cfg.ls_refine, s_max)

    def phi_along(d):
        def phi(s):
            x, r = factored_state(a + s * d)
            pr = lik.probs(r)
            return lik.value(pr), (x, r, pr)
        return phi

    for _ in range(cfg.max_iter):
        if inner(g, direction) >= 0:
            direction = -g
        found = search(direction)
        if found is None and not np.array_equal(direction, -g):
            direction = -g
            found = search(direction)
        if found is None:
            if switch_cos is not None:
                return "switch", rho, p
            return run.stop(STALLED), rho, p
        s, F, (a, rho, p) = found
        s_prev = s

        g_new = -a @ (lik.r_operator(p) - eye)
        gg = inner(g, g)
        beta = max(0.0, inner(g_new, g_new - g) / gg) if gg > 0 else 0.0
        direction = -g_new + beta * direction
        g = g_new

        status = run.record(rho, F, s, False, phase)
        if switch_cos is not None:
            q = lik.hessian_proxy(p)
            cos = proxy_angle_cos(q, q_prev)
            q_prev = q
            if status == STALLED or (status is None and cos > switch_cos):
                return "switch", rho, p
        if status:
            return status, rho, p
    return run.trace.status, rho, p
