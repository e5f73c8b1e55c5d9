"""Euclidean projection onto the probability simplex and the state space."""

from __future__ import annotations

import numpy as np

from .operators import eigh_desc, from_eigensystem, hermitian_residual, hermitize

SYMMETRIZE_TOL = 1e-8


def simplex_project(lam) -> np.ndarray:
    """Nearest point of ``{x >= 0, sum x = 1}`` to ``lam``.

    With ``lam`` sorted descending, ``u`` is the largest j such that
    ``lam_j - (sum_{i<=j} lam_i - 1)/j > 0`` and the shift is
    ``w = (sum_{i<=u} lam_i - 1)/u``; the result is ``max(lam - w, 0)``.
    Unsorted input is handled and returned in its original order.
    """
    lam = np.asarray(lam, dtype=float)
    if lam.ndim != 1 or lam.size == 0:
        raise ValueError("simplex projection needs a non-empty vector")
    s = np.sort(lam)[::-1]
    j = np.arange(1, s.size + 1)
    css = np.cumsum(s)
    u = np.flatnonzero(s - (css - 1.0) / j > 0)[-1] + 1
    w = (css[u - 1] - 1.0) / u
    return np.maximum(lam - w, 0.0)


def project_to_states(h: np.ndarray) -> np.ndarray:
    """Frobenius-nearest density matrix to the Hermitian operator ``h``."""
    h = np.asarray(h, dtype=complex)
    res = hermitian_residual(h)
    if res > SYMMETRIZE_TOL:
        raise ValueError(f"projection input not Hermitian (residual {res:.3g})")
    lam, vec = eigh_desc(hermitize(h))
    lam_bar = simplex_project(lam)
    keep = lam_bar > 0
    v = vec[:, keep]
    return hermitize(from_eigensystem(lam_bar[keep], v))
