"""Hermitian operators, density matrices and pure states.

Operators are plain complex ``numpy`` arrays. The helpers here construct
them, check their invariants and provide the descending-order eigensystem
used throughout the package.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-10
PSD_TOL = 1e-10


def rng_from_seed(seed: int) -> np.random.Generator:
    """PCG64 generator; every random draw in the package goes through this."""
    return np.random.Generator(np.random.PCG64(int(seed)))


def hermitian_residual(h: np.ndarray) -> float:
    return float(np.max(np.abs(h - h.conj().T))) if h.size else 0.0


def hermitize(h: np.ndarray) -> np.ndarray:
    return 0.5 * (h + h.conj().T)


def eigh_desc(h: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues in descending order and the matching eigenvector columns."""
    w, v = np.linalg.eigh(h)
    return w[::-1], v[:, ::-1]


def from_eigensystem(w: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Rebuild ``sum_i w_i |v_i><v_i|``."""
    return (v * w) @ v.conj().T


def check_density_matrix(rho: np.ndarray, tol: float = TRACE_TOL) -> None:
    """Raise ``ValueError`` unless ``rho`` is a unit-trace PSD Hermitian matrix."""
    rho = np.asarray(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError(f"density matrix must be square, got shape {rho.shape}")
    res = hermitian_residual(rho)
    if res > 1e-10:
        raise ValueError(f"density matrix not Hermitian (residual {res:.3g})")
    tr = np.trace(rho).real
    if abs(tr - 1.0) > tol:
        raise ValueError(f"density matrix trace {tr!r} differs from 1")
    lmin = np.linalg.eigvalsh(hermitize(rho))[0]
    if lmin < -PSD_TOL:
        raise ValueError(f"density matrix has negative eigenvalue {lmin:.3g}")


def is_density_matrix(rho: np.ndarray, tol: float = TRACE_TOL) -> bool:
    try:
        check_density_matrix(rho, tol)
    except ValueError:
        return False
    return True


def maximally_mixed(d: int) -> np.ndarray:
    return np.eye(d, dtype=complex) / d


def pure_to_density(psi: np.ndarray) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    return np.outer(psi, psi.conj())


def haar_random_pure(d: int, seed: int) -> np.ndarray:
    """Haar-distributed unit vector in C^d.

    Drawn as a normalized vector of independent standard complex Gaussians:
    ``d`` real parts first, then ``d`` imaginary parts, from ``rng_from_seed(seed)``.
    """
    if d < 1:
        raise ValueError("dimension must be at least 1")
    rng = rng_from_seed(seed)
    z = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return z / np.linalg.norm(z)


def add_white_noise(rho: np.ndarray, eps: float) -> np.ndarray:
    """Depolarize: ``(1 - eps) * rho + eps * 1/d``."""
    if not 0.0 <= eps <= 1.0:
        raise ValueError(f"noise fraction must lie in [0, 1], got {eps}")
    rho = np.asarray(rho, dtype=complex)
    d = rho.shape[0]
    return (1.0 - eps) * rho + eps * np.eye(d) / d


def w_state(n: int) -> np.ndarray:
    """n-qubit W state: equal superposition of the weight-one basis states."""
    if n < 1:
        raise ValueError("need at least one qubit")
    psi = np.zeros(2**n, dtype=complex)
    # qubit 1 is the most significant bit
    psi[[1 << (n - 1 - a) for a in range(n)]] = 1.0 / np.sqrt(n)
    return psi


def ghz_state(n: int) -> np.ndarray:
    if n < 1:
        raise ValueError("need at least one qubit")
    psi = np.zeros(2**n, dtype=complex)
    psi[0] = psi[-1] = 1.0 / np.sqrt(2)
    return psi


def random_unitary(d: int, seed: int) -> np.ndarray:
    """Haar unitary via QR of a complex Ginibre matrix with phase fix."""
    rng = rng_from_seed(seed)
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph


def random_density(d: int, seed: int, rank: int | None = None) -> np.ndarray:
    """Random full-rank (or given rank) state from the Hilbert-Schmidt-type ensemble."""
    rng = rng_from_seed(seed)
    r = d if rank is None else rank
    g = rng.standard_normal((d, r)) + 1j * rng.standard_normal((d, r))
    rho = g @ g.conj().T
    return hermitize(rho / np.trace(rho).real)


class StateDistance(NamedTuple):
    trace_distance: float
    fidelity: float


def _psd_sqrt(rho: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(hermitize(rho))
    return from_eigensystem(np.sqrt(np.clip(w, 0.0, None)), v)


def state_distance(rho: np.ndarray, sigma: np.ndarray) -> StateDistance:
    """Trace distance ``||rho - sigma||_1 / 2`` and fidelity ``(tr sqrt(sqrt(rho) sigma sqrt(rho)))^2``."""
    rho = np.asarray(rho, dtype=complex)
    sigma = np.asarray(sigma, dtype=complex)
    if rho.shape != sigma.shape:
        raise ValueError(f"dimension mismatch: {rho.shape} vs {sigma.shape}")
    td = 0.5 * np.sum(np.abs(np.linalg.eigvalsh(hermitize(rho - sigma))))
    s = _psd_sqrt(rho)
    m = np.linalg.eigvalsh(hermitize(s @ sigma @ s))
    fid = np.sum(np.sqrt(np.clip(m, 0.0, None))) ** 2
    return StateDistance(float(np.clip(td, 0.0, 1.0)), float(np.clip(fid, 0.0, 1.0)))


# Orthonormal real coordinates for Hermitian matrices: diagonal, then
# sqrt(2)*Re and sqrt(2)*Im of the strict upper triangle. tr(AB) = pack(A) . pack(B).

def pack_hermitian(h: np.ndarray) -> np.ndarray:
    """Map Hermitian ``(..., d, d)`` arrays to real ``(..., d*d)`` coordinates."""
    h = np.asarray(h)
    d = h.shape[-1]
    iu, ju = np.triu_indices(d, k=1)
    diag = np.real(np.diagonal(h, axis1=-2, axis2=-1))
    up = h[..., iu, ju]
    s = np.sqrt(2.0)
    return np.concatenate([diag, s * up.real, s * up.imag], axis=-1)


def unpack_hermitian(x: np.ndarray, d: int) -> np.ndarray:
    """Inverse of :func:`pack_hermitian`."""
    x = np.asarray(x, dtype=float)
    iu, ju = np.triu_indices(d, k=1)
    m = iu.size
    h = np.zeros(x.shape[:-1] + (d, d), dtype=complex)
    idx = np.arange(d)
    h[..., idx, idx] = x[..., :d]
    up = (x[..., d:d + m] + 1j * x[..., d + m:]) / np.sqrt(2.0)
    h[..., iu, ju] = up
    h[..., ju, iu] = up.conj()
    return h
