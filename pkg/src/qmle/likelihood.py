"""Objective, gradient and probability kernels.

Two kernel families compute Born probabilities ``p_k = tr(rho Pi_k)`` and
the operator ``R = sum_k Pi_k f_k / p_k`` (so that grad F = -R):

* dense: one trace inner product per outcome, O(K d^2);
* product: register-by-register partial traces, O(K_r^(n+1)) for a
  product POM, and its adjoint for R.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .measurements import POM, ProductPOM
from .operators import pack_hermitian, unpack_hermitian


class SingularGradientError(ArithmeticError):
    """A probability on the support of the data is not positive."""


@dataclass(frozen=True, eq=False)
class Frequencies:
    """Sparse relative frequencies ``{(k, f_k)}`` with ``f_k > 0``.

    ``total`` is the number of copies N, or None for exact-frequency data.
    """

    indices: np.ndarray
    values: np.ndarray
    total: int | None = None

    def __post_init__(self):
        idx = np.asarray(self.indices, dtype=np.int64)
        val = np.asarray(self.values, dtype=float)
        if idx.shape != val.shape or idx.ndim != 1:
            raise ValueError("indices and values must be 1-D arrays of equal length")
        if idx.size == 0:
            raise ValueError("frequencies are empty")
        order = np.argsort(idx, kind="stable")
        idx, val = idx[order], val[order]
        if np.any(np.diff(idx) == 0):
            raise ValueError("duplicate outcome indices")
        if idx[0] < 0:
            raise ValueError("negative outcome index")
        if np.any(val <= 0):
            raise ValueError("frequencies must be strictly positive (omit zero counts)")
        if abs(val.sum() - 1.0) > 1e-12:
            raise ValueError(f"frequencies sum to {val.sum()!r}, not 1")
        if self.total is not None and self.total < 1:
            raise ValueError("total copies must be positive")
        object.__setattr__(self, "indices", idx)
        object.__setattr__(self, "values", val)

    @classmethod
    def from_counts(cls, indices, counts) -> "Frequencies":
        counts = np.asarray(counts)
        keep = counts > 0
        n = int(counts[keep].sum())
        return cls(np.asarray(indices)[keep], counts[keep] / n, n)

    @classmethod
    def exact(cls, probs, threshold: float = 1e-14) -> "Frequencies":
        """``f_k = p_k`` on outcomes with ``p_k > threshold``, renormalized."""
        probs = np.asarray(probs, dtype=float)
        idx = np.flatnonzero(probs > threshold)
        val = probs[idx]
        return cls(idx, val / val.sum(), None)

    @property
    def is_exact(self) -> bool:
        return self.total is None

    def dense(self, K: int) -> np.ndarray:
        if self.indices[-1] >= K:
            raise IndexError(f"outcome index {self.indices[-1]} out of range for K={K}")
        f = np.zeros(K)
        f[self.indices] = self.values
        return f

    def entropy(self) -> float:
        """``-sum f ln f``, the smallest value F can take for these frequencies."""
        return float(-np.sum(self.values * np.log(self.values)))


class OpCounter:
    """Accumulates elementary add/multiply counts of the product kernels."""

    def __init__(self):
        self.ops = 0

    def add(self, n: int) -> None:
        self.ops += int(n)


def _check_dim(rho: np.ndarray, d: int) -> None:
    if rho.shape != (d, d):
        raise ValueError(f"operator shape {rho.shape} does not match POM dimension {d}")


def born_probs_dense(rho: np.ndarray, pom: POM) -> np.ndarray:
    """``p_k = tr(rho Pi_k)`` for every outcome, one inner product per element."""
    rho = np.asarray(rho)
    _check_dim(rho, pom.dim)
    return pom.packed @ pack_hermitian(rho)


def born_probs_product(rho: np.ndarray, pom: ProductPOM, counter: OpCounter | None = None) -> np.ndarray:
    """Probabilities for a product POM by successive partial traces.

    Starting from the last register, ``rho`` is replaced for every ``k_n`` by
    ``tr_n(rho pi_{k_n})``, then the register n-1 is traced out against each
    ``pi_{k_{n-1}}``, and so on until scalars remain.
    """
    rho = np.asarray(rho)
    _check_dim(rho, pom.dim)
    dr = pom.register_dim
    x = rho.reshape(pom.dim, pom.dim, 1)
    for ell in range(pom.n, 0, -1):
        el = pom.registers[ell - 1].elements
        k = el.shape[0]
        D = dr ** (ell - 1)
        m = x.shape[2]
        # rows (I, J, m), columns (i, j) of the d_r x d_r sub-blocks
        y = x.reshape(D, dr, D, dr, m).transpose(0, 2, 4, 1, 3).reshape(D * D * m, dr * dr)
        # tr(X pi) = sum_ij X_ij pi_ji
        z = y @ el.transpose(0, 2, 1).reshape(k, dr * dr).T
        if counter is not None:
            counter.add(2 * y.shape[0] * dr * dr * k)
        x = z.reshape(D, D, m, k).transpose(0, 1, 3, 2).reshape(D, D, k * m)
    return x.reshape(-1).real.copy()


def r_from_coefficients_dense(c: np.ndarray, pom: POM) -> np.ndarray:
    """``sum_k c_k Pi_k`` with one term per element."""
    return unpack_hermitian(np.asarray(c, dtype=float) @ pom.packed, pom.dim)


def r_from_coefficients_product(c: np.ndarray, pom: ProductPOM, counter: OpCounter | None = None) -> np.ndarray:
    """``sum_k c_k Pi_k`` for a product POM; the adjoint of :func:`born_probs_product`."""
    dr = pom.register_dim
    y = np.asarray(c, dtype=float).reshape(1, 1, -1)
    if y.shape[2] != pom.num_outcomes:
        raise ValueError(f"coefficient vector has length {y.shape[2]}, expected {pom.num_outcomes}")
    for ell in range(1, pom.n + 1):
        el = pom.registers[ell - 1].elements
        k = el.shape[0]
        D = dr ** (ell - 1)
        m = y.shape[2] // k
        z = y.reshape(D, D, k, m).transpose(0, 1, 3, 2).reshape(D * D * m, k)
        w = z @ el.reshape(k, dr * dr)
        if counter is not None:
            counter.add(2 * z.shape[0] * dr * dr * k)
        y = w.reshape(D, D, m, dr, dr).transpose(0, 3, 1, 4, 2).reshape(D * dr, D * dr, m)
    r = y.reshape(pom.dim, pom.dim)
    return 0.5 * (r + r.conj().T)


def neg_log_lik(freq: Frequencies, probs: np.ndarray) -> float:
    """``F = -sum_{f_k > 0} f_k ln p_k``; +inf if some supported ``p_k <= 0``."""
    p = np.asarray(probs)[freq.indices]
    if np.any(p <= 0):
        return np.inf
    return float(-np.dot(freq.values, np.log(p)))


def _ratio_coefficients(freq: Frequencies, probs: np.ndarray) -> np.ndarray:
    probs = np.asarray(probs)
    p = probs[freq.indices]
    if np.any(p <= 0):
        raise SingularGradientError("non-positive probability on the data support")
    c = np.zeros(probs.shape[0])
    c[freq.indices] = freq.values / p
    return c


def r_operator_dense(freq: Frequencies, probs: np.ndarray, pom: POM) -> np.ndarray:
    """``R = sum_k Pi_k f_k / p_k`` (the negative gradient of F)."""
    return r_from_coefficients_dense(_ratio_coefficients(freq, probs), pom)


def r_operator_product(freq: Frequencies, probs: np.ndarray, pom: ProductPOM,
                       counter: OpCounter | None = None) -> np.ndarray:
    return r_from_coefficients_product(_ratio_coefficients(freq, probs), pom, counter)


def hessian_proxy(freq: Frequencies, probs: np.ndarray) -> np.ndarray:
    """``q_k = f_k / p_k^2`` on the data support, aligned with ``freq.indices``."""
    p = np.asarray(probs)[freq.indices]
    if np.any(p <= 0):
        raise SingularGradientError("non-positive probability on the data support")
    return freq.values / p**2


def proxy_angle_cos(q_now: np.ndarray, q_prev: np.ndarray) -> float:
    """Cosine of the angle between two Hessian-proxy vectors on a common support."""
    q_now = np.asarray(q_now, dtype=float)
    q_prev = np.asarray(q_prev, dtype=float)
    if q_now.shape != q_prev.shape:
        raise ValueError("proxy vectors must share a support")
    den = np.sqrt(np.dot(q_now, q_now) * np.dot(q_prev, q_prev))
    if den == 0:
        raise ZeroDivisionError("angle undefined for a zero proxy vector")
    return float(np.clip(np.dot(q_now, q_prev) / den, -1.0, 1.0))


class Likelihood:
    """Binds data and a POM to the kernels used by the solvers.

    With ``use_product=False`` a product POM is materialized and evaluated
    densely. Kernel call counts are kept in ``n_probs`` and ``n_grads``.
    """

    def __init__(self, freq: Frequencies, pom: POM | ProductPOM, use_product: bool = True):
        self.freq = freq
        if isinstance(pom, ProductPOM) and not use_product:
            pom = pom.materialize()
        self.pom = pom
        self.product = isinstance(pom, ProductPOM)
        self.dim = pom.dim
        self.num_outcomes = pom.num_outcomes
        if freq.indices[-1] >= self.num_outcomes:
            raise IndexError(f"outcome index {freq.indices[-1]} out of range for K={self.num_outcomes}")
        self.n_probs = 0
        self.n_grads = 0

    def probs(self, rho: np.ndarray) -> np.ndarray:
        self.n_probs += 1
        if self.product:
            return born_probs_product(rho, self.pom)
        return born_probs_dense(rho, self.pom)

    def value(self, probs: np.ndarray) -> float:
        return neg_log_lik(self.freq, probs)

    def r_operator(self, probs: np.ndarray) -> np.ndarray:
        self.n_grads += 1
        if self.product:
            return r_operator_product(self.freq, probs, self.pom)
        return r_operator_dense(self.freq, probs, self.pom)

    def supported_positive(self, probs: np.ndarray) -> bool:
        return bool(np.all(np.asarray(probs)[self.freq.indices] > 0))

    def hessian_proxy(self, probs: np.ndarray) -> np.ndarray:
        return hessian_proxy(self.freq, probs)
