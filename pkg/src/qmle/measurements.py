"""Measurement outcome sets (POMs), built-in families and product structure.

Outcome indexing contract for product POMs: the flattened index of the
outcome tuple ``(k_1, ..., k_n)`` (0-based) is ``sum_a k_a * K^(n-a)`` with
register 1 the most significant digit. Every probability vector, count file
and kernel in the package uses this order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import NamedTuple, Sequence

import numpy as np

from .operators import hermitian_residual, pack_hermitian, unpack_hermitian

SIC_TOL = 1e-6


class SICError(ValueError):
    """Fiducial whose Weyl-Heisenberg orbit is not a SIC."""

    def __init__(self, residual: float, tol: float):
        super().__init__(f"fiducial fails SIC property: overlap residual {residual:.3g} > {tol:g}")
        self.residual = residual


@dataclass(frozen=True, eq=False)
class POM:
    """A list of K positive operators on C^d summing to the identity.

    Elements are held in packed real coordinates (see
    :func:`qmle.operators.pack_hermitian`), one row per outcome, which is
    also the matrix used by the dense probability kernel.
    """

    packed: np.ndarray
    dim: int
    name: str = "custom"
    hermitian_residual: float = 0.0

    @classmethod
    def from_elements(cls, elements, name: str = "custom") -> "POM":
        el = np.asarray(elements, dtype=complex)
        if el.ndim != 3 or el.shape[1] != el.shape[2]:
            raise ValueError(f"POM elements must have shape (K, d, d), got {el.shape}")
        res = max((hermitian_residual(e) for e in el), default=0.0)
        return cls(pack_hermitian(el), el.shape[1], name, res)

    @property
    def num_outcomes(self) -> int:
        return self.packed.shape[0]

    def __len__(self) -> int:
        return self.num_outcomes

    @cached_property
    def elements(self) -> np.ndarray:
        return unpack_hermitian(self.packed, self.dim)


class PomReport(NamedTuple):
    dim: int
    num_outcomes: int
    completeness_residual: float
    min_eigenvalue: float
    hermitian_residual: float

    def ok(self, tol: float = 1e-10) -> bool:
        return (self.completeness_residual <= tol and self.min_eigenvalue >= -tol
                and self.hermitian_residual <= tol)


def validate_pom(pom: POM, chunk: int = 4096) -> PomReport:
    """Completeness residual, smallest element eigenvalue and Hermiticity residual."""
    total = unpack_hermitian(pom.packed.sum(axis=0), pom.dim)
    comp = float(np.max(np.abs(total - np.eye(pom.dim))))
    lmin = np.inf
    for s in range(0, pom.num_outcomes, chunk):
        block = unpack_hermitian(pom.packed[s:s + chunk], pom.dim)
        lmin = min(lmin, float(np.linalg.eigvalsh(block)[:, 0].min()))
    return PomReport(pom.dim, pom.num_outcomes, comp, lmin, pom.hermitian_residual)


_PAULI = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def pauli6_register() -> POM:
    """Six-outcome qubit POM: (z+, z-, x+, x-, y+, y-) eigenprojectors, each weighted 1/3."""
    eye = np.eye(2)
    els = [(eye + s * _PAULI[a]) / 6 for a in "zxy" for s in (1, -1)]
    return POM.from_elements(els, "pauli6")


TETRAHEDRON_VECTORS = np.array([[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]]) / np.sqrt(3)


def bloch_pom(vectors, weight: float, name: str = "custom") -> POM:
    """Elements ``weight * (1 + a . sigma)`` for the given Bloch vectors."""
    eye = np.eye(2)
    els = [weight * (eye + v[0] * _PAULI["x"] + v[1] * _PAULI["y"] + v[2] * _PAULI["z"])
           for v in np.asarray(vectors, dtype=float)]
    return POM.from_elements(els, name)


def tetrahedron_register() -> POM:
    return bloch_pom(TETRAHEDRON_VECTORS, 0.25, "tetrahedron")


def weyl_heisenberg_orbit(fiducial) -> np.ndarray:
    """Vectors ``X^j Z^l |fiducial>`` for j, l in 0..d-1, row index ``j*d + l``."""
    psi = np.asarray(fiducial, dtype=complex).ravel()
    d = psi.size
    omega = np.exp(2j * np.pi * np.arange(d) / d)
    out = np.empty((d * d, d), dtype=complex)
    for j in range(d):
        for l in range(d):
            # X|m> = |m+1 mod d>, so (X^j v)[m] = v[m - j]
            out[j * d + l] = np.roll(omega**l * psi, j)
    return out


def sic_overlap_residual(fiducial) -> float:
    """``max_{a != b} | |<psi_a|psi_b>|^2 - 1/(d+1) |`` over the orbit."""
    orbit = weyl_heisenberg_orbit(fiducial)
    d = orbit.shape[1]
    if d == 1:
        return 0.0
    gram = np.abs(orbit.conj() @ orbit.T) ** 2
    off = ~np.eye(d * d, dtype=bool)
    return float(np.max(np.abs(gram[off] - 1.0 / (d + 1))))


def sic_from_fiducial(fiducial, tol: float = SIC_TOL) -> POM:
    """SIC POM ``{|psi_jl><psi_jl| / d}`` from the Weyl-Heisenberg orbit of a fiducial."""
    psi = np.asarray(fiducial, dtype=complex).ravel()
    norm = np.linalg.norm(psi)
    if abs(norm - 1.0) > 1e-10:
        raise ValueError(f"fiducial must be unit norm, got norm {norm!r}")
    res = sic_overlap_residual(psi)
    if res > tol:
        raise SICError(res, tol)
    orbit = weyl_heisenberg_orbit(psi)
    d = psi.size
    els = np.einsum("ki,kj->kij", orbit, orbit.conj()) / d
    return POM.from_elements(els, f"sic{d}")


def qubit_sic_fiducial() -> np.ndarray:
    """Qubit fiducial with Bloch vector (1,1,1)/sqrt(3); its orbit is the tetrahedron."""
    theta = np.arccos(1 / np.sqrt(3))
    return np.array([np.cos(theta / 2), np.exp(1j * np.pi / 4) * np.sin(theta / 2)])


def hesse_sic_fiducial() -> np.ndarray:
    return np.array([0, 1, -1], dtype=complex) / np.sqrt(2)


@dataclass(frozen=True, eq=False)
class ProductPOM:
    """Product of per-register POMs, ``Pi_k = pi_{k_1} (x) ... (x) pi_{k_n}``.

    Registers may differ but must share a dimension.
    """

    registers: tuple[POM, ...]
    name: str = field(default="")

    def __post_init__(self):
        if not self.registers:
            raise ValueError("product POM needs at least one register")
        dims = {r.dim for r in self.registers}
        if len(dims) != 1:
            raise ValueError(f"registers must share a dimension, got {sorted(dims)}")

    @property
    def n(self) -> int:
        return len(self.registers)

    @property
    def register_dim(self) -> int:
        return self.registers[0].dim

    @property
    def register_sizes(self) -> tuple[int, ...]:
        return tuple(r.num_outcomes for r in self.registers)

    @property
    def dim(self) -> int:
        return self.register_dim ** self.n

    @property
    def num_outcomes(self) -> int:
        return int(np.prod(self.register_sizes))

    def __len__(self) -> int:
        return self.num_outcomes

    @property
    def identical(self) -> bool:
        return all(r is self.registers[0] for r in self.registers)

    def flatten_index(self, digits) -> np.ndarray:
        """Outcome digits ``(..., n)`` (0-based, register 1 first) to flat indices."""
        digits = np.asarray(digits, dtype=np.int64)
        return np.ravel_multi_index(tuple(np.moveaxis(digits, -1, 0)), self.register_sizes)

    def unflatten_index(self, k) -> np.ndarray:
        return np.stack(np.unravel_index(np.asarray(k, dtype=np.int64), self.register_sizes), axis=-1)

    def materialize(self, block_bytes: int = 64 << 20) -> POM:
        """Dense POM with all K Kronecker products in flattened order."""
        d = self.dim
        dr = self.register_dim
        K = self.num_outcomes
        packed = np.empty((K, d * d))
        regs = [r.elements for r in self.registers]
        block = max(1, block_bytes // (16 * d * d))
        for s in range(0, K, block):
            dig = self.unflatten_index(np.arange(s, min(K, s + block)))
            el = regs[0][dig[:, 0]]
            for a in range(1, self.n):
                m = el.shape[-1]
                el = np.einsum("bij,bkl->bikjl", el, regs[a][dig[:, a]]).reshape(-1, m * dr, m * dr)
            packed[s:s + el.shape[0]] = pack_hermitian(el)
        return POM(packed, d, f"dense({self.name or 'product'})")


def product_pom(register: POM | Sequence[POM], n: int | None = None) -> ProductPOM:
    """``n`` copies of ``register``, or the given list of registers when ``n`` is None."""
    if isinstance(register, POM):
        if n is None or n < 1:
            raise ValueError("register count must be at least 1")
        return ProductPOM((register,) * n, f"prod:{register.name}:{n}")
    regs = tuple(register)
    if n is not None and n != len(regs):
        raise ValueError("n does not match the number of registers given")
    return ProductPOM(regs, "prod:" + ",".join(r.name for r in regs))


def setting_group_size(register: POM, tol: float = 1e-10) -> int | None:
    """Size G of consecutive element groups that each sum to ``1/m`` (m = K/G settings).

    Returns the smallest such G > 1, or None when the POM is not a uniform
    union of projective-style settings (e.g. the tetrahedron).
    """
    K, d = register.num_outcomes, register.dim
    eye = np.eye(d)
    for g in range(2, K):
        if K % g:
            continue
        m = K // g
        sums = unpack_hermitian(register.packed.reshape(m, g, -1).sum(axis=1), d)
        if np.all(np.abs(sums - eye / m) <= tol):
            return g
    return None
