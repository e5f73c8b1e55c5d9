"""Simulated tomography data: exact frequencies or multinomial counts."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .likelihood import Frequencies, born_probs_dense, born_probs_product
from .measurements import POM, ProductPOM, setting_group_size
from .operators import rng_from_seed

MODES = ("exact", "per_setting", "global")


@dataclass
class SamplingPlan:
    mode: str = "exact"
    shots_per_setting: int = 100
    total_shots: int | None = None
    seed: int = 0

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown sampling mode {self.mode!r}; choose from {MODES}")
        if self.mode == "per_setting" and self.shots_per_setting < 1:
            raise ValueError("shots_per_setting must be positive")
        if self.mode == "global" and (self.total_shots is None or self.total_shots < 1):
            raise ValueError("global sampling needs a positive total_shots")


def born_probs(rho: np.ndarray, pom: POM | ProductPOM) -> np.ndarray:
    if isinstance(pom, ProductPOM):
        return born_probs_product(rho, pom)
    return born_probs_dense(rho, pom)


def _clean(p: np.ndarray) -> np.ndarray:
    p = np.clip(p, 0.0, None)
    return p / p.sum(axis=-1, keepdims=True)


def settings_layout(pom: ProductPOM) -> tuple[int, int]:
    """``(settings per register m, outcomes per setting G)`` for per-setting sampling."""
    sizes = set()
    for reg in pom.registers:
        g = setting_group_size(reg)
        if g is None:
            raise ValueError(f"register POM {reg.name!r} is not a union of measurement settings")
        sizes.add((reg.num_outcomes // g, g))
    if len(sizes) != 1:
        raise ValueError("registers must share a settings layout for per-setting sampling")
    return sizes.pop()


def sample_per_setting(probs: np.ndarray, pom: ProductPOM, shots: int, rng: np.random.Generator) -> np.ndarray:
    """Counts for ``shots`` copies in each of the ``m^n`` product settings.

    Within one setting the outcome distribution is ``m^n`` times the
    corresponding slice of the flattened probability vector.
    """
    m, g = settings_layout(pom)
    n = pom.n
    t = np.asarray(probs).reshape((m, g) * n)
    order = list(range(0, 2 * n, 2)) + list(range(1, 2 * n, 2))
    per_setting = t.transpose(order).reshape(m**n, g**n) * m**n
    counts = rng.multinomial(shots, _clean(per_setting))
    inverse = np.argsort(order)
    return counts.reshape((m,) * n + (g,) * n).transpose(inverse).reshape(-1)


def simulate(rho: np.ndarray, pom: POM | ProductPOM, plan: SamplingPlan) -> Frequencies:
    """Frequencies for ``rho`` measured with ``pom`` according to ``plan``."""
    p = born_probs(rho, pom)
    if plan.mode == "exact":
        return Frequencies.exact(p)
    rng = rng_from_seed(plan.seed)
    if plan.mode == "per_setting":
        if not isinstance(pom, ProductPOM):
            raise ValueError("per_setting sampling needs a product POM")
        counts = sample_per_setting(p, pom, plan.shots_per_setting, rng)
    else:
        counts = rng.multinomial(plan.total_shots, _clean(p))
    return Frequencies.from_counts(np.arange(counts.size), counts)
