"""Eigen-structure of the spectral fractional Dirichlet Laplacian on (0, 1).

Eigenfunctions are the orthonormal sines phi_k(x) = sqrt(2) sin(pi k x) and
eigenvalues are lambda_k = (pi k)^(2s).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

KINDS = ("heat", "schrodinger")


@dataclass(frozen=True)
class FracModel:
    """Problem instance: fractional order ``s`` in (1/2, 1] and equation kind."""

    s: float
    kind: str = "heat"

    def __post_init__(self):
        if not (0.5 < self.s <= 1.0):
            raise ValueError(f"fractional order s must lie in (1/2, 1], got {self.s}")
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")

    @property
    def alpha(self) -> float:
        return 2.0 * self.s

    @property
    def beta(self) -> float:
        return 2.0 * self.s - 1.0

    @property
    def tau(self) -> float:
        return 1.0 / (2.0 * self.s - 1.0)

    @property
    def mu(self) -> float:
        return 1.0 / (self.alpha - 1.0)

    @property
    def a_coef(self) -> float:
        return np.pi ** self.alpha

    def with_kind(self, kind: str) -> "FracModel":
        return FracModel(self.s, kind)


@dataclass(frozen=True)
class EigenData:
    model: FracModel
    n_modes: int
    lam: np.ndarray = field(repr=False)
    gamma_n: np.ndarray = field(repr=False)

    @property
    def a_coef(self) -> float:
        return self.model.a_coef

    @property
    def alpha(self) -> float:
        return self.model.alpha


def eigenvalues(model: FracModel, n: int) -> EigenData:
    """First ``n`` eigenvalues ``lambda_k = (pi k)^(2 s)``."""
    if n < 1:
        raise ValueError("need at least one mode")
    k = np.arange(1, n + 1, dtype=float)
    lam = np.power(np.pi * k, model.alpha)
    lam.setflags(write=False)
    gam = (np.pi * k) ** 2
    gam.setflags(write=False)
    return EigenData(model=model, n_modes=n, lam=lam, gamma_n=gam)


def gap_stats(e: EigenData) -> tuple[float, float, float]:
    """Return (gap, Gamma1, Gamma2) over the stored modes.

    Because lambda is increasing and convex in k the infimum of |lambda_k - lambda_n|
    is attained by consecutive pairs.
    """
    if e.n_modes < 2:
        raise ValueError("gap statistics need at least two modes")
    lam = e.lam
    k = np.arange(1, e.n_modes + 1, dtype=float)
    ak = e.a_coef * k ** e.alpha
    gap = float(np.min(np.diff(lam)))
    gamma1 = float(np.max(np.abs(lam - ak) / k ** (e.alpha - 1.0)))
    gamma2 = float(np.max(k ** e.alpha / lam))
    return gap, gamma1, gamma2


def boundary_trace(k):
    """Normal derivative at x = 1 of sqrt(2) sin(pi k x), i.e. sqrt(2) pi k (-1)^k."""
    k = np.asarray(k)
    if np.any(k < 1):
        raise ValueError("mode index starts at 1")
    sign = np.where(k % 2 == 0, 1.0, -1.0)
    out = np.sqrt(2.0) * np.pi * k * sign
    return float(out) if out.ndim == 0 else out
