"""Named distributions truncated to [0, L], their CDFs and square-root-density oracles."""
from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy import stats

from ..errors import DomainError, PreconditionError, SizeLimitError, UnsupportedTruncationError
from .grid import MAX_DENSE_QUBITS, Grid
from .oracle import FunctionOracle

logger = logging.getLogger(__name__)


class DistributionKind(str, Enum):
    NORMAL = "normal"
    LOG_NORMAL = "log_normal"
    LEVY = "levy"
    GAMMA = "gamma"
    SIN_TEST = "sin_test"
    EXP_TEST = "exp_test"
    CONSTANT = "constant"


@dataclass(frozen=True)
class DistributionSpec:
    """Distribution parameters. `scale` is sigma (normal, log-normal), c (Levy) or theta (Gamma, exp_test)."""

    kind: DistributionKind
    mu: float = 0.0
    scale: float = 1.0
    shape: float = 1.0
    support_length: float = 1.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", DistributionKind(self.kind))
        if not self.scale > 0:
            raise PreconditionError(f"scale must be positive, got {self.scale}")
        if not self.shape > 0:
            raise PreconditionError(f"shape must be positive, got {self.shape}")
        if not self.support_length > 0:
            raise PreconditionError(f"support_length must be positive, got {self.support_length}")

    @property
    def L(self) -> float:
        return self.support_length

    def label(self) -> str:
        return f"{self.kind.value}(mu={self.mu:g}, scale={self.scale:g}, L={self.support_length:g})"


def _frozen_law(dist: DistributionSpec):
    """scipy.stats frozen law for the untruncated distribution."""
    kind = dist.kind
    if kind is DistributionKind.NORMAL:
        return stats.norm(loc=dist.mu, scale=dist.scale)
    if kind is DistributionKind.LOG_NORMAL:
        return stats.lognorm(s=dist.scale, scale=np.exp(dist.mu))
    if kind is DistributionKind.LEVY:
        return stats.levy(loc=0.0, scale=dist.scale)
    if kind is DistributionKind.GAMMA:
        return stats.gamma(a=dist.shape, scale=dist.scale)
    if kind is DistributionKind.EXP_TEST:
        return stats.expon(scale=dist.scale)
    if kind is DistributionKind.CONSTANT:
        return stats.uniform(loc=0.0, scale=dist.support_length)
    return None


def _sin_test_cdf(x: np.ndarray, L: float) -> np.ndarray:
    u = x / L
    return u - np.sin(2 * np.pi * u) / (2 * np.pi)


def pdf(dist: DistributionSpec, x) -> np.ndarray:
    """Untruncated density at x."""
    x = np.asarray(x, dtype=np.float64)
    if dist.kind is DistributionKind.SIN_TEST:
        return (2.0 / dist.L) * np.sin(np.pi * x / dist.L) ** 2
    return _frozen_law(dist).pdf(x)


def _cdf_unchecked(dist: DistributionSpec, x) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if dist.kind is DistributionKind.SIN_TEST:
        return _sin_test_cdf(np.clip(x, 0.0, dist.L), dist.L)
    return _frozen_law(dist).cdf(x)


def distribution_cdf(dist: DistributionSpec, x):
    """Cumulative density of the untruncated law at x in [0, L]."""
    arr = np.asarray(x, dtype=np.float64)
    tol = 1e-12 * dist.L
    if np.any(arr < -tol) or np.any(arr > dist.L + tol) or np.any(np.isnan(arr)):
        raise DomainError(f"cdf argument outside [0, {dist.L:g}]: {x!r}")
    values = _cdf_unchecked(dist, np.clip(arr, 0.0, dist.L))
    return float(values) if np.ndim(values) == 0 else values


def truncation_mass(dist: DistributionSpec) -> float:
    """R^2 = cdf(L) - cdf(0), computed from the survival function when that is more accurate."""
    if dist.kind is DistributionKind.SIN_TEST:
        return 1.0
    law = _frozen_law(dist)
    lo = float(law.cdf(0.0))
    if lo > 0.5:
        return float(law.sf(0.0) - law.sf(dist.L))
    return float(law.cdf(dist.L) - lo)


def truncated_cdf(dist: DistributionSpec, x) -> np.ndarray:
    """(cdf(x) - cdf(0)) / R^2, the reference CDF for goodness-of-fit tests."""
    r2 = truncation_mass(dist)
    x = np.clip(np.asarray(x, dtype=np.float64), 0.0, dist.L)
    law = _frozen_law(dist)
    if law is not None and float(law.cdf(0.0)) > 0.5:
        values = (law.sf(0.0) - law.sf(x)) / r2
    else:
        values = (_cdf_unchecked(dist, x) - _cdf_unchecked(dist, 0.0)) / r2
    return np.clip(values, 0.0, 1.0)


def _log_density_derivatives(dist: DistributionSpec, x: np.ndarray):
    """(q', q'') with q = ln p, for x in the interior of the support."""
    kind = dist.kind
    if kind is DistributionKind.NORMAL:
        s2 = dist.scale**2
        return -(x - dist.mu) / s2, np.full_like(x, -1.0 / s2)
    if kind is DistributionKind.LOG_NORMAL:
        s2 = dist.scale**2
        lx = np.log(x)
        q1 = -(lx - dist.mu) / (s2 * x) - 1.0 / x
        q2 = -(1.0 - lx + dist.mu) / (s2 * x * x) + 1.0 / (x * x)
        return q1, q2
    if kind is DistributionKind.LEVY:
        c = dist.scale
        return c / (2 * x * x) - 1.5 / x, -c / x**3 + 1.5 / (x * x)
    if kind is DistributionKind.GAMMA:
        k, theta = dist.shape, dist.scale
        return (k - 1.0) / x - 1.0 / theta, -(k - 1.0) / (x * x)
    if kind is DistributionKind.EXP_TEST:
        return np.full_like(x, -1.0 / dist.scale), np.zeros_like(x)
    if kind is DistributionKind.CONSTANT:
        return np.zeros_like(x), np.zeros_like(x)
    return None


def sqrt_pdf_oracle(dist: DistributionSpec) -> FunctionOracle:
    """Oracle for sqrt(p(x) / R^2) on [0, L] with analytic derivatives where available."""
    r2 = truncation_mass(dist)
    if not r2 > np.finfo(np.float64).eps:
        raise UnsupportedTruncationError(
            f"truncation mass R^2={r2:.3e} on [0, {dist.L:g}] is below machine tolerance"
        )
    norm = 1.0 / np.sqrt(r2)
    L = dist.L

    if dist.kind is DistributionKind.SIN_TEST:
        k = np.pi / L
        amp = np.sqrt(2.0 / L)
        return FunctionOracle(
            lambda x: amp * np.sin(k * x),
            L,
            lambda x: amp * k * np.cos(k * x),
            lambda x: -amp * k * k * np.sin(k * x),
            name=dist.label(),
            l2_norm=1.0,
        )

    def f(x: np.ndarray) -> np.ndarray:
        return np.sqrt(pdf(dist, x)) * norm

    def derivs(x: np.ndarray):
        fx = f(x)
        positive = (fx > 0) & (x > 0)
        d1 = np.zeros_like(fx)
        d2 = np.zeros_like(fx)
        if positive.any():
            xp = x[positive]
            q1, q2 = _log_density_derivatives(dist, xp)
            d1[positive] = fx[positive] * q1 / 2.0
            d2[positive] = fx[positive] * (q2 / 2.0 + q1 * q1 / 4.0)
        return d1, d2

    logger.debug("sqrt-pdf oracle for %s with R^2=%.6e", dist.label(), r2, extra={"distribution": dist.kind.value})
    return FunctionOracle(
        f,
        L,
        lambda x: derivs(x)[0],
        lambda x: derivs(x)[1],
        name=dist.label(),
        l2_norm=1.0,
    )


def grid_mass(dist: DistributionSpec, grid: Grid) -> float:
    """Un-normalised Riemann sum of p(x) * step over the grid; tends to R^2 as N grows."""
    if grid.n_qubits > MAX_DENSE_QUBITS:
        raise SizeLimitError(f"grid_mass is a dense sum, limited to {MAX_DENSE_QUBITS} qubits")
    with np.errstate(all="ignore"):
        values = pdf(dist, grid.points())
    values = np.where(np.isfinite(values), values, 0.0)
    return float(np.sum(values) * grid.step)
