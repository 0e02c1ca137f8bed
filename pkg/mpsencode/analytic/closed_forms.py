"""Closed-form g1 / g2 for the named distributions, on the unit-rescaled support."""
from __future__ import annotations

import math

import numpy as np
from scipy import special, stats

from ..errors import UnsupportedKindError
from ..funcspace.distributions import DistributionKind, DistributionSpec, pdf, truncation_mass


def _upper_gamma(s: float, y: float) -> float:
    return float(special.gammaincc(s, y) * special.gamma(s))


def _truncated_normal_moments(alpha: float, beta: float, order: int = 4) -> np.ndarray:
    """E[y^k] for the standard normal truncated to [alpha, beta], k = 0..order."""
    if alpha > 0.0:
        z = float(stats.norm.sf(alpha) - stats.norm.sf(beta))
    else:
        z = float(special.ndtr(beta) - special.ndtr(alpha))
    pa = float(stats.norm.pdf(alpha))
    pb = float(stats.norm.pdf(beta))
    m = np.zeros(order + 1)
    m[0] = 1.0
    for k in range(1, order + 1):
        prev = m[k - 2] if k >= 2 else 0.0
        m[k] = (k - 1) * prev - (beta ** (k - 1) * pb - alpha ** (k - 1) * pa) / z
    return m


def _normal_moments(dist: DistributionSpec) -> np.ndarray:
    sigma = dist.scale
    return _truncated_normal_moments(-dist.mu / sigma, (dist.L - dist.mu) / sigma)


def _normal_g1(dist: DistributionSpec) -> float:
    m = _normal_moments(dist)
    var = m[2] - m[1] ** 2
    return dist.L**2 / (4.0 * dist.scale**2) * var


def _boundary_h10(dist: DistributionSpec) -> float:
    # int f f' = (f(L)^2 - f(0)^2) / 2 and f(0) = 0 for the one-sided laws
    return dist.L * float(pdf(dist, dist.L)) / (2.0 * truncation_mass(dist))


def _levy_g1(dist: DistributionSpec) -> float:
    c, L = dist.scale, dist.L
    y = c / (2.0 * L)
    mean_q1_sq = (
        4.0 * _upper_gamma(4.5, y) - 12.0 * _upper_gamma(3.5, y) + 9.0 * _upper_gamma(2.5, y)
    ) / (c * c * _upper_gamma(0.5, y))
    h11 = L * L * mean_q1_sq / 4.0
    return h11 - _boundary_h10(dist) ** 2


def _log_normal_g1(dist: DistributionSpec) -> float:
    mu, sigma, L = dist.mu, dist.scale, dist.L
    z_l = (math.log(L) - mu) / sigma
    b = z_l + 2.0 * sigma
    phi_b = float(stats.norm.pdf(b))
    cdf_b = float(special.ndtr(b))
    second = cdf_b - b * phi_b
    mean_q1_sq = (
        math.exp(-2.0 * mu + 2.0 * sigma * sigma)
        / float(special.ndtr(z_l))
        * (second / sigma**2 + 2.0 * phi_b / sigma + cdf_b)
    )
    h11 = L * L * mean_q1_sq / 4.0
    return h11 - _boundary_h10(dist) ** 2


def closed_form_g1(dist: DistributionSpec) -> float:
    """g1 of sqrt(p / R^2) rescaled to the unit interval, for normal, log-normal and Levy laws."""
    if dist.kind is DistributionKind.NORMAL:
        value = _normal_g1(dist)
    elif dist.kind is DistributionKind.LEVY:
        value = _levy_g1(dist)
    elif dist.kind is DistributionKind.LOG_NORMAL:
        value = _log_normal_g1(dist)
    else:
        raise UnsupportedKindError(f"no closed-form g1 for {dist.kind.value}")
    return max(0.0, float(value))


def closed_form_g2(dist: DistributionSpec) -> float:
    """g2 of the truncated normal: L^4 / (16 sigma^4) [Var(y^2) - Cov(y^2, y)^2 / Var(y)]."""
    if dist.kind is not DistributionKind.NORMAL:
        raise UnsupportedKindError(f"no closed-form g2 for {dist.kind.value}")
    m = _normal_moments(dist)
    var_y = m[2] - m[1] ** 2
    var_y2 = m[4] - m[2] ** 2
    cov = m[3] - m[2] * m[1]
    value = dist.L**4 / (16.0 * dist.scale**4) * (var_y2 - cov * cov / var_y)
    return max(0.0, float(value))


def window_start(dist: DistributionSpec) -> int:
    """First bond of the smoothness-controlled window, max(1, ceil(log2(L / 2 scale)))."""
    return max(1, math.ceil(math.log2(dist.L / (2.0 * dist.scale))))
