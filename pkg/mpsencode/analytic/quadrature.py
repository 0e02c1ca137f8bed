"""Composite Gauss-Legendre quadrature with panel doubling."""
from __future__ import annotations

import logging
from functools import lru_cache
from typing import Callable, Tuple

import numpy as np

from ..errors import QuadratureError

logger = logging.getLogger(__name__)

DEFAULT_ORDER = 24
MAX_REFINEMENTS = 16


@lru_cache(maxsize=16)
def _nodes(order: int) -> Tuple[np.ndarray, np.ndarray]:
    return np.polynomial.legendre.leggauss(order)


def gauss_legendre(fn: Callable[[np.ndarray], np.ndarray], a: float, b: float, panels: int, order: int = DEFAULT_ORDER):
    """Fixed composite rule. `fn` maps nodes (M,) to values (M,) or (K, M)."""
    x, w = _nodes(order)
    edges = np.linspace(a, b, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    values = np.asarray(fn(nodes))
    return values @ weights


def integrate(
    fn: Callable[[np.ndarray], np.ndarray],
    a: float = 0.0,
    b: float = 1.0,
    atol: float = 1e-10,
    rtol: float = 1e-12,
    order: int = DEFAULT_ORDER,
    initial_panels: int = 4,
):
    """Integrate fn over [a, b], doubling panels until two successive estimates agree.

    Vector-valued integrands converge when every component does.
    """
    panels = initial_panels
    previous = gauss_legendre(fn, a, b, panels, order)
    error = np.inf
    for _ in range(MAX_REFINEMENTS):
        panels *= 2
        current = gauss_legendre(fn, a, b, panels, order)
        error = float(np.max(np.abs(current - previous)))
        scale = float(np.max(np.abs(current)))
        if error <= max(atol, rtol * scale):
            logger.debug("quadrature converged with %d panels, error %.2e", panels, error)
            return current
        previous = current
    raise QuadratureError(
        f"quadrature did not converge after {panels} panels (error estimate {error:.3e})",
        estimate=previous,
        error_estimate=error,
    )
