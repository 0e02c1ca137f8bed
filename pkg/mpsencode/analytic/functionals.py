"""Derivative inner products h_{n,m} and the g1 / g2 smoothness functionals.

Everything is evaluated on the unit-rescaled function F(u) = sqrt(L) f(L u), so
F^{(n)}(u) = L^{n + 1/2} f^{(n)}(L u).
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..errors import NumericalConsistencyError, PreconditionError
from ..funcspace.oracle import FunctionOracle
from .quadrature import integrate

logger = logging.getLogger(__name__)

NEGATIVE_TOLERANCE = 1e-9
GRAM_CUTOFF = 1e-12


@dataclass(frozen=True)
class InnerProducts:
    """h[n, m] = int_0^1 F^{(n)} conj(F^{(m)}) du."""

    h: np.ndarray
    support_length: float

    def __getitem__(self, nm) -> complex:
        n, m = nm
        return complex(self.h[n, m])

    @property
    def order(self) -> int:
        return self.h.shape[0] - 1


def _rescaled_derivatives(oracle: FunctionOracle, L: float, order: int, u: np.ndarray) -> np.ndarray:
    x = L * u
    rows = [L ** (n + 0.5) * oracle.derivative(n, x) for n in range(order + 1)]
    return np.vstack(rows)


def inner_products(oracle: FunctionOracle, L: Optional[float] = None, order: int = 2, atol: float = 1e-10) -> InnerProducts:
    """All h_{n,m} for n, m <= order from one vector-valued quadrature."""
    if order not in (0, 1, 2):
        raise PreconditionError(f"derivative order must be <= 2, got {order}")
    L = oracle.support_length if L is None else float(L)
    pairs = [(n, m) for n in range(order + 1) for m in range(n, order + 1)]

    def integrand(u: np.ndarray) -> np.ndarray:
        d = _rescaled_derivatives(oracle, L, order, u)
        return np.vstack([d[n] * np.conj(d[m]) for n, m in pairs])

    values = integrate(integrand, 0.0, 1.0, atol=atol)
    h = np.zeros((order + 1, order + 1), dtype=np.complex128)
    for (n, m), value in zip(pairs, values):
        h[n, m] = value
        h[m, n] = np.conj(value)
    return InnerProducts(h=h, support_length=L)


def inner_h(oracle: FunctionOracle, L: Optional[float], n: int, m: int) -> complex:
    if not (0 <= n <= 2 and 0 <= m <= 2):
        raise PreconditionError("inner products are defined for derivative orders up to 2")
    return inner_products(oracle, L, order=max(n, m))[n, m]


def _clamp(value: float, scale: float, name: str) -> float:
    if value < -NEGATIVE_TOLERANCE * max(1.0, scale):
        raise NumericalConsistencyError(f"{name} = {value:.3e} is negative beyond tolerance")
    return max(0.0, value)


def g1_from(h: InnerProducts) -> float:
    """h11 - |h10|^2 after normalizing F to unit norm."""
    h00 = h.h[0, 0].real
    if h00 <= 0:
        raise NumericalConsistencyError("oracle has zero norm on its support")
    ratio = h.h[1, 1].real / h00
    value = ratio - abs(h.h[1, 0]) ** 2 / h00**2
    return _clamp(float(value), ratio, "g1")


def g2_from(h: InnerProducts) -> float:
    """Squared norm of F'' after projection out of span{F, F'}, per unit norm of F.

    The projection uses an eigenvalue pseudo-inverse of the Gram matrix so that
    F' parallel to F (exponentials) is handled without blowing up.
    """
    if h.order < 2:
        raise PreconditionError("g2 needs inner products up to second order")
    h00 = h.h[0, 0].real
    if h00 <= 0:
        raise NumericalConsistencyError("oracle has zero norm on its support")
    # gram[i, j] = <F^(i) | F^(j)> = h[j, i]; w[i] = <F^(i) | F''> = h[2, i]
    gram = h.h[:2, :2].T
    w = np.array([h.h[2, 0], h.h[2, 1]])
    evals, evecs = np.linalg.eigh((gram + gram.conj().T) / 2.0)
    keep = evals > GRAM_CUTOFF * max(evals.max(), 0.0)
    coeffs = evecs[:, keep].conj().T @ w
    projected = float(np.sum(np.abs(coeffs) ** 2 / evals[keep]))
    h22 = h.h[2, 2].real
    value = (h22 - projected) / h00
    return _clamp(float(value), h22 / h00, "g2")


def g1(oracle: FunctionOracle, L: Optional[float] = None) -> float:
    value = g1_from(inner_products(oracle, L, order=1))
    logger.debug("g1(%s) = %.10g", oracle.name, value)
    return value


def g2(oracle: FunctionOracle, L: Optional[float] = None) -> float:
    value = g2_from(inner_products(oracle, L, order=2))
    logger.debug("g2(%s) = %.10g", oracle.name, value)
    return value
