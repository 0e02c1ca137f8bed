"""Function oracles: vectorized f(x) on [0, L] with optional analytic derivatives."""
from __future__ import annotations

import threading
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import special

from ..errors import DegenerateInputError, EvaluationError, PreconditionError, SizeLimitError
from .grid import MAX_DENSE_QUBITS, Grid

ArrayFn = Callable[[np.ndarray], np.ndarray]

_EPS = np.finfo(np.float64).eps


@dataclass(frozen=True)
class FunctionOracle:
    """Black-box f on [0, L]. `eval` must accept and return 1-D arrays."""

    eval: ArrayFn
    support_length: float
    deriv1: Optional[ArrayFn] = None
    deriv2: Optional[ArrayFn] = None
    is_real: bool = True
    name: str = "f"
    # L2 norm of f on [0, L] when known in closed form
    l2_norm: Optional[float] = None

    def __call__(self, x) -> np.ndarray:
        x = np.atleast_1d(np.asarray(x, dtype=np.float64))
        with np.errstate(all="ignore"):
            values = np.asarray(self.eval(x))
        values = np.broadcast_to(values, x.shape)
        bad = ~np.isfinite(values)
        if bad.any():
            offending = float(x[np.argmax(bad)])
            raise EvaluationError(f"{self.name} is not finite at x={offending!r}", x=offending)
        if self.is_real:
            return np.real(values).astype(np.float64)
        return values.astype(np.complex128)

    def derivative(self, order: int, x) -> np.ndarray:
        """f' or f'' at x; analytic when attached, otherwise a 5-point stencil."""
        x = np.atleast_1d(np.asarray(x, dtype=np.float64))
        if order == 0:
            return self(x)
        analytic = {1: self.deriv1, 2: self.deriv2}.get(order)
        if order not in (1, 2):
            raise PreconditionError(f"derivative order must be 0, 1 or 2, got {order}")
        if analytic is not None:
            with np.errstate(all="ignore"):
                values = np.broadcast_to(np.asarray(analytic(x)), x.shape)
            if not np.all(np.isfinite(values)):
                offending = float(x[np.argmax(~np.isfinite(values))])
                raise EvaluationError(
                    f"derivative {order} of {self.name} is not finite at x={offending!r}",
                    x=offending,
                )
            return np.real(values).astype(np.float64) if self.is_real else values.astype(np.complex128)
        return _stencil_derivative(self, order, x)


def _stencil_derivative(oracle: FunctionOracle, order: int, x: np.ndarray) -> np.ndarray:
    L = oracle.support_length
    h = L * (_EPS ** (1.0 / 3.0) if order == 1 else _EPS**0.25)
    out = np.empty(x.shape, dtype=np.float64 if oracle.is_real else np.complex128)

    forward = x - 2 * h < 0.0
    backward = (x + 2 * h > L) & ~forward
    central = ~(forward | backward)

    if central.any():
        xc = x[central]
        fm2, fm1, fp1, fp2 = (oracle(xc + s * h) for s in (-2, -1, 1, 2))
        if order == 1:
            out[central] = (fm2 - 8 * fm1 + 8 * fp1 - fp2) / (12 * h)
        else:
            f0 = oracle(xc)
            out[central] = (-fm2 + 16 * fm1 - 30 * f0 + 16 * fp1 - fp2) / (12 * h * h)

    for mask, sign in ((forward, 1.0), (backward, -1.0)):
        if not mask.any():
            continue
        xs = x[mask]
        f = [oracle(xs + sign * i * h) for i in range(5)]
        if order == 1:
            out[mask] = sign * (-25 * f[0] + 48 * f[1] - 36 * f[2] + 16 * f[3] - 3 * f[4]) / (12 * h)
        else:
            out[mask] = (35 * f[0] - 104 * f[1] + 114 * f[2] - 56 * f[3] + 11 * f[4]) / (12 * h * h)
    return out


class CountingOracle:
    """Wraps an oracle and counts point evaluations; safe for concurrent use."""

    def __init__(self, oracle: FunctionOracle):
        self.oracle = oracle
        self._lock = threading.Lock()
        self._calls = 0

    @property
    def calls(self) -> int:
        with self._lock:
            return self._calls

    @property
    def l2_norm(self) -> Optional[float]:
        return self.oracle.l2_norm

    @property
    def support_length(self) -> float:
        return self.oracle.support_length

    def __call__(self, x) -> np.ndarray:
        x = np.atleast_1d(np.asarray(x, dtype=np.float64))
        with self._lock:
            self._calls += x.size
        return self.oracle(x)


def discretize(oracle: FunctionOracle, grid: Grid) -> np.ndarray:
    """f on every grid point, big-endian order, scaled to unit Euclidean norm.

    The dtype follows the oracle: float64 for real oracles, complex128 otherwise.
    """
    if grid.n_qubits > MAX_DENSE_QUBITS:
        raise SizeLimitError(
            f"dense discretization limited to {MAX_DENSE_QUBITS} qubits, got {grid.n_qubits}"
        )
    values = oracle(grid.points())
    norm = np.linalg.norm(values)
    if norm == 0.0:
        raise DegenerateInputError(f"{oracle.name} vanishes on every grid point")
    return values / norm


# Standard test oracles


def constant_oracle(L: float = 1.0) -> FunctionOracle:
    zero = lambda x: np.zeros_like(x)
    return FunctionOracle(lambda x: np.ones_like(x), L, zero, zero, name="constant", l2_norm=float(np.sqrt(L)))


def sin_oracle(L: float = 1.0) -> FunctionOracle:
    """sin(pi x / L): the exactly solvable two-level spectrum."""
    k = np.pi / L
    return FunctionOracle(
        lambda x: np.sin(k * x),
        L,
        lambda x: k * np.cos(k * x),
        lambda x: -k * k * np.sin(k * x),
        name="sin",
        l2_norm=float(np.sqrt(L / 2.0)),
    )


def exp_oracle(b: float, L: float = 1.0) -> FunctionOracle:
    """exp(b x): an exact product state on any grid."""
    l2 = np.sqrt(np.expm1(2.0 * b * L) / (2.0 * b)) if b != 0 else np.sqrt(L)
    return FunctionOracle(
        lambda x: np.exp(b * x),
        L,
        lambda x: b * np.exp(b * x),
        lambda x: b * b * np.exp(b * x),
        name=f"exp({b:g}x)",
        l2_norm=float(l2),
    )


def gaussian_oracle(mu: float, sigma: float, L: float = 1.0) -> FunctionOracle:
    """Un-normalised exp[-(x-mu)^2 / 4 sigma^2], i.e. the square root of a normal density."""
    if sigma <= 0:
        raise PreconditionError("sigma must be positive")
    a = 1.0 / (4.0 * sigma * sigma)
    f = lambda x: np.exp(-a * (x - mu) ** 2)
    s = sigma * np.sqrt(2.0)
    l2 = np.sqrt(sigma * np.sqrt(np.pi / 2.0) * (special.erf((L - mu) / s) + special.erf(mu / s)))
    return FunctionOracle(
        f,
        L,
        lambda x: -2 * a * (x - mu) * f(x),
        lambda x: (4 * a * a * (x - mu) ** 2 - 2 * a) * f(x),
        name="gaussian",
        l2_norm=float(l2),
    )


def polynomial_oracle(coeffs: Sequence[float], L: float = 1.0) -> FunctionOracle:
    """sum_j coeffs[j] x^j."""
    poly = np.polynomial.Polynomial(np.asarray(coeffs, dtype=np.float64))
    d1, d2 = poly.deriv(1), poly.deriv(2)
    squared = (poly * poly).integ()
    l2 = np.sqrt(max(float(squared(L) - squared(0.0)), 0.0))
    return FunctionOracle(poly, L, d1, d2, name=f"poly{len(coeffs) - 1}", l2_norm=float(l2))


def step_oracle(x0: float, L: float = 1.0) -> FunctionOracle:
    """Indicator of x >= x0. Not smooth; derivatives are left to the stencil."""
    l2 = np.sqrt(L - min(max(x0, 0.0), L))
    return FunctionOracle(lambda x: (x >= x0).astype(np.float64), L, name="step", l2_norm=float(l2))
